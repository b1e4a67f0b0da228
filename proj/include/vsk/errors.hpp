#pragma once

#include <stdexcept>
#include <string>

namespace vsk {

// Base for everything thrown by the library.
struct error : std::runtime_error {
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad caller input: shape mismatch, invalid parameter, duplicate nodes, ...
struct argument_error : error {
  explicit argument_error(const std::string& msg) : error(msg) {}
};

// Cholesky failed even after the jitter ladder.
struct singular_error : error {
  explicit singular_error(const std::string& msg) : error(msg) {}
};

// Training loss or gradients went non-finite.
struct diverged_error : error {
  explicit diverged_error(const std::string& msg) : error(msg) {}
};

// File parsing / serialization problems.
struct io_error : error {
  explicit io_error(const std::string& msg) : error(msg) {}
};

} // namespace vsk
