#include "vsk/simd.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace vsk::simd {
namespace {

Isa g_isa = Isa::scalar;
const OpsTable* g_ops = nullptr;

void init() {
  Isa isa = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  if (const char* env = std::getenv("VSK_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) {
      isa = Isa::scalar;
    } else if (std::strcmp(env, "avx2") == 0) {
      if (cpu_has_avx2()) {
        isa = Isa::avx2;
      } else {
        std::fprintf(stderr, "vsk: VSK_SIMD=avx2 requested but CPU lacks AVX2+FMA, using scalar\n");
      }
    } else {
      std::fprintf(stderr, "vsk: unknown VSK_SIMD value '%s' ignored\n", env);
    }
  }
  g_isa = isa;
  g_ops = (isa == Isa::avx2) ? &avx2_ops() : &scalar_ops();
}

} // namespace

bool cpu_has_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const OpsTable& ops() {
  if (!g_ops) init();
  return *g_ops;
}

Isa active_isa() {
  if (!g_ops) init();
  return g_isa;
}

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && !cpu_has_avx2()) {
    std::fprintf(stderr, "vsk: force_isa(avx2) on a CPU without AVX2+FMA, keeping scalar\n");
    isa = Isa::scalar;
  }
  g_isa = isa;
  g_ops = (isa == Isa::avx2) ? &avx2_ops() : &scalar_ops();
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

} // namespace vsk::simd
