#!/usr/bin/env python3
"""Regenerate acetone_standin.csv, a synthetic density table rho(T, p).

The surface mimics the qualitative shape of acetone's density: a gas branch
(ideal-gas law, molar mass 58.08 g/mol), a liquid branch with a linear thermal
expansion fit, a vapor-pressure curve exp(15.506 - 3582/T) kPa separating the
two below the critical point (Tc = 508 K, pc = 4700 kPa; the constants are
chosen so the curve passes through it), and a sigmoid crossover above Tc that
widens with temperature. None of this is measured data; it is a reproducible
stand-in with the same feature that matters for interpolation tests: a density
jump across a curved phase boundary.

Records form a regular 200x200 table over T in [300, 550] K, p in
[100, 5000] kPa, the layout property tables actually ship in. The grid must be
dense: queries snap to the nearest record, so the cell size sets a floor on
how accurately any method can resolve the phase boundary.
"""

import math
import os

TC = 508.0    # K
PC = 4700.0   # kPa
T_LO, T_HI = 300.0, 550.0
P_LO, P_HI = 100.0, 5000.0
SIDE = 200


def p_sat(t: float) -> float:
    return math.exp(15.506 - 3582.0 / t)


def rho(t: float, p: float) -> float:
    rho_gas = 6.985 * p / t
    rho_liq = max(820.0 - 1.1 * (t - 250.0), 250.0)
    if t < TC:
        return rho_liq if p >= p_sat(t) else rho_gas
    width = 60.0 + 8.0 * (t - TC)
    s = 1.0 / (1.0 + math.exp(-(p - PC) / width))
    return rho_gas + s * (rho_liq - rho_gas)


def main() -> None:
    out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "acetone_standin.csv")
    with open(out, "w") as fh:
        fh.write("T,p,rho\n")
        for i in range(SIDE):
            t = T_LO + (T_HI - T_LO) * i / (SIDE - 1)
            for j in range(SIDE):
                p = P_LO + (P_HI - P_LO) * j / (SIDE - 1)
                fh.write(f"{t:.4f},{p:.4f},{rho(t, p):.6f}\n")
    print(f"wrote {SIDE * SIDE} records to {out}")


if __name__ == "__main__":
    main()
