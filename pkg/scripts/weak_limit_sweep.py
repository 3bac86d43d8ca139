"""Weak-coupling sweep: pointer shifts against d Re A_w and d Im A_w / eps^2.

For each case the error in <x> should fall about 100x per decade of d/eps.
"""
import argparse

import numpy as np

from weakreal.scenarios import get_scenario
from weakreal.pointer import weak_limit_check

CASES = [
    ("quantum_mirror", "phi1", "I", {}),
    ("quantum_mirror", "phi1", "II", {}),
    ("quantum_mirror", "phi2", "I", {}),
    ("pigeonhole", "pps", "L", {"n": 1}),
    ("three_box", "pps", "3", {}),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=float, default=1.0)
    ap.add_argument("--strengths", type=float, nargs="+", default=[1e-1, 1e-2, 1e-3, 1e-4])
    args = ap.parse_args()

    for scen, sl_name, label, params in CASES:
        sc = get_scenario(scen)
        sl = sc.build(sc.resolve(params)).slices[sl_name]
        basis = sl.bases["fine"].projectors
        op = basis[[p.label for p in basis].index(label)]
        rep = weak_limit_check(sl.pps, op, d=args.d, strengths=args.strengths)
        aw = rep.weak_value
        print(f"{scen}/{sl_name} {label}: A_w = {aw.real:+.6f}{aw.imag:+.6f}i  "
              f"second order x={rep.second_order('error_x')} p={rep.second_order('error_p')}")
        print(f"  {'d/eps':>8s} {'<x>':>14s} {'err_x':>11s} {'<p>':>14s} {'err_p':>11s}")
        for pt in rep.points:
            print(f"  {pt.strength:8.0e} {pt.mean_x:14.9f} {pt.error_x:11.3e} "
                  f"{pt.mean_p:14.6e} {pt.error_p:11.3e}")
        r = rep.ratios()
        if r:
            print("  error ratio per decade:", " ".join(f"{x:.1f}" for x in r if np.isfinite(x)))


if __name__ == "__main__":
    main()
