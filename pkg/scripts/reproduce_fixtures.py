"""Run every registered scenario and print a per-scenario fixture summary.

Usage: python scripts/reproduce_fixtures.py [--tol 1e-10] [--json out.json]
"""
import argparse
import json
import sys

from weakreal._jsonio import dumps
from weakreal.scenarios import REGISTRY, run_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tol", type=float, default=None)
    ap.add_argument("--json", help="write all reports to this file")
    args = ap.parse_args()

    reports = {}
    failed = 0
    for name in REGISTRY:
        rep = run_scenario(name, tol=args.tol)
        reports[name] = rep
        stated = sum(c.provenance == "stated" for c in rep.checks)
        bad = rep.failures()
        failed += bool(bad)
        print(f"{'PASS' if rep.passed else 'FAIL'} {name:22s} checks={len(rep.checks):3d} "
              f"stated={stated:3d} notes={len(rep.notes)}")
        for c in bad:
            print(f"    {c.key}: expected {c.expected}, got {c.actual}")
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(dumps({k: r.to_json() for k, r in reports.items()}))
            fh.write("\n")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
