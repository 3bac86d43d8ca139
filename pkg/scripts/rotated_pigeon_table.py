"""Print the nine-row joint table built from the rotated-pigeon per-axis distributions."""
from itertools import product

import numpy as np

from weakreal.ontology.cardinal import cardinal_joint_distribution
from weakreal.scenarios import rotated_axis_distributions


def fmt(z, tol=1e-12):
    z = complex(z)
    re = 0.0 if abs(z.real) < tol else z.real
    im = 0.0 if abs(z.imag) < tol else z.imag
    if im == 0:
        return f"{re:+.4f}"
    return f"{re:+.4f}{im:+.4f}i"


def main():
    table = cardinal_joint_distribution(rotated_axis_distributions())
    cols = ["".join(b) for b in product("+-", repeat=3)]
    print(f"{'prob':>8s}  " + "  ".join(f"{c:>16s}" for c in cols))
    for p, row in zip(table.probabilities, table.cells):
        print(f"{complex(p).real:8.5f}  " + "  ".join(f"{fmt(c):>16s}" for c in row))
    total = sum(complex(p) for p in table.probabilities)
    print(f"sum of probabilities: {total.real:.15f}")
    for axis, name in enumerate("xyz"):
        m = table.marginal(axis)
        print(f"marginal {name}: " + ", ".join(fmt(v) for v in np.asarray(m)))


if __name__ == "__main__":
    main()
