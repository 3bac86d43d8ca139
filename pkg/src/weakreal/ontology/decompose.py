"""Integer counterparticle configurations whose average is a weak-value vector.

Real and imaginary parts are solved independently. For a real target t
every decomposition has expected count >= ||t||_1, with equality exactly
when each configuration agrees in sign with t entrywise (zero where t is
zero). The solver therefore searches that orthant only, by increasing
support size, and the optimum count is always ||t||_1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, islice, product
from numbers import Rational
from typing import Sequence

import numpy as np

EXACT_TOL = 1e-12
# limits on the exhaustive minimal-support search
MAX_CANDIDATES = 4000
MAX_SUBSETS = 1_500_000
_CHUNK = 50_000


class InfeasibleDecompositionError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Configuration:
    """Net counterparticle numbers per basis state: real part, imaginary part."""

    real: tuple[int, ...]
    imag: tuple[int, ...]

    def __post_init__(self):
        if len(self.real) != len(self.imag):
            raise ValueError("real and imaginary parts differ in length")
        for x in self.real + self.imag:
            if int(x) != x:
                raise ValueError(f"counts must be integers, got {x}")
        object.__setattr__(self, "real", tuple(int(x) for x in self.real))
        object.__setattr__(self, "imag", tuple(int(x) for x in self.imag))

    @classmethod
    def from_counts(cls, counts: Sequence) -> "Configuration":
        """From Gaussian integers given as complex numbers or (re, im) pairs."""
        re, im = [], []
        for c in counts:
            if isinstance(c, (tuple, list)):
                a, b = c
            else:
                a, b = complex(c).real, complex(c).imag
            if a != int(a) or b != int(b):
                raise ValueError(f"{c} is not a Gaussian integer")
            re.append(int(a))
            im.append(int(b))
        return cls(tuple(re), tuple(im))

    @property
    def counts(self) -> tuple[complex, ...]:
        return tuple(complex(a, b) for a, b in zip(self.real, self.imag))

    def __len__(self):
        return len(self.real)

    def total(self) -> int:
        """Number of counterparticles present, of any type."""
        return sum(abs(a) + abs(b) for a, b in zip(self.real, self.imag))

    def to_json(self) -> list:
        return [[a, b] for a, b in zip(self.real, self.imag)]


@dataclass(frozen=True)
class Decomposition:
    """Probability distribution over configurations.

    ``exhaustive`` is False when the minimal-support search was cut short
    and a feasible count-optimal fallback was used instead.
    """

    support: tuple[tuple, ...]  # (probability, Configuration) pairs
    exhaustive: bool = True

    def __post_init__(self):
        object.__setattr__(self, "support", tuple((p, c) for p, c in self.support))

    def __len__(self):
        return len(self.support)

    @property
    def probabilities(self) -> list:
        return [p for p, _ in self.support]

    @property
    def configurations(self) -> list[Configuration]:
        return [c for _, c in self.support]

    def expectation(self) -> list[complex]:
        d = len(self.support[0][1])
        out = [0j] * d
        for p, c in self.support:
            for i, x in enumerate(c.counts):
                out[i] += complex(p) * x
        return out

    def exact_expectation(self) -> list[tuple[Fraction, Fraction]] | None:
        if not all(isinstance(p, Rational) for p in self.probabilities):
            return None
        d = len(self.support[0][1])
        re = [Fraction(0)] * d
        im = [Fraction(0)] * d
        for p, c in self.support:
            for i in range(d):
                re[i] += p * c.real[i]
                im[i] += p * c.imag[i]
        return list(zip(re, im))

    def expected_count(self):
        return sum(p * c.total() for p, c in self.support)

    def to_json(self) -> dict:
        def prob(p):
            if isinstance(p, Rational):
                return [int(Fraction(p).numerator), int(Fraction(p).denominator)]
            return float(p)

        return {
            "distribution": [
                {"probability": prob(p), "configuration": c.to_json()} for p, c in self.support
            ],
            "expected_count": prob(self.expected_count()),
            "exhaustive": self.exhaustive,
        }


def as_exact(x, tol: float = EXACT_TOL) -> tuple[Fraction, Fraction] | None:
    """(re, im) as Fractions, or None when ``x`` is not close to a small rational."""
    if isinstance(x, tuple) and len(x) == 2:
        return Fraction(x[0]), Fraction(x[1])
    if isinstance(x, Rational):
        return Fraction(x), Fraction(0)
    z = complex(x)
    parts = []
    for v in (z.real, z.imag):
        f = Fraction(v).limit_denominator(10**6)
        if abs(float(f) - v) > tol:
            return None
        parts.append(f)
    return parts[0], parts[1]


def verify_decomposition(dec: Decomposition, target: Sequence, tol: float = EXACT_TOL) -> bool:
    """Probabilities form a distribution and the mean configuration equals ``target``.

    Exact when both sides are rational, otherwise within ``tol``.
    """
    if not dec.support:
        return False
    probs = dec.probabilities
    if any(complex(p).imag != 0 or float(p) < 0 or float(p) > 1 for p in probs):
        return False
    if any(len(c) != len(target) for c in dec.configurations):
        return False
    exact_target = [t if isinstance(t, tuple) else as_exact(t, tol=0.0) for t in target]
    exact_mean = dec.exact_expectation()
    if exact_mean is not None and all(t is not None for t in exact_target):
        return sum(probs) == 1 and exact_mean == [tuple(map(Fraction, t)) for t in exact_target]
    if abs(sum(float(p) for p in probs) - 1) > tol:
        return False
    tgt = [complex(float(t[0]), float(t[1])) if isinstance(t, tuple) else complex(t) for t in target]
    return all(abs(a - b) <= tol for a, b in zip(dec.expectation(), tgt))


def decompose(target: Sequence, bound: int = 2, conserve: bool = True) -> Decomposition:
    """Count-minimal integer decomposition of a weak-value vector.

    Ties on expected count are broken by fewest configurations, then by
    smallest mean squared count, then by configuration order. With
    ``conserve`` every configuration carries the target's total (1 for the
    real part and 0 for the imaginary part of a complete projector family).
    """
    exact = [as_exact(t) for t in target]
    if any(e is None for e in exact):
        raise ValueError("decompose needs rational targets (within 1e-12)")
    if not exact:
        raise ValueError("empty target")
    re = [e[0] for e in exact]
    im = [e[1] for e in exact]
    re_atoms, re_ok = _solve_real(re, bound, conserve)
    im_atoms, im_ok = _solve_real(im, bound, conserve)
    support = [
        (p, Configuration(a, b)) for p, a, b in _couple(re_atoms, im_atoms)
    ]
    return Decomposition(tuple(support), re_ok and im_ok)


def _couple(a: list, b: list) -> list:
    """North-west-corner coupling of two distributions, both in configuration order."""
    a = [[p, c] for p, c in a]
    b = [[p, c] for p, c in b]
    out, i, j = [], 0, 0
    while i < len(a) and j < len(b):
        m = min(a[i][0], b[j][0])
        out.append((m, a[i][1], b[j][1]))
        a[i][0] -= m
        b[j][0] -= m
        if a[i][0] == 0:
            i += 1
        if b[j][0] == 0:
            j += 1
    return out


def _solve_real(t: list[Fraction], bound: int, conserve: bool) -> tuple[list, bool]:
    total = sum(t)
    if conserve and total.denominator != 1:
        raise InfeasibleDecompositionError(
            f"target sums to {total}, which no integer configuration can carry"
        )
    if all(x.denominator == 1 for x in t):
        return [(Fraction(1), tuple(int(x) for x in t))], True
    cap = math.ceil(max(abs(x) for x in t)) + bound
    cands = _orthant_candidates(t, cap, int(total) if conserve else None)
    if cands is not None:
        if len(cands) == 0:
            raise InfeasibleDecompositionError(f"no configuration within bound {bound}; try a larger bound")
        found = _min_support(t, cands)
        if found is not None:
            return found, True
    return _systematic(t), False


def _orthant_candidates(t: list[Fraction], cap: int, total: int | None) -> np.ndarray | None:
    ranges = []
    for x in t:
        if x > 0:
            ranges.append(range(0, cap + 1))
        elif x < 0:
            ranges.append(range(-cap, 1))
        else:
            ranges.append(range(0, 1))
    size = math.prod(len(r) for r in ranges)
    if size > 50 * MAX_CANDIDATES:
        return None
    grid = np.array(list(product(*ranges)), dtype=np.int64).reshape(-1, len(t))
    if total is not None:
        grid = grid[grid.sum(axis=1) == total]
    if len(grid) > MAX_CANDIDATES:
        return None
    return grid


def _min_support(t: list[Fraction], cands: np.ndarray) -> list | None:
    d = len(t)
    tf = np.array([float(x) for x in t])
    n = len(cands)
    used = 0
    for k in range(1, min(d + 1, n) + 1):
        if used + math.comb(n, k) > MAX_SUBSETS:
            return None
        used += math.comb(n, k)
        hits = []
        it = combinations(range(n), k)
        while True:
            chunk = np.array(list(islice(it, _CHUNK)), dtype=np.int64)
            if chunk.size == 0:
                break
            hits.extend(_feasible(chunk, cands, tf))
        best = None
        for combo in hits:
            sol = _exact_weights([tuple(int(v) for v in cands[i]) for i in combo], t)
            if sol is None:
                continue
            key = (sum(p * sum(c * c for c in cfg) for p, cfg in sol), sorted(cfg for _, cfg in sol))
            if best is None or key < best[0]:
                best = (key, sol)
        if best is not None:
            return sorted(best[1], key=lambda pc: pc[1])
    return None


def _feasible(chunk: np.ndarray, cands: np.ndarray, tf: np.ndarray) -> list[tuple[int, ...]]:
    """Subsets whose configurations have t in their convex hull (float screen)."""
    m, k = chunk.shape
    cols = cands[chunk].astype(float)  # (m, k, d)
    a = np.concatenate([cols, np.ones((m, k, 1))], axis=2).transpose(0, 2, 1)  # (m, d+1, k)
    b = np.append(tf, 1.0)
    ata = a.transpose(0, 2, 1) @ a
    det = np.linalg.det(ata)
    ok = np.abs(det) > 1e-9
    if not ok.any():
        return []
    a, ata = a[ok], ata[ok]
    atb = a.transpose(0, 2, 1) @ b
    p = np.linalg.solve(ata, atb[..., None])[..., 0]
    resid = np.abs((a @ p[..., None])[..., 0] - b).max(axis=1)
    good = (resid < 1e-9) & (p > 1e-12).all(axis=1)
    return [tuple(r) for r in chunk[ok][good]]


def _exact_weights(cfgs: list[tuple[int, ...]], t: list[Fraction]) -> list | None:
    """Solve sum_j p_j cfg_j = t, sum p_j = 1 exactly; None unless p_j > 0."""
    k = len(cfgs)
    rows = [[Fraction(c[i]) for c in cfgs] + [t[i]] for i in range(len(t))]
    rows.append([Fraction(1)] * k + [Fraction(1)])
    p = _rref_solve(rows, k)
    if p is None or any(x <= 0 for x in p):
        return None
    return list(zip(p, cfgs))


def _rref_solve(rows: list[list[Fraction]], k: int) -> list[Fraction] | None:
    rows = [r[:] for r in rows]
    piv_row = 0
    pivots = []
    for col in range(k):
        r = next((i for i in range(piv_row, len(rows)) if rows[i][col] != 0), None)
        if r is None:
            return None
        rows[piv_row], rows[r] = rows[r], rows[piv_row]
        pv = rows[piv_row][col]
        rows[piv_row] = [x / pv for x in rows[piv_row]]
        for i in range(len(rows)):
            if i != piv_row and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[piv_row])]
        pivots.append(col)
        piv_row += 1
    if any(r[k] != 0 for r in rows[piv_row:]):
        return None
    return [rows[i][k] for i in range(k)]


def _systematic(t: list[Fraction]) -> list:
    """Floor/ceil rounding by systematic sampling of the fractional parts.

    Every configuration rounds each entry to a neighbouring integer, so it
    agrees in sign with t and the expected count is ||t||_1. At most d
    distinct configurations occur.
    """
    floors = [math.floor(x) for x in t]
    frac = [x - f for x, f in zip(t, floors)]
    cum = [Fraction(0)]
    for f in frac:
        cum.append(cum[-1] + f)
    # the configuration only changes where u crosses a cumulative fractional point
    cuts = sorted({c - math.floor(c) for c in cum} | {Fraction(0)})
    cuts.append(Fraction(1))
    atoms: dict[tuple[int, ...], Fraction] = {}
    for lo, hi in zip(cuts, cuts[1:]):
        if hi == lo:
            continue
        u = (lo + hi) / 2
        cfg = tuple(
            fl + (math.floor(cum[i + 1] - u) - math.floor(cum[i] - u))
            for i, fl in enumerate(floors)
        )
        atoms[cfg] = atoms.get(cfg, Fraction(0)) + (hi - lo)
    return sorted(((p, c) for c, p in atoms.items()), key=lambda pc: pc[1])

