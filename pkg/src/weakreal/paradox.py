"""PPS paradoxes: key N-box vectors, splitting, certainty scan, certificates.

A certainty is a dichotomic coarse-graining (S, rest) of the fine basis
whose weak values are exactly 1 and 0; the ABL rule then gives S with
probability 1. A paradox is a set of certainties whose supports have
empty intersection.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from numbers import Rational
from typing import Sequence

import numpy as np

from .hilbert import Projector

CERTAINTY_TOL = 1e-10
MAX_SCAN_DIM = 20
# cap on subsets examined when searching for a minimum-size conflict
_MIN_CONFLICT_BUDGET = 200_000


@dataclass(frozen=True)
class KeyParadox:
    n_boxes: int
    weak_values: tuple[Fraction, ...]


def key_nbox(n: int) -> KeyParadox:
    """(1, ..., 1, -1)/(n - 2), exactly."""
    if n < 3:
        raise ValueError(f"key N-box paradoxes need N >= 3, got {n}")
    k = Fraction(1, n - 2)
    return KeyParadox(n, tuple([k] * (n - 1) + [-k]))


def split_weak_value(wv: Sequence, index: int, parts: Sequence) -> tuple:
    """Replace ``wv[index]`` by ``parts``, which must sum to it.

    Exact when everything is rational; otherwise a 1e-12 tolerance applies.
    """
    wv, parts = list(wv), list(parts)
    if not 0 <= index < len(wv):
        raise IndexError(f"index {index} out of range")
    if not parts:
        raise ValueError("no parts given")
    if _all_rational(parts + [wv[index]]):
        ok = sum(Fraction(p) for p in parts) == Fraction(wv[index])
    else:
        ok = abs(sum(complex(p) for p in parts) - complex(wv[index])) < 1e-12
    if not ok:
        raise ValueError(f"parts {parts} do not sum to {wv[index]}")
    return tuple(wv[:index] + parts + wv[index + 1:])


@dataclass(frozen=True)
class CertaintyAssertion:
    """Outcome ``support`` is certain in the dichotomic basis (support, complement)."""

    support: tuple[int, ...]
    complement: tuple[int, ...]
    abl_prob: float = 1.0

    @property
    def basis(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.support, self.complement

    def projector(self, dim: int) -> Projector:
        return Projector(dim, support=self.support, label="+".join(str(i + 1) for i in self.support))


@dataclass(frozen=True)
class ParadoxCertificate:
    assertions: tuple[CertaintyAssertion, ...]
    conflict: tuple[int, ...]  # indices into ``assertions``; their supports share no index

    @property
    def witness(self) -> tuple[CertaintyAssertion, ...]:
        return tuple(self.assertions[i] for i in self.conflict)

    def to_json(self, labels: Sequence[str] | None = None) -> dict:
        def name(i):
            return labels[i] if labels is not None else str(i + 1)

        return {
            "assertions": [
                {"support": [name(i) for i in a.support],
                 "basis": [[name(i) for i in a.support], [name(i) for i in a.complement]]}
                for a in self.assertions
            ],
            "conflict": list(self.conflict),
        }


def _all_rational(xs) -> bool:
    return all(isinstance(x, Rational) for x in xs)


def find_certainties(
    wv: Sequence,
    *,
    max_dim: int = MAX_SCAN_DIM,
    drop_zeros: bool = False,
    tol: float = CERTAINTY_TOL,
) -> list[CertaintyAssertion]:
    """All diagonal dichotomic coarse-grainings with weak values exactly (1, 0).

    Scans the 2**(d-1) bipartitions of the fine basis. With ``drop_zeros``
    the scan runs over the entries with nonzero weak value only; zero
    entries can join either side freely, so the certainties found are the
    minimal ones and paradox detection is unaffected.
    """
    wv = list(wv)
    exact = _all_rational(wv)
    vals = np.array([complex(x) for x in wv])
    if abs(vals.sum() - 1) > tol:
        raise ValueError(f"weak values sum to {vals.sum()}, not 1")
    idx = np.arange(len(wv))
    if drop_zeros:
        keep = np.abs(vals) > tol if not exact else np.array([x != 0 for x in wv], dtype=bool)
        idx = idx[keep]
    d = len(idx)
    if d > max_dim:
        raise ValueError(
            f"bipartition scan limited to {max_dim} entries, got {d}"
            + ("" if drop_zeros else " (try drop_zeros=True)")
        )
    if d < 2:
        return []
    sub = vals[idx]
    masks = np.arange(1, 2 ** (d - 1), dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(d)) & 1).astype(bool)
    sums = bits.astype(float) @ sub
    loose = 1e-6 if exact else tol
    hit_s = np.abs(sums - 1) < loose
    hit_c = np.abs(sums) < loose
    everything = set(range(len(wv)))
    found = []
    for row in np.nonzero(hit_s | hit_c)[0]:
        in_s = tuple(int(i) for i in idx[bits[row]])
        in_c = tuple(int(i) for i in idx[~bits[row]])
        for side, hit in ((in_s, hit_s[row]), (in_c, hit_c[row])):
            if not hit:
                continue
            if exact and sum(Fraction(wv[i]) for i in side) != 1:
                continue
            comp = tuple(sorted(everything - set(side)))
            found.append(CertaintyAssertion(side, comp, _dichotomic_abl(vals, side, comp)))
    return found


def _dichotomic_abl(vals: np.ndarray, side, comp) -> float:
    a = abs(vals[list(side)].sum()) ** 2
    b = abs(vals[list(comp)].sum()) ** 2 if comp else 0.0
    return float(a / (a + b))


def certify_paradox(assertions: Sequence[CertaintyAssertion]) -> ParadoxCertificate | None:
    """Certificate iff the asserted supports have empty common intersection.

    The reported conflict is a smallest conflicting subset when that search
    is affordable, otherwise an irreducible one found by greedy removal.
    """
    assertions = tuple(assertions)
    if len(assertions) < 2:
        return None
    supports = [frozenset(a.support) for a in assertions]
    if frozenset.intersection(*supports):
        return None
    n = len(supports)
    budget = _MIN_CONFLICT_BUDGET
    for k in range(2, n + 1):
        for combo in combinations(range(n), k):
            budget -= 1
            if budget < 0:
                return ParadoxCertificate(assertions, _greedy_conflict(supports))
            if not frozenset.intersection(*(supports[i] for i in combo)):
                return ParadoxCertificate(assertions, combo)
    raise AssertionError("unreachable: full set conflicts")


def _greedy_conflict(supports: list[frozenset]) -> tuple[int, ...]:
    chosen = list(range(len(supports)))
    for i in list(chosen):
        trial = [j for j in chosen if j != i]
        if len(trial) >= 2 and not frozenset.intersection(*(supports[j] for j in trial)):
            chosen = trial
    return tuple(chosen)


def detect_paradox(wv: Sequence, **kwargs) -> ParadoxCertificate | None:
    return certify_paradox(find_certainties(wv, **kwargs))
