from fractions import Fraction
from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakreal.ontology.decompose import (
    Configuration,
    Decomposition,
    InfeasibleDecompositionError,
    as_exact,
    decompose,
    verify_decomposition,
)

BOX = 4


def grid(lo, hi, max_den=6):
    vals = {Fraction(n, q) for q in range(1, max_den + 1) for n in range(lo * q, hi * q + 1)}
    return sorted(vals)


def _second_moment(sol):
    return sum(p * sum(x * x for x in c) for p, c in sol)


def _rank_key(sol):
    count = sum(p * sum(abs(x) for x in c) for p, c in sol)
    return count, len(sol), _second_moment(sol)


def oracle_1d(t1, total):
    """Best distribution over (a, total - a), |a|, |total - a| <= BOX, by full enumeration."""
    cands = [a for a in range(-BOX, BOX + 1) if abs(total - a) <= BOX]
    sols = []
    for a in cands:
        if a == t1:
            sols.append([(Fraction(1), (a, total - a))])
    for a, b in combinations(cands, 2):
        p = (t1 - b) / Fraction(a - b)
        if 0 < p < 1:
            sols.append([(p, (a, total - a)), (1 - p, (b, total - b))])
    return min(sols, key=_rank_key)


def oracle_nd(t, total):
    """Best distribution over every configuration in the box (small d).

    Supports of size <= d are screened in floating point, then the
    near-optimal ones are solved exactly.
    """
    d = len(t)
    cands = np.array([c for c in product(range(-BOX, BOX + 1), repeat=d) if sum(c) == total])
    tf = np.array([float(x) for x in t[: d - 1]] + [1.0])
    screened = []
    for k in range(1, d + 1):
        idx = np.array(list(combinations(range(len(cands)), k)))
        a = cands[idx]  # (n, k, d)
        m = np.concatenate([np.swapaxes(a[:, :, : d - 1], 1, 2), np.ones((len(idx), 1, k))], axis=1)
        p = np.array([np.linalg.lstsq(mi, tf, rcond=None)[0] for mi in m])
        resid = np.abs(np.einsum("nij,nj->ni", m, p) - tf).max(axis=1)
        ok = (resid < 1e-9) & (p > 1e-12).all(axis=1)
        counts = (p * np.abs(a).sum(axis=2)).sum(axis=1)
        for row in np.nonzero(ok)[0]:
            screened.append((counts[row], k, idx[row]))
    best_count = min(c for c, _, _ in screened)
    best = None
    for count, k, rows in screened:
        if count > best_count + 1e-9:
            continue
        a = cands[rows]
        mat = np.vstack([a[:, : d - 1].T, np.ones(k, dtype=int)])
        sol = _exact_solve(mat, list(t[: d - 1]) + [Fraction(1)], k)
        if sol is None or any(x <= 0 for x in sol):
            continue
        cand = [(x, tuple(int(v) for v in r)) for x, r in zip(sol, a)]
        if best is None or _rank_key(cand) < _rank_key(best):
            best = cand
    return best


def _exact_solve(m, rhs, k):
    rows = [[Fraction(int(x)) for x in r] + [Fraction(b)] for r, b in zip(m, rhs)]
    n = len(rows)
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if piv is None:
            return None
        rows[r], rows[piv] = rows[piv], rows[r]
        rows[r] = [x / rows[r][c] for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    if any(rows[i][k] != 0 for i in range(r, n)):
        return None
    return [rows[i][k] for i in range(k)]


def _real_solution(dec, part="real"):
    return [(p, getattr(c, part)) for p, c in dec.support]


@pytest.mark.parametrize("total,lo,hi", [(1, -1, 2), (0, -2, 2)])
def test_solver_matches_enumeration_two_states(total, lo, hi):
    for t1 in grid(lo, hi):
        t = [t1, total - t1]
        if max(abs(x) for x in t) > 2:
            continue
        dec = decompose(t)
        assert dec.exhaustive
        assert verify_decomposition(dec, t)
        ours = _real_solution(dec)
        best = oracle_1d(t1, total)
        assert _rank_key(ours) == _rank_key(best), t
        assert sorted(ours) == sorted((p, c) for p, c in best)


def test_solver_matches_enumeration_imaginary_two_states():
    for t1 in grid(-2, 2):
        t = [(0, t1), (0, -t1)]
        dec = decompose(t)
        assert verify_decomposition(dec, t)
        best = oracle_1d(t1, 0)
        assert _rank_key(_real_solution(dec, "imag")) == _rank_key(best)


def test_complex_count_is_sum_of_parts():
    rng = np.random.default_rng(7)
    res = grid(-1, 2)
    ims = grid(-2, 2)
    for _ in range(60):
        a = res[rng.integers(len(res))]
        b = ims[rng.integers(len(ims))]
        t = [(a, b), (1 - a, -b)]
        dec = decompose(t)
        assert verify_decomposition(dec, t)
        re_best, im_best = oracle_1d(a, 1), oracle_1d(b, 0)
        assert dec.expected_count() == _rank_key(re_best)[0] + _rank_key(im_best)[0]
        assert len(dec) <= len(re_best) + len(im_best) - 1


def test_solver_matches_enumeration_three_states():
    rng = np.random.default_rng(11)
    vals = grid(-2, 2)
    done = 0
    while done < 12:
        t1, t2 = vals[rng.integers(len(vals))], vals[rng.integers(len(vals))]
        t3 = 1 - t1 - t2
        if abs(t3) > 2:
            continue
        t = [t1, t2, t3]
        dec = decompose(t)
        assert verify_decomposition(dec, t)
        best = oracle_nd(t, 1)
        ours = _real_solution(dec)
        assert _rank_key(ours)[:2] == _rank_key(best)[:2], t
        assert _rank_key(ours)[2] <= _rank_key(best)[2]
        done += 1


def test_count_is_l1_norm():
    for t in ([Fraction(4, 3), Fraction(-1, 3)], [Fraction(2, 3), Fraction(2, 3), Fraction(-1, 3)]):
        assert decompose(t).expected_count() == sum(abs(x) for x in t)


def test_two_level_fixtures():
    dec = decompose([Fraction(4, 3), Fraction(-1, 3)])
    assert sorted(_real_solution(dec)) == [(Fraction(1, 3), (2, -1)), (Fraction(2, 3), (1, 0))]
    dec = decompose([(0, Fraction(3, 2)), (0, Fraction(-3, 2))])
    assert sorted(_real_solution(dec, "imag")) == [(Fraction(1, 2), (1, -1)), (Fraction(1, 2), (2, -2))]


def test_support_outside_floor_ceil_box():
    # (0, 1, 0) and (2, 0, -1) are not componentwise floor/ceil roundings of the target
    dec = decompose([Fraction(2, 3), Fraction(2, 3), Fraction(-1, 3)])
    assert len(dec) == 2
    assert {c.real for c in dec.configurations} == {(0, 1, 0), (2, 0, -1)}


def test_conservation_optional():
    dec = decompose([Fraction(1, 2), Fraction(1, 2)], conserve=False)
    assert verify_decomposition(dec, [Fraction(1, 2)] * 2)
    assert dec.expected_count() == 1


def test_rejects_irrational_target():
    with pytest.raises(ValueError):
        decompose([2**0.5, 1 - 2**0.5])


def test_rejects_non_integer_total():
    with pytest.raises((ValueError, InfeasibleDecompositionError)):
        decompose([Fraction(1, 2), Fraction(1, 3)])


def test_verify_rejects_bad_distributions():
    cfg = Configuration.from_counts([1, 0])
    assert not verify_decomposition(Decomposition(((Fraction(1, 2), cfg),)), [1, 0])
    assert not verify_decomposition(Decomposition(((Fraction(1), cfg),)), [0, 1])
    assert not verify_decomposition(Decomposition(((Fraction(3, 2), cfg), (Fraction(-1, 2), cfg))), [1, 0])
    assert verify_decomposition(Decomposition(((1.0, cfg),)), [1.0, 0.0])


def test_configuration_checks():
    with pytest.raises(ValueError):
        Configuration.from_counts([0.5, 0.5])
    c = Configuration.from_counts([1 + 1j, (0, -1)])
    assert c.total() == 3 and c.counts == (1 + 1j, -1j)


def test_as_exact():
    assert as_exact(0.5) == (Fraction(1, 2), 0)
    assert as_exact(1 / 3 + 0.25j) == (Fraction(1, 3), Fraction(1, 4))
    assert as_exact(2**0.5) is None


@given(st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=6), min_size=1, max_size=3))
@settings(max_examples=60)
def test_decomposition_is_valid(head):
    t = head + [1 - sum(head)]
    dec = decompose(t)
    assert verify_decomposition(dec, t)
    assert all(c.total() >= 1 for c in dec.configurations)
    assert all(sum(c.real) == 1 and sum(c.imag) == 0 for c in dec.configurations)
    assert dec.expected_count() == sum(abs(x) for x in t)
