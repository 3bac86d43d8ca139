from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakreal.paradox import (
    certify_paradox,
    detect_paradox,
    find_certainties,
    key_nbox,
    split_weak_value,
)


@pytest.mark.parametrize("n", range(3, 13))
def test_key_nbox_certifies(n):
    key = key_nbox(n)
    assert sum(key.weak_values) == 1
    assert all(isinstance(x, Fraction) for x in key.weak_values)
    cert = detect_paradox(key.weak_values)
    assert cert is not None
    sup = [set(a.support) for a in cert.witness]
    assert not set.intersection(*sup)


def test_key_nbox_needs_three():
    with pytest.raises(ValueError):
        key_nbox(2)


def test_three_box_certificate_supports():
    cert = detect_paradox([1, 1, -1])
    assert [a.support for a in cert.witness] == [(0,), (1,)]
    assert all(a.abl_prob == 1 for a in cert.witness)
    assert cert.to_json(["1", "2", "3"])["assertions"][0]["basis"] == [["1"], ["2", "3"]]


def test_four_box_needs_three_assertions():
    half = Fraction(1, 2)
    cert = detect_paradox([half, half, half, -half])
    assert len(cert.witness) == 3


def test_no_certificate_for_uniform():
    assert detect_paradox([0.5, 0.5]) is None
    assert find_certainties([0.5, 0.5]) == []


def test_sum_checked():
    with pytest.raises(ValueError):
        find_certainties([1, 1])


def test_scan_limit():
    wv = [Fraction(1, 25)] * 25
    with pytest.raises(ValueError, match="drop_zeros"):
        find_certainties(wv)
    padded = [1, 1, -1] + [0] * 30
    assert detect_paradox(padded, drop_zeros=True) is not None


def test_split_weak_value():
    s = split_weak_value([1, 1, -1], 0, [Fraction(1, 2), Fraction(1, 2)])
    assert s == (Fraction(1, 2), Fraction(1, 2), 1, -1)
    assert detect_paradox(s) is not None
    with pytest.raises(ValueError):
        split_weak_value([1, 1, -1], 0, [1, 1])
    assert split_weak_value([0.5 + 0.5j, 0.5 - 0.5j], 1, [0.5, -0.5j])[2] == -0.5j


_small = st.fractions(min_value=-2, max_value=2, max_denominator=4)


@st.composite
def rational_vectors(draw, max_len=7):
    head = draw(st.lists(st.one_of(st.just(Fraction(0)), _small), min_size=1, max_size=max_len - 1))
    return head + [1 - sum(head)]


@given(rational_vectors())
@settings(max_examples=300)
def test_certificate_is_sound_and_minimal(wv):
    cert = detect_paradox(wv)
    certs = find_certainties(wv)
    for a in certs:
        assert sum(Fraction(wv[i]) for i in a.support) == 1
        assert sorted(a.support + a.complement) == list(range(len(wv)))
    if cert is None:
        if len(certs) >= 2:
            assert set.intersection(*(set(a.support) for a in certs))
        return
    sup = [set(a.support) for a in cert.witness]
    assert not set.intersection(*sup)
    # no smaller subset of the assertions conflicts
    all_sup = [set(a.support) for a in cert.assertions]
    for k in range(2, len(sup)):
        for combo in combinations(all_sup, k):
            assert set.intersection(*combo)


@given(rational_vectors())
@settings(max_examples=300)
def test_drop_zeros_preserves_detection(wv):
    assert (detect_paradox(wv) is None) == (detect_paradox(wv, drop_zeros=True) is None)


@given(st.lists(st.floats(0, 1), min_size=2, max_size=10), st.integers(0, 9))
@settings(max_examples=300)
def test_probability_vectors_never_certify(raw, zeros):
    x = np.array(raw)
    x[: min(zeros, len(x) - 1)] = 0
    if x.sum() == 0:
        x[-1] = 1
    x = x / x.sum()
    assert detect_paradox(x.tolist()) is None


def test_certify_needs_two():
    assert certify_paradox([]) is None
