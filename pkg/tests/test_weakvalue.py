import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from weakreal.hilbert import Ket, Projector, basis_projectors, ket, embed, SIGMA_Z
from weakreal.weakvalue import (
    OrthogonalPPSError,
    PPSPair,
    abl_probabilities,
    abl_probability,
    conditional_expectation,
    evolve_pps,
    projector_weak_values,
    propagate,
    synthesize_pps,
    upside_down,
    weak_value,
)
from weakreal.scenarios import tunneling

from conftest import box_space, pps_pairs, random_hermitian


@pytest.fixture
def three_box():
    sp = box_space(3)
    return PPSPair(Ket(sp, [1, 1, 1]), Ket(sp, [1, 1, -1]))


def test_three_box_weak_values(three_box):
    rep = projector_weak_values(three_box, basis_projectors(3), "fine")
    assert np.allclose(rep.values, [1, 1, -1])
    assert rep["3"] == pytest.approx(-1)
    assert rep.sum_check == pytest.approx(1)


def test_weak_value_ignores_normalization(three_box):
    sp = three_box.space
    scaled = PPSPair(Ket(sp, 5j * np.ones(3)), Ket(sp, [2, 2, -2]))
    p = Projector(3, support=[2])
    assert weak_value(scaled, p) == pytest.approx(weak_value(three_box, p))


def test_orthogonal_pps_raises():
    sp = box_space(2)
    with pytest.raises(OrthogonalPPSError):
        PPSPair(Ket(sp, [1, 1]), Ket(sp, [1, -1]))


def test_abl_three_box(three_box):
    fine = basis_projectors(3)
    assert np.allclose(abl_probabilities(three_box, fine), [1 / 3] * 3)
    b1 = [Projector(3, support=[0], label="1"), Projector(3, support=[1, 2], label="2+3")]
    assert abl_probability(three_box, "1", b1) == pytest.approx(1)
    assert abl_probability(three_box, b1[1], b1) == pytest.approx(0)


def test_abl_requires_complete_family(three_box):
    with pytest.raises(ValueError):
        abl_probabilities(three_box, basis_projectors(3)[:2])


@given(pps_pairs())
def test_identity_weak_value_is_one(pps):
    assert weak_value(pps, np.eye(pps.dim)) == pytest.approx(1)


@given(pps_pairs())
def test_projector_weak_values_sum_to_one(pps):
    rep = projector_weak_values(pps, basis_projectors(pps.dim))
    assert abs(rep.sum_check - 1) < 1e-10


@given(pps_pairs(), st.integers(0, 2**32 - 1))
def test_weak_value_linear_and_spectral(pps, seed):
    rng = np.random.default_rng(seed)
    a = random_hermitian(rng, pps.dim)
    b = random_hermitian(rng, pps.dim)
    lhs = weak_value(pps, 2 * a - 3 * b)
    assert lhs == pytest.approx(2 * weak_value(pps, a) - 3 * weak_value(pps, b), abs=1e-8)
    # spectral form: A_w = sum_j lambda_j (Pi_j)_w
    w, v = np.linalg.eigh(a)
    parts = sum(lam * weak_value(pps, Projector(pps.dim, vector=v[:, j])) for j, lam in enumerate(w))
    assert weak_value(pps, a) == pytest.approx(parts, abs=1e-8)


@given(pps_pairs(), st.integers(0, 2**32 - 1))
def test_swapped_pps_conjugates(pps, seed):
    a = random_hermitian(np.random.default_rng(seed), pps.dim)
    assert weak_value(pps.swapped(), a) == pytest.approx(np.conj(weak_value(pps, a)), abs=1e-8)


@given(pps_pairs(), st.integers(0, 2**32 - 1))
def test_upside_down_state(pps, seed):
    rho = upside_down(pps)
    m = rho.matrix
    assert np.trace(m) == pytest.approx(1)
    assert np.allclose(m @ m, m, atol=1e-9)
    a = random_hermitian(np.random.default_rng(seed), pps.dim)
    assert rho.weak_value(a) == pytest.approx(weak_value(pps, a), abs=1e-8)


@given(pps_pairs())
def test_abl_is_a_distribution(pps):
    p = abl_probabilities(pps, basis_projectors(pps.dim))
    assert np.all(p >= 0) and p.sum() == pytest.approx(1)
    # direct form |<phi|Pi|psi>|^2 / sum
    amp = np.conj(pps.post.amplitudes) * pps.pre.amplitudes
    assert np.allclose(p, np.abs(amp) ** 2 / np.sum(np.abs(amp) ** 2))


@given(st.integers(0, 2**32 - 1), st.integers(2, 7))
def test_synthesize_roundtrip(seed, d):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=d) + 1j * rng.normal(size=d)
    w[-1] = 1 - w[:-1].sum()
    scale = rng.normal(size=d) + 1j * rng.normal(size=d) + 0.1
    pps = synthesize_pps(w, scale=scale)
    rep = projector_weak_values(pps, basis_projectors(d))
    assert np.allclose(rep.values, w, atol=1e-9)


def test_synthesize_rejects_bad_sum():
    with pytest.raises(ValueError):
        synthesize_pps([1, 1])


def test_conditional_expectation_pigeons():
    one = np.array([1, 1]) / math.sqrt(2)
    post = np.array([1, 1j]) / math.sqrt(2)
    sp = box_space(4)
    pps = PPSPair(Ket(sp, np.kron(one, one)), Ket(sp, np.kron(post, post)))
    zz = embed(SIGMA_Z, 0, [2, 2]) @ embed(SIGMA_Z, 1, [2, 2])
    assert conditional_expectation(pps, zz) == pytest.approx(-1)
    assert conditional_expectation(pps, embed(SIGMA_Z, 0, [2, 2])) == pytest.approx(0)


def test_propagate_retro_evolves_post():
    u = np.array([[0, 1], [1, 0]], dtype=complex)
    pre = ket("q", ["0", "1"], [1, 0])
    post = ket("q", ["0", "1"], [1, 1])
    moved = propagate(PPSPair(pre, post), forward=u, backward=u)
    assert np.allclose(moved.pre.amplitudes, [0, 1])
    assert np.allclose(moved.post.amplitudes, [1, 1])


@pytest.mark.parametrize("t", np.linspace(0, 4, 9))
def test_tunneling_weak_values(t):
    sp = box_space(3)
    base = PPSPair(Ket(sp, [1, math.sqrt(2), 0]), Ket(sp, [1, 0, -1j * math.sqrt(2)]))
    pps = evolve_pps(base, tunneling, t)
    rep = projector_weak_values(pps, basis_projectors(3))
    s = math.sin(math.pi * t / 2)
    assert np.allclose(rep.values, [1, s, -s], atol=1e-12)
