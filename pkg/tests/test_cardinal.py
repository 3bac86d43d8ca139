from itertools import product

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from weakreal.ontology.cardinal import (
    cardinal_basis,
    cardinal_joint_distribution,
    gell_mann,
    gram,
    pauli_products,
    weak_vector,
)
from weakreal.ontology.decompose import verify_decomposition
from weakreal.scenarios import ROTATED_PIGEON_TABLE, get_scenario, rotated_axis_distributions
from weakreal.weakvalue import upside_down, weak_value

from conftest import random_pps


@pytest.mark.parametrize("d", range(2, 9))
def test_gell_mann_orthogonal_traceless(d):
    mats = gell_mann(d)
    assert len(mats) == d * d - 1
    assert np.allclose(gram(mats), 2 * np.eye(d * d - 1))
    for m in mats:
        assert abs(np.trace(m)) < 1e-12
        assert np.allclose(m, m.conj().T)


def test_gell_mann_small_cases():
    x, y, z = gell_mann(2)
    assert np.allclose(x, [[0, 1], [1, 0]]) and np.allclose(y, [[0, -1j], [1j, 0]]) and np.allclose(z, [[1, 0], [0, -1]])
    lam = gell_mann(3)
    assert np.allclose(lam[7], np.diag([1, 1, -2]) / np.sqrt(3))
    assert np.allclose(lam[3], [[0, 0, 1], [0, 0, 0], [1, 0, 0]])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_pauli_products(n):
    labels, mats = pauli_products(n)
    assert len(mats) == 4**n - 1 and "I" * n not in labels
    assert np.allclose(gram(mats), 2 * np.eye(len(mats)))


def test_basis_mode_errors():
    with pytest.raises(ValueError):
        cardinal_basis(3, "pauli_product")
    with pytest.raises(ValueError):
        cardinal_basis(2, "spin")
    with pytest.raises(ValueError):
        gell_mann(1)


@pytest.mark.parametrize("d,mode", [(2, "gell_mann"), (3, "gell_mann"), (4, "gell_mann"), (8, "gell_mann"),
                                    (4, "pauli_product"), (8, "pauli_product")])
@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=100)
def test_reconstruction_and_directional(d, mode, seed):
    rng = np.random.default_rng(seed)
    pps = random_pps(rng, d)
    rep = weak_vector(pps, mode)
    assert np.allclose(rep.reconstruct(), upside_down(pps).matrix, atol=1e-9)
    n = rng.normal(size=len(rep.labels))
    n /= np.linalg.norm(n)
    g_n = sum(c * g for c, g in zip(n, rep.operator_basis))
    assert rep.directional(n) == pytest.approx(weak_value(pps, g_n), abs=1e-9)


def test_pigeon_weak_vectors():
    sc = get_scenario("cardinal_pigeon")
    data = sc.build(sc.resolve({}))
    w = weak_vector(data.slices["original"].pps).weak_vector
    assert np.allclose(w, [1, 1, 1j])
    w = weak_vector(data.slices["rotated"].pps).weak_vector
    r = 1 / np.sqrt(2)
    assert np.allclose(w, [1, (1 - 1j) * r, (1 + 1j) * r])


def _sympy_axes():
    s2, i = sp.sqrt(2), sp.I
    half = sp.Rational(1, 2)
    x = [(sp.Integer(1), [1, 0])]
    y = [(1 / (2 * s2), [1 - i, i]), (half, [1, 0]), (half - 1 / (2 * s2), [0, 1])]
    z = [(1 / (2 * s2), [1 + i, -i]), (half, [1, 0]), (half - 1 / (2 * s2), [0, 1])]
    return x, y, z


def _sympy_table():
    rows = []
    for (px, cx), (py, cy), (pz, cz) in product(*_sympy_axes()):
        cells = [a * b * c for a in cx for b in cy for c in cz]
        rows.append((sp.nsimplify(px * py * pz), [sp.expand(c) for c in cells]))
    return rows


def _sympy_literal():
    s2, i = sp.sqrt(2), sp.I
    q = 1 / (4 * s2)
    lit = [
        (sp.Rational(1, 8), [2, -1 - i, -1 + i, 1]),
        (q, [1 - i, 0, i, 0]),
        (q - sp.Rational(1, 8), [0, 1 - i, 0, i]),
        (q, [1 + i, -i, 0, 0]),
        (sp.Rational(1, 4), [1, 0, 0, 0]),
        (sp.Rational(1, 4) - q, [0, 1, 0, 0]),
        (q - sp.Rational(1, 8), [0, 0, 1 + i, -i]),
        (sp.Rational(1, 4) - q, [0, 0, 1, 0]),
        (sp.Rational(3, 8) - 1 / (2 * s2), [0, 0, 0, 1]),
    ]
    return [(p, cells + [0] * 4) for p, cells in lit]


def test_complete_table_exact():
    ours = _sympy_table()
    lit = _sympy_literal()
    assert len(ours) == len(lit) == 9
    for (p, cells), (lp, lcells) in zip(ours, lit):
        assert sp.simplify(p - lp) == 0
        assert all(sp.simplify(a - b) == 0 for a, b in zip(cells, lcells))


def test_complete_table_floats_match_exact():
    table = cardinal_joint_distribution(rotated_axis_distributions())
    lit = _sympy_literal()
    assert table.cells.shape == (9, 8)
    for r, (lp, lcells) in enumerate(lit):
        assert complex(table.probabilities[r]) == pytest.approx(complex(sp.N(lp, 30)), abs=1e-12)
        for k in range(8):
            assert table.cells[r, k] == pytest.approx(complex(sp.N(lcells[k], 30)), abs=1e-12)
        assert ROTATED_PIGEON_TABLE[r][0] == pytest.approx(float(sp.N(lp, 30)), abs=1e-15)


def test_per_axis_distributions_verify():
    x, y, z = rotated_axis_distributions()
    r = 1 / np.sqrt(2)
    wy, wz = (1 - 1j) * r, (1 + 1j) * r
    assert verify_decomposition(x, [1, 0])
    assert verify_decomposition(y, [(1 + wy) / 2, (1 - wy) / 2])
    assert verify_decomposition(z, [(1 + wz) / 2, (1 - wz) / 2])


def test_table_marginals_are_axis_weak_values():
    table = cardinal_joint_distribution(rotated_axis_distributions())
    r = 1 / np.sqrt(2)
    for axis, w in enumerate([1, (1 - 1j) * r, (1 + 1j) * r]):
        assert np.allclose(table.marginal(axis), [(1 + w) / 2, (1 - w) / 2], atol=1e-12)
    assert sum(complex(p) for p in table.probabilities) == pytest.approx(1)


def test_joint_table_json():
    table = cardinal_joint_distribution(rotated_axis_distributions())
    data = table.to_json()
    assert len(data["rows"]) == 9 and len(data["rows"][0]["cells"]) == 8
