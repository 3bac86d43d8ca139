"""Cardinal representation: the upside-down state over a traceless operator basis."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from ..hilbert import SIGMA_X, SIGMA_Y, SIGMA_Z
from ..weakvalue import PPSPair, upside_down
from .decompose import Decomposition

_PAULI = {"I": np.eye(2, dtype=complex), "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}


def gell_mann(d: int) -> list[np.ndarray]:
    """Generalized Gell-Mann matrices, normalized to Tr(g_i g_j) = 2 delta_ij.

    For each k = 1..d-1 the symmetric and antisymmetric (j, k) pairs with
    j < k come first, then the k-th diagonal matrix; d = 2 gives the Pauli
    matrices and d = 3 the usual lambda_1..lambda_8.
    """
    if d < 2:
        raise ValueError(f"need d >= 2, got {d}")
    out = []
    for k in range(1, d):
        for j in range(k):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1
            a = np.zeros((d, d), dtype=complex)
            a[j, k], a[k, j] = -1j, 1j
            out += [s, a]
        diag = np.zeros(d)
        diag[:k] = 1
        diag[k] = -k
        out.append(np.sqrt(2 / (k * (k + 1))) * np.diag(diag).astype(complex))
    return out


def pauli_products(n_qubits: int) -> tuple[list[str], list[np.ndarray]]:
    """All non-identity n-qubit Pauli strings, rescaled so Tr(g g) = 2."""
    labels, mats = [], []
    scale = np.sqrt(2 / 2**n_qubits)
    for word in product("IXYZ", repeat=n_qubits):
        if set(word) == {"I"}:
            continue
        m = np.array([[1]], dtype=complex)
        for ch in word:
            m = np.kron(m, _PAULI[ch])
        labels.append("".join(word))
        mats.append(scale * m)
    return labels, mats


def cardinal_basis(d: int, mode: str = "gell_mann") -> tuple[list[str], list[np.ndarray]]:
    if mode == "gell_mann":
        mats = gell_mann(d)
        if d == 2:
            return ["x", "y", "z"], mats
        return [f"g{i + 1}" for i in range(len(mats))], mats
    if mode == "pauli_product":
        n = d.bit_length() - 1
        if d < 2 or 2**n != d:
            raise ValueError(f"pauli_product needs a power of two, got d={d}")
        return pauli_products(n)
    raise ValueError(f"unknown mode {mode!r}")


def gram(basis: Sequence[np.ndarray]) -> np.ndarray:
    """Tr(g_i g_j)."""
    b = np.array(basis)
    return np.einsum("iab,jba->ij", b, b)


@dataclass(frozen=True, eq=False)
class CardinalRepresentation:
    dim: int
    labels: tuple[str, ...]
    operator_basis: tuple[np.ndarray, ...]
    weak_vector: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """I/d + (1/2) sum_i (g_i)_w g_i."""
        out = np.eye(self.dim, dtype=complex) / self.dim
        for w, g in zip(self.weak_vector, self.operator_basis):
            out = out + 0.5 * w * g
        return out

    def directional(self, n: Sequence[float]) -> complex:
        """(g_n)_w = w . n for a direction in the operator-basis coordinates."""
        return complex(np.dot(self.weak_vector, np.asarray(n, dtype=float)))

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "labels": list(self.labels),
            "weak_vector": [[w.real, w.imag] for w in self.weak_vector.tolist()],
        }


def weak_vector(pps: PPSPair, mode: str = "gell_mann") -> CardinalRepresentation:
    labels, basis = cardinal_basis(pps.dim, mode)
    rho = upside_down(pps).matrix
    w = np.array([np.trace(rho @ g) for g in basis])
    return CardinalRepresentation(pps.dim, tuple(labels), tuple(basis), w)


@dataclass(frozen=True, eq=False)
class JointTable:
    """Cartesian product of per-axis decompositions.

    Rows run over the product of the per-axis supports with the last axis
    varying fastest; each cell is the product of the per-axis entries, with
    columns ordered the same way over the per-axis outcomes.
    """

    axes: tuple[Decomposition, ...]
    probabilities: tuple
    cells: np.ndarray  # (rows, columns) complex

    def marginal(self, axis: int) -> np.ndarray:
        """Probability-weighted column sums over every other axis."""
        shape = [len(a.support[0][1]) for a in self.axes]
        t = self.cells.reshape((len(self.probabilities), *shape))
        others = tuple(k + 1 for k in range(len(shape)) if k != axis)
        per_row = t.sum(axis=others) if others else t
        p = np.array([complex(x) for x in self.probabilities])
        return p @ per_row

    def to_json(self) -> dict:
        return {
            "rows": [
                {"probability": complex(p).real, "cells": [[c.real, c.imag] for c in row]}
                for p, row in zip(self.probabilities, self.cells.tolist())
            ]
        }


def cardinal_joint_distribution(per_axis: Sequence[Decomposition]) -> JointTable:
    per_axis = tuple(per_axis)
    if not per_axis:
        raise ValueError("need at least one axis")
    probs, rows = [], []
    for combo in product(*(a.support for a in per_axis)):
        p = 1
        for q, _ in combo:
            p = p * q
        cell = np.array([1 + 0j])
        for _, cfg in combo:
            cell = np.kron(cell, np.array(cfg.counts))
        probs.append(p)
        rows.append(cell)
    return JointTable(per_axis, tuple(probs), np.array(rows))
