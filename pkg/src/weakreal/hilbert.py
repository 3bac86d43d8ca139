"""Finite-dimensional Hilbert-space core.

Labeled tensor-product spaces, kets, projectors, Hermitian operators and
unitaries. Everything is dense and complex; the largest space in use is
3**6 = 729 dimensional, so projectors keep a cheap structural form
(diagonal support or generating vector) and only build a matrix on demand.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-12
IDEMPOTENT_TOL = 1e-12
NORM_TOL = 1e-12
# eigenvalues closer than this are one degenerate eigenspace
DEGENERACY_TOL = 1e-9


class DimensionMismatchError(ValueError):
    """Operands live on spaces of different dimension."""


@dataclass(frozen=True)
class Subsystem:
    id: str
    states: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if not self.states:
            raise ValueError(f"subsystem {self.id!r} has no basis states")
        if len(set(self.states)) != len(self.states):
            raise ValueError(f"subsystem {self.id!r} has repeated state names")

    @property
    def dim(self) -> int:
        return len(self.states)


Space = tuple[Subsystem, ...]


def space_dims(space: Space) -> tuple[int, ...]:
    return tuple(s.dim for s in space)


def space_labels(space: Space) -> list[tuple[str, ...]]:
    """Basis labels in row-major product order."""
    return list(product(*(s.states for s in space)))


def label_str(label: Sequence[str]) -> str:
    return ",".join(label)


def _check_space(space: Space) -> Space:
    space = tuple(space)
    ids = [s.id for s in space]
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate subsystem ids in {ids}")
    return space


@dataclass(frozen=True, eq=False)
class Ket:
    """Complex amplitude vector over a labeled product basis.

    Kets may be unnormalized; ``normalized`` records whether the unit-norm
    invariant was requested (and checked).
    """

    space: Space
    amplitudes: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        space = _check_space(self.space)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        dim = int(np.prod(space_dims(space)))
        if amps.shape[0] != dim:
            raise DimensionMismatchError(
                f"{amps.shape[0]} amplitudes for a space of dimension {dim}"
            )
        norm = np.linalg.norm(amps)
        if norm == 0 or not np.isfinite(norm):
            raise ValueError("the zero vector is not a valid ket")
        if self.normalized and abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"ket flagged normalized has norm {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_labels(
        cls, space: Sequence[Subsystem], terms: Mapping[Sequence[str] | str, complex]
    ) -> "Ket":
        """Build a ket from ``{basis label: amplitude}``.

        Single-subsystem labels may be given as plain strings.
        """
        space = tuple(space)
        index = {lab: i for i, lab in enumerate(space_labels(space))}
        amps = np.zeros(len(index), dtype=complex)
        for lab, amp in terms.items():
            key = (lab,) if isinstance(lab, str) else tuple(lab)
            if key not in index:
                raise KeyError(f"{key} is not a basis label of this space")
            amps[index[key]] += amp
        return cls(space, amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def dims(self) -> tuple[int, ...]:
        return space_dims(self.space)

    def labels(self) -> list[tuple[str, ...]]:
        return space_labels(self.space)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "Ket":
        return Ket(self.space, self.amplitudes / self.norm(), normalized=True)

    def scaled(self, factor: complex) -> "Ket":
        return Ket(self.space, self.amplitudes * factor)

    def bra(self) -> np.ndarray:
        return self.amplitudes.conj()

    def inner(self, other: "Ket") -> complex:
        """<self|other>."""
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dimensions {self.dim} and {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def evolve(self, unitary: "UnitaryMap | np.ndarray") -> "Ket":
        m = as_matrix(unitary)
        if m.shape[0] != self.dim:
            raise DimensionMismatchError(f"operator {m.shape} on ket of dim {self.dim}")
        return Ket(self.space, m @ self.amplitudes)

    def to_json(self) -> dict:
        return {
            "space": [{"id": s.id, "states": list(s.states)} for s in self.space],
            "amplitudes": [[a.real, a.imag] for a in self.amplitudes.tolist()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Ket":
        space = tuple(Subsystem(s["id"], tuple(s["states"])) for s in data["space"])
        amps = [complex(re, im) for re, im in data["amplitudes"]]
        return cls(space, amps)


def ket(sys_id: str, states: Sequence[str], amplitudes: Sequence[complex]) -> Ket:
    """Single-subsystem ket shorthand."""
    return Ket((Subsystem(sys_id, tuple(states)),), amplitudes)


def tensor(*kets: Ket) -> Ket:
    """Kronecker product in the given subsystem order."""
    if len(kets) == 1 and not isinstance(kets[0], Ket):
        kets = tuple(kets[0])
    if not kets:
        raise ValueError("tensor of no kets")
    space = _check_space(tuple(s for k in kets for s in k.space))
    amps = reduce(np.kron, (k.amplitudes for k in kets))
    return Ket(space, amps)


class Projector:
    """Orthogonal projector.

    One of three representations: a set of computational-basis indices
    (``support``), a generating vector (rank 1), or an explicit matrix.
    """

    __slots__ = ("dim", "support", "vector", "_matrix", "label")

    def __init__(
        self,
        dim: int,
        *,
        support: Iterable[int] | None = None,
        vector: np.ndarray | None = None,
        matrix: np.ndarray | None = None,
        label: str = "",
    ):
        given = sum(x is not None for x in (support, vector, matrix))
        if given != 1:
            raise ValueError("give exactly one of support, vector, matrix")
        self.dim = int(dim)
        self.label = label
        self.support = None
        self.vector = None
        self._matrix = None
        if support is not None:
            sup = tuple(sorted(set(int(i) for i in support)))
            if not sup or sup[0] < 0 or sup[-1] >= self.dim:
                raise ValueError(f"support {sup} out of range for dim {self.dim}")
            self.support = sup
        elif vector is not None:
            v = np.asarray(vector, dtype=complex).reshape(-1)
            if v.shape[0] != self.dim:
                raise DimensionMismatchError(f"vector of length {v.shape[0]}")
            n = np.linalg.norm(v)
            if n == 0:
                raise ValueError("zero generating vector")
            self.vector = v / n
        else:
            m = np.asarray(matrix, dtype=complex)
            if m.shape != (self.dim, self.dim):
                raise DimensionMismatchError(f"matrix shape {m.shape}")
            if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
                raise ValueError("projector matrix is not Hermitian")
            if np.max(np.abs(m @ m - m)) > IDEMPOTENT_TOL:
                raise ValueError("projector matrix is not idempotent")
            self._matrix = m

    @classmethod
    def from_ket(cls, k: Ket | np.ndarray, label: str = "") -> "Projector":
        v = k.amplitudes if isinstance(k, Ket) else np.asarray(k)
        return cls(len(v), vector=v, label=label)

    @property
    def rank(self) -> int:
        if self.support is not None:
            return len(self.support)
        if self.vector is not None:
            return 1
        return int(round(np.trace(self._matrix).real))

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix
        if self.support is not None:
            m = np.zeros((self.dim, self.dim), dtype=complex)
            m[self.support, self.support] = 1.0
            return m
        return np.outer(self.vector, self.vector.conj())

    def sandwich(self, bra: np.ndarray, ket_: np.ndarray) -> complex:
        """<bra|P|ket> with ``bra`` given as the plain (unconjugated) vector."""
        if self.support is not None:
            idx = list(self.support)
            return complex(np.vdot(bra[idx], ket_[idx]))
        if self.vector is not None:
            return complex(np.vdot(bra, self.vector) * np.vdot(self.vector, ket_))
        return complex(np.vdot(bra, self._matrix @ ket_))

    def __repr__(self):
        kind = "support" if self.support is not None else (
            "vector" if self.vector is not None else "matrix")
        return f"Projector({self.label!r}, dim={self.dim}, rank={self.rank}, {kind})"


def basis_projectors(dim: int, labels: Sequence[str] | None = None) -> list[Projector]:
    labels = labels or [str(i + 1) for i in range(dim)]
    return [Projector(dim, support=[i], label=labels[i]) for i in range(dim)]


def product_basis(
    space: Space, local: Mapping[str, Sequence[tuple[str, Sequence[complex]]]] | None = None
) -> tuple[list[Projector], Space]:
    """Rank-1 product-basis projectors in row-major order.

    ``local`` optionally replaces a subsystem's computational basis with an
    orthonormal set of named vectors, e.g. an energy eigenbasis. Returns
    the projectors and the relabeled space describing their labels.
    """
    local = dict(local or {})
    bases: list[list[np.ndarray]] = []
    new_space = []
    for sub in space:
        if sub.id in local:
            names = [name for name, _ in local[sub.id]]
            vecs = [np.asarray(v, dtype=complex) for _, v in local[sub.id]]
            gram = np.array([[np.vdot(a, b) for b in vecs] for a in vecs])
            if len(vecs) != sub.dim or np.max(np.abs(gram - np.eye(sub.dim))) > 1e-10:
                raise ValueError(f"local basis for {sub.id!r} is not orthonormal and complete")
            bases.append(vecs)
            new_space.append(Subsystem(sub.id, tuple(names)))
        else:
            bases.append(list(np.eye(sub.dim, dtype=complex)))
            new_space.append(sub)
    new_space = tuple(new_space)
    dim = int(np.prod(space_dims(space)))
    projs = []
    for lab, idx in zip(space_labels(new_space), product(*(range(s.dim) for s in space))):
        if not local:
            flat = int(np.ravel_multi_index(idx, space_dims(space)))
            projs.append(Projector(dim, support=[flat], label=label_str(lab)))
        else:
            v = reduce(np.kron, (bases[k][i] for k, i in enumerate(idx)))
            projs.append(Projector(dim, vector=v, label=label_str(lab)))
    return projs, new_space


def coarse_grain(projectors: Sequence[Projector], label: str | None = None) -> Projector:
    """Sum of mutually orthogonal projectors."""
    projectors = list(projectors)
    if not projectors:
        raise ValueError("nothing to coarse-grain")
    dim = projectors[0].dim
    if any(p.dim != dim for p in projectors):
        raise DimensionMismatchError("projectors on different dimensions")
    if label is None:
        label = "+".join(p.label for p in projectors)
    if len(projectors) == 1:
        p = projectors[0]
        return Projector(dim, support=p.support, label=label) if p.support is not None else \
            Projector(dim, matrix=p.matrix, label=label)
    if all(p.support is not None for p in projectors):
        seen: set[int] = set()
        for p in projectors:
            if seen & set(p.support):
                raise ValueError("projectors to coarse-grain are not orthogonal")
            seen |= set(p.support)
        return Projector(dim, support=seen, label=label)
    mats = [p.matrix for p in projectors]
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if np.max(np.abs(mats[i] @ mats[j])) > IDEMPOTENT_TOL:
                raise ValueError("projectors to coarse-grain are not orthogonal")
    return Projector(dim, matrix=sum(mats), label=label)


def is_complete_family(projectors: Sequence[Projector], tol: float = 1e-10) -> bool:
    """True if the projectors sum to the identity (hence are orthogonal)."""
    if not projectors:
        return False
    dim = projectors[0].dim
    if any(p.dim != dim for p in projectors):
        return False
    if all(p.support is not None for p in projectors):
        idx = [i for p in projectors for i in p.support]
        return sorted(idx) == list(range(dim))
    if all(p.vector is not None for p in projectors):
        if len(projectors) != dim:
            return False
        v = np.array([p.vector for p in projectors])
        return bool(np.max(np.abs(v.conj() @ v.T - np.eye(dim))) < tol)
    total = sum(p.matrix for p in projectors)
    return bool(np.max(np.abs(total - np.eye(dim))) < tol)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got {m.shape}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValueError("operator is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def eigendecompose(
    op: HermitianOperator | np.ndarray, tol: float = DEGENERACY_TOL
) -> tuple[np.ndarray, list[Projector]]:
    """Spectral decomposition with degenerate eigenvalues grouped.

    Returns ascending distinct eigenvalues and one eigenprojector each.
    Diagonal operators keep diagonal-support projectors.
    """
    if not isinstance(op, HermitianOperator):
        op = HermitianOperator(op)
    m = op.matrix
    dim = m.shape[0]
    if np.count_nonzero(m - np.diag(np.diag(m))) == 0:
        diag = np.diag(m).real
        order = np.argsort(diag, kind="stable")
        groups = _group(diag[order], tol)
        values, projs = [], []
        for g in groups:
            idx = order[g]
            values.append(float(np.mean(diag[idx])))
            projs.append(Projector(dim, support=idx, label=f"{values[-1]:g}"))
        return np.array(values), projs
    w, v = np.linalg.eigh(m)
    values, projs = [], []
    for g in _group(w, tol):
        vecs = v[:, g]
        values.append(float(np.mean(w[g])))
        lab = f"{values[-1]:g}"
        if len(g) == 1:
            projs.append(Projector(dim, vector=vecs[:, 0], label=lab))
        else:
            mat = vecs @ vecs.conj().T
            projs.append(Projector(dim, matrix=(mat + mat.conj().T) / 2, label=lab))
    return np.array(values), projs


def _group(sorted_values: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = [[0]]
    for i in range(1, len(sorted_values)):
        if sorted_values[i] - sorted_values[groups[-1][-1]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def reconstruct(values: Sequence[float], projectors: Sequence[Projector]) -> np.ndarray:
    return sum(lam * p.matrix for lam, p in zip(values, projectors))


@dataclass(frozen=True, eq=False)
class UnitaryMap:
    matrix: np.ndarray
    time_parameter: float | None = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"unitary must be square, got {m.shape}")
        if np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) > UNITARY_TOL:
            raise ValueError("matrix is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dagger(self) -> "UnitaryMap":
        return UnitaryMap(self.matrix.conj().T, self.time_parameter)

    def __matmul__(self, other: "UnitaryMap") -> "UnitaryMap":
        return UnitaryMap(self.matrix @ other.matrix)


def as_matrix(op) -> np.ndarray:
    if isinstance(op, (HermitianOperator, UnitaryMap)):
        return op.matrix
    if isinstance(op, Projector):
        return op.matrix
    return np.asarray(op, dtype=complex)


def kron_ops(*ops) -> np.ndarray:
    return reduce(np.kron, (as_matrix(o) for o in ops))


def embed(op, position: int, dims: Sequence[int]) -> np.ndarray:
    """Operator acting on one subsystem, identity elsewhere."""
    mats = [np.eye(d, dtype=complex) for d in dims]
    mats[position] = as_matrix(op)
    return kron_ops(*mats)


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
