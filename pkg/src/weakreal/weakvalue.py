"""Two-state-vector calculus: weak values, ABL probabilities, upside-down state."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .hilbert import (
    DimensionMismatchError,
    HermitianOperator,
    Ket,
    Projector,
    Space,
    UnitaryMap,
    as_matrix,
    eigendecompose,
    is_complete_family,
    space_dims,
)

ORTHOGONAL_TOL = 1e-12
SUM_TOL = 1e-10


class OrthogonalPPSError(ValueError):
    """Pre- and post-selection are orthogonal; weak values are undefined."""


class DegeneratePPSError(ValueError):
    """Every outcome of the basis has zero weight; ABL is undefined."""


@dataclass(frozen=True, eq=False)
class PPSPair:
    pre: Ket
    post: Ket

    def __post_init__(self):
        if self.pre.dim != self.post.dim:
            raise DimensionMismatchError(
                f"pre has dimension {self.pre.dim}, post {self.post.dim}"
            )
        ov = self.post.inner(self.pre)
        if abs(ov) <= ORTHOGONAL_TOL * self.pre.norm() * self.post.norm():
            raise OrthogonalPPSError("<phi|psi> vanishes; weak values are undefined")
        object.__setattr__(self, "_overlap", ov)

    @property
    def overlap(self) -> complex:
        """<phi|psi>."""
        return self._overlap

    @property
    def dim(self) -> int:
        return self.pre.dim

    @property
    def space(self) -> Space:
        return self.pre.space

    def swapped(self) -> "PPSPair":
        return PPSPair(self.post, self.pre)

    def postselection_probability(self) -> float:
        """|<phi|psi>|^2 for the normalized states."""
        return abs(self.overlap) ** 2 / (self.pre.norm() * self.post.norm()) ** 2


def weak_value(pps: PPSPair, op) -> complex:
    """<phi|A|psi> / <phi|psi>."""
    psi, phi = pps.pre.amplitudes, pps.post.amplitudes
    if isinstance(op, Projector):
        if op.dim != pps.dim:
            raise DimensionMismatchError(f"projector dim {op.dim} vs {pps.dim}")
        return op.sandwich(phi, psi) / pps.overlap
    m = as_matrix(op)
    if m.shape != (pps.dim, pps.dim):
        raise DimensionMismatchError(f"operator shape {m.shape} vs dim {pps.dim}")
    return complex(np.vdot(phi, m @ psi)) / pps.overlap


@dataclass(frozen=True, eq=False)
class WeakValueReport:
    """Weak values of a projector family, keyed by projector label.

    ``space`` is set when the family is the rank-1 product basis of that
    space in row-major order, which is what marginals and structures need.
    """

    labels: tuple[str, ...]
    values: np.ndarray
    basis_id: str = ""
    space: Space | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex).reshape(-1)
        if len(self.labels) != vals.shape[0]:
            raise ValueError("labels and values differ in length")
        if self.space is not None and int(np.prod(space_dims(self.space))) != vals.shape[0]:
            raise DimensionMismatchError("space does not match the number of entries")
        vals.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "values", vals)

    def __getitem__(self, label: str) -> complex:
        return complex(self.values[self.labels.index(label)])

    def __len__(self):
        return len(self.labels)

    def items(self):
        return zip(self.labels, (complex(v) for v in self.values))

    @property
    def sum_check(self) -> complex:
        return complex(self.values.sum())

    def to_json(self) -> dict:
        return {
            "basis": list(self.labels),
            "weak_values": [[v.real, v.imag] for v in self.values.tolist()],
            "sum_check": [self.sum_check.real, self.sum_check.imag],
        }


def projector_weak_values(
    pps: PPSPair,
    basis: Sequence[Projector],
    basis_id: str = "",
    space: Space | None = None,
) -> WeakValueReport:
    if not is_complete_family(basis):
        raise ValueError(f"basis {basis_id!r} is not a complete orthogonal family")
    vals = np.array([weak_value(pps, p) for p in basis])
    if abs(vals.sum() - 1) > SUM_TOL:
        raise ArithmeticError(f"projector weak values sum to {vals.sum()}")
    return WeakValueReport(tuple(p.label for p in basis), vals, basis_id, space)


def abl_probabilities(pps: PPSPair, basis: Sequence[Projector]) -> np.ndarray:
    if not is_complete_family(basis):
        raise ValueError("ABL needs a complete orthogonal family")
    w = np.abs(np.array([weak_value(pps, p) for p in basis])) ** 2
    total = w.sum()
    # relative to the scale of the weak values themselves
    if total <= 1e-24:
        raise DegeneratePPSError("all outcomes have zero ABL weight")
    return w / total


def abl_probability(pps: PPSPair, outcome: Projector | int | str, basis: Sequence[Projector]) -> float:
    """Conditional probability of ``outcome`` for a projective measurement of ``basis``.

    ``outcome`` is a member of ``basis`` or its index or label.
    """
    basis = list(basis)
    if isinstance(outcome, Projector):
        matches = [i for i, p in enumerate(basis) if p is outcome]
        if not matches:
            raise ValueError("outcome is not in the basis")
        idx = matches[0]
    elif isinstance(outcome, str):
        idx = [p.label for p in basis].index(outcome)
    else:
        idx = int(outcome)
    return float(abl_probabilities(pps, basis)[idx])


def conditional_expectation(pps: PPSPair, op: HermitianOperator | np.ndarray) -> float:
    """ABL-weighted mean of the eigenvalues of ``op``."""
    values, projs = eigendecompose(op)
    return float(np.dot(values, abl_probabilities(pps, projs)))


@dataclass(frozen=True, eq=False)
class UpsideDownState:
    matrix: np.ndarray

    def weak_value(self, op) -> complex:
        return complex(np.trace(self.matrix @ as_matrix(op)))


def upside_down(pps: PPSPair) -> UpsideDownState:
    """|psi><phi| / <phi|psi>: idempotent, unit trace, generally non-Hermitian."""
    m = np.outer(pps.pre.amplitudes, pps.post.amplitudes.conj()) / pps.overlap
    return UpsideDownState(m)


def synthesize_pps(
    target: Sequence[complex],
    scale: Sequence[complex] | None = None,
    basis: Sequence[Ket] | None = None,
    space: Space | None = None,
) -> PPSPair:
    """A PPS whose basis-projector weak values equal ``target``.

    psi = sum_i w_i c_i |a_i>, phi = sum_i (1/c_i^*) |a_i>. Any nonzero
    ``scale`` c gives the same weak values. ``basis`` defaults to the
    computational basis of ``space`` (or of a single subsystem "box").
    """
    w = np.array([complex(x) for x in target])
    if abs(w.sum() - 1) > ORTHOGONAL_TOL:
        raise ValueError(f"target weak values sum to {w.sum()}, not 1")
    c = np.ones(len(w), dtype=complex) if scale is None else np.array(scale, dtype=complex)
    if c.shape != w.shape:
        raise DimensionMismatchError("scale and target differ in length")
    if np.any(c == 0):
        raise ValueError("scale coefficients must be nonzero")
    if basis is None:
        from .hilbert import Subsystem

        if space is None:
            space = (Subsystem("box", tuple(str(i + 1) for i in range(len(w)))),)
        vecs = np.eye(len(w), dtype=complex)
    else:
        space = basis[0].space
        vecs = np.array([b.amplitudes for b in basis])
    pre = Ket(space, (w * c) @ vecs)
    post = Ket(space, (1 / c.conj()) @ vecs)
    return PPSPair(pre, post)


def propagate(
    pps: PPSPair,
    forward: UnitaryMap | np.ndarray | None = None,
    backward: UnitaryMap | np.ndarray | None = None,
) -> PPSPair:
    """Move both boundary states to an intermediate slice.

    ``forward`` takes the pre-selection from its time to the slice;
    ``backward`` takes the slice to the post-selection time, so the
    post-selection is retro-propagated with its adjoint.
    """
    pre, post = pps.pre, pps.post
    if forward is not None:
        pre = pre.evolve(_unitary(forward))
    if backward is not None:
        post = post.evolve(_unitary(backward).dagger)
    return PPSPair(pre, post)


def evolve_pps(
    pps: PPSPair,
    family: Callable[[float], UnitaryMap | np.ndarray],
    t: float,
    final_time: float = 0.0,
) -> PPSPair:
    """Weak-value slice at time ``t`` for a one-parameter unitary group.

    The pre-selection is given at time 0 and the post-selection at
    ``final_time``; with the default 0 both are specified on the same slice.
    """
    return propagate(pps, family(t), family(final_time - t))


def _unitary(u) -> UnitaryMap:
    return u if isinstance(u, UnitaryMap) else UnitaryMap(u)
