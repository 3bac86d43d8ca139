"""N-structures: one graph per nonzero rank-1 joint weak value.

Vertices are the local states of each subsystem; two vertices are joined
when the pairwise marginal weak value of that pair of local states is
nonzero.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import networkx as nx
import numpy as np

from ..hilbert import Space, Subsystem, label_str, space_dims, space_labels
from ..weakvalue import SUM_TOL, WeakValueReport

EDGE_TOL = 1e-10


class DisconnectedStructureWarning(UserWarning):
    pass


@dataclass(frozen=True)
class NStructure:
    vertices: tuple[tuple[str, str], ...]  # (subsystem id, local state), one per subsystem
    multiplicity: complex
    edges: frozenset[tuple[int, int]]  # pairs of vertex positions, i < j

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(len(self.vertices)))
        g.add_edges_from(self.edges)
        return g

    def is_connected(self) -> bool:
        return len(self.vertices) <= 1 or nx.is_connected(self.graph())

    def induced(self, positions: Sequence[int]) -> tuple[tuple[tuple[str, str], ...], frozenset]:
        """Vertices and edges of the subgraph on ``positions``, reindexed from 0."""
        pos = sorted(positions)
        where = {p: k for k, p in enumerate(pos)}
        edges = frozenset((where[i], where[j]) for i, j in self.edges if i in where and j in where)
        return tuple(self.vertices[p] for p in pos), edges

    def to_json(self) -> dict:
        return {
            "vertices": [list(v) for v in self.vertices],
            "multiplicity": [self.multiplicity.real, self.multiplicity.imag],
            "edges": [list(e) for e in sorted(self.edges)],
        }


@dataclass(frozen=True, eq=False)
class StructureSet:
    space: Space
    structures: tuple[NStructure, ...]
    pairwise: dict  # (i, j) -> (dim_i x dim_j) array of pairwise marginal weak values

    def __len__(self):
        return len(self.structures)

    def __iter__(self):
        return iter(self.structures)

    @property
    def multiplicities(self) -> list[complex]:
        return [s.multiplicity for s in self.structures]

    def to_json(self) -> dict:
        return {"structures": [s.to_json() for s in self.structures]}


def _joint_tensor(report: WeakValueReport) -> np.ndarray:
    if report.space is None:
        raise ValueError("structures need a weak-value report over a full product basis")
    if abs(report.sum_check - 1) > SUM_TOL:
        raise ValueError(f"joint weak values sum to {report.sum_check}, not 1")
    return np.asarray(report.values).reshape(space_dims(report.space))


def _positions(space: Space, subset: Sequence) -> list[int]:
    ids = [s.id for s in space]
    out = []
    for s in subset:
        if isinstance(s, Subsystem):
            s = s.id
        out.append(ids.index(s) if isinstance(s, str) else int(s))
    if len(set(out)) != len(out) or any(not 0 <= p < len(space) for p in out):
        raise ValueError(f"invalid subsystem subset {list(subset)}")
    return sorted(out)


def marginal_weak_values(report: WeakValueReport, subset: Sequence) -> WeakValueReport:
    """Sum the joint weak values over every subsystem not in ``subset``.

    ``subset`` holds subsystem ids or positions; the result keeps the
    original subsystem order.
    """
    if not subset:
        raise ValueError("marginal over an empty subset")
    tensor = _joint_tensor(report)
    keep = _positions(report.space, subset)
    drop = tuple(i for i in range(len(report.space)) if i not in keep)
    marg = tensor.sum(axis=drop) if drop else tensor
    sub_space = tuple(report.space[i] for i in keep)
    labels = tuple(label_str(lab) for lab in space_labels(sub_space))
    return WeakValueReport(labels, marg.reshape(-1), report.basis_id, sub_space)


def pairwise_marginals(report: WeakValueReport) -> dict[tuple[int, int], np.ndarray]:
    tensor = _joint_tensor(report)
    n = tensor.ndim
    out = {}
    for i, j in combinations(range(n), 2):
        drop = tuple(k for k in range(n) if k not in (i, j))
        out[(i, j)] = tensor.sum(axis=drop) if drop else tensor
    return out


def structure_edges(local: Sequence[int], pairwise: dict, tol: float = EDGE_TOL) -> frozenset:
    """Edge rule for a tuple of local-state indices."""
    return frozenset(
        (i, j) for (i, j), m in pairwise.items() if abs(m[local[i], local[j]]) > tol
    )


def _unit_split(m: complex, tol: float) -> list[complex] | None:
    a, b = round(m.real), round(m.imag)
    if abs(m.real - a) > tol or abs(m.imag - b) > tol:
        return None
    return [complex(np.sign(a))] * abs(a) + [1j * np.sign(b)] * abs(b)


def build_structures(
    report: WeakValueReport,
    split_integer: bool = True,
    tol: float = EDGE_TOL,
) -> StructureSet:
    """One structure per nonzero joint weak value.

    With ``split_integer`` a Gaussian-integer multiplicity such as 2 or
    1 - i becomes that many unit structures (one per counterparticle
    string); other multiplicities stay as a single weighted structure.
    """
    tensor = _joint_tensor(report)
    space = report.space
    pairs = pairwise_marginals(report)
    out = []
    for local in np.ndindex(*tensor.shape):
        m = complex(tensor[local])
        if abs(m) <= tol:
            continue
        verts = tuple((space[k].id, space[k].states[s]) for k, s in enumerate(local))
        edges = structure_edges(local, pairs, tol)
        units = _unit_split(m, tol) if split_integer else None
        for mult in units or [m]:
            s = NStructure(verts, mult, edges)
            if not s.is_connected():
                warnings.warn(
                    f"structure on {verts} is not connected (edges {sorted(edges)})",
                    DisconnectedStructureWarning,
                    stacklevel=2,
                )
            out.append(s)
    return StructureSet(space, tuple(out), pairs)


def subgraph_consistent(report: WeakValueReport, subset: Sequence, tol: float = EDGE_TOL) -> bool:
    """Edges of the marginal structures on ``subset`` equal the induced subgraphs.

    Checked for every full structure whose restriction to ``subset`` has a
    nonzero marginal weak value.
    """
    full = build_structures(report, split_integer=False, tol=tol)
    keep = _positions(report.space, subset)
    marg = build_structures(marginal_weak_values(report, keep), split_integer=False, tol=tol)
    by_vertices = {s.vertices: s.edges for s in marg}
    for s in full:
        verts, edges = s.induced(keep)
        if verts in by_vertices and by_vertices[verts] != edges:
            return False
    return True
