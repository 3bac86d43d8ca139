"""Counterparticle ontology: integer decompositions, N-structures, cardinal representation."""
from .cardinal import (
    gram,
    CardinalRepresentation,
    JointTable,
    cardinal_basis,
    cardinal_joint_distribution,
    gell_mann,
    weak_vector,
)
from .decompose import Configuration, Decomposition, decompose, verify_decomposition
from .structures import (
    NStructure,
    StructureSet,
    build_structures,
    marginal_weak_values,
    subgraph_consistent,
)
