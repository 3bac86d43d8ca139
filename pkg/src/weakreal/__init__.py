"""Weak values, ABL probabilities, PPS paradoxes and the counterparticle model."""
from .hilbert import Ket, Projector, HermitianOperator, Subsystem, UnitaryMap, ket, tensor
from .weakvalue import (
    PPSPair,
    abl_probabilities,
    abl_probability,
    conditional_expectation,
    projector_weak_values,
    synthesize_pps,
    upside_down,
    weak_value,
)

__version__ = "0.1.0"
