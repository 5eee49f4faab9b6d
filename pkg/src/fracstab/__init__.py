"""Monitored Clifford circuit ensembles: entanglement depth and fractal
cluster analysis on top of a bit-packed stabilizer simulator."""

__version__ = "0.1.0"

from .analysis import (FitResult, box_count_membership, box_count_state,
                       fit_boxcount_slope, fit_depth_exponent,
                       fractal_dimension, theil_sen)
from .circuit import (CircuitConfig, EnsembleSpec, P_CRITICAL, run_ensemble,
                      run_realization)
from .cliffords import TwoQubitClifford, group_table, sample_two_qubit_clifford
from .dense import DenseState, clifford_to_unitary
from .records import BoxCountRecord, DepthRecord, FitRow
from .structure import (DepthReport, Element, EntanglementStructure,
                        build_structure, coarse_grain, depth_report)
from .tableau import (MeasurementOutcome, StabilizerTableau, gf2_rank,
                      new_product_state)

__all__ = [
    "BoxCountRecord", "CircuitConfig", "DenseState", "DepthRecord",
    "DepthReport", "Element", "EnsembleSpec", "EntanglementStructure",
    "FitResult", "FitRow", "MeasurementOutcome", "P_CRITICAL",
    "StabilizerTableau", "TwoQubitClifford", "box_count_membership",
    "box_count_state", "build_structure", "clifford_to_unitary",
    "coarse_grain", "depth_report", "fit_boxcount_slope",
    "fit_depth_exponent", "fractal_dimension", "gf2_rank", "group_table",
    "new_product_state", "run_ensemble", "run_realization",
    "sample_two_qubit_clifford", "theil_sen",
]
