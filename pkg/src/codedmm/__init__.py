"""Coded distributed matrix multiplication over prime fields.

MatDot, systematic MatDot, PolyDot and n-matrix chain codes, with a straggler
simulator and a command-line front end.
"""
from .codec import CostReport, Share, WorkerProduct
from .errors import (CodedMMError, CorrectnessViolation, DuplicatePoint, EmptyInput,
                     InsufficientWorkers, InvalidParameter, RecoveryThresholdNotMet, ShapeError)
from .field_poly import DEFAULT_PRIME, EvalPoints, FieldConfig, FieldElement
from .matdot import MatDot, matdot_threshold
from .matrix_core import FieldMatrix, chain_product, matmul
from .nmatrix import NMatrix, nmat_threshold, verify_coefficient_isolation
from .polydot import PolyDot, polydot_threshold, tradeoff_table, verify_exponent_map
from .straggler_sim import RoundOutcome, StragglerModel, simulate_round, sweep

__all__ = [
    "CostReport", "Share", "WorkerProduct",
    "CodedMMError", "CorrectnessViolation", "DuplicatePoint", "EmptyInput",
    "InsufficientWorkers", "InvalidParameter", "RecoveryThresholdNotMet", "ShapeError",
    "DEFAULT_PRIME", "EvalPoints", "FieldConfig", "FieldElement",
    "MatDot", "matdot_threshold", "FieldMatrix", "chain_product", "matmul",
    "NMatrix", "nmat_threshold", "verify_coefficient_isolation",
    "PolyDot", "polydot_threshold", "tradeoff_table", "verify_exponent_map",
    "RoundOutcome", "StragglerModel", "simulate_round", "sweep",
]
