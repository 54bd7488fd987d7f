"""Quantified boolean circuits: translation, simplification, file formats and solving."""

from .circuit import FALSE, TRUE, Circuit, VarOrigin
from .external import ExternalSolverError, external_command, run_external
from .prenex import Prenex, prenex
from .qcir import QcirError, read_qcir, write_qcir
from .qdimacs import Qdimacs, QdimacsError, clausify, read_qdimacs, solve_qdimacs, write_qdimacs
from .simplify import simplify, simplify_circuit
from .solver import (
    MemoryCapExceeded,
    SolverLimit,
    SolverTimeout,
    Verdict,
    evaluate,
    solve,
    solve_circuit,
)
from .translate import QbfFormula, TranslationError, translate

__all__ = [
    "FALSE",
    "TRUE",
    "Circuit",
    "ExternalSolverError",
    "MemoryCapExceeded",
    "Prenex",
    "QbfFormula",
    "Qdimacs",
    "QdimacsError",
    "QcirError",
    "SolverLimit",
    "SolverTimeout",
    "TranslationError",
    "VarOrigin",
    "Verdict",
    "clausify",
    "evaluate",
    "external_command",
    "prenex",
    "read_qcir",
    "read_qdimacs",
    "run_external",
    "simplify",
    "simplify_circuit",
    "solve",
    "solve_circuit",
    "solve_qdimacs",
    "translate",
    "write_qcir",
    "write_qdimacs",
]
