"""Second-order logic over finite relational structures."""

from .combinators import EMPTY, EQUALS, acyclic, eq, ident, inj, inv, irrefl, seq, subset, tc, trans, union
from .sexpr import SexprError, dump_formula, dump_structure, parse_formula, parse_structure
from .structure import RelStructure, StructureError
from .syntax import (
    FALSE,
    TRUE,
    And,
    ArityError,
    Atom,
    Const,
    ExistsFo,
    ExistsSo,
    ForallFo,
    ForallSo,
    Formula,
    Iff,
    Implies,
    Macro,
    Nand,
    Not,
    Or,
    Rel,
    SoVar,
    Var,
    exists,
    forall,
    free_vars,
    fresh_scope,
    fresh_so,
    fresh_var,
    is_sentence,
    size,
    to_nand,
)

__all__ = [
    "And",
    "ArityError",
    "Atom",
    "Const",
    "EMPTY",
    "EQUALS",
    "ExistsFo",
    "ExistsSo",
    "FALSE",
    "ForallFo",
    "ForallSo",
    "Formula",
    "Iff",
    "Implies",
    "Macro",
    "Nand",
    "Not",
    "Or",
    "Rel",
    "RelStructure",
    "SexprError",
    "SoVar",
    "StructureError",
    "TRUE",
    "Var",
    "acyclic",
    "dump_formula",
    "dump_structure",
    "eq",
    "exists",
    "forall",
    "free_vars",
    "fresh_scope",
    "fresh_so",
    "fresh_var",
    "ident",
    "inj",
    "inv",
    "irrefl",
    "is_sentence",
    "parse_formula",
    "parse_structure",
    "seq",
    "size",
    "subset",
    "tc",
    "to_nand",
    "trans",
    "union",
]
