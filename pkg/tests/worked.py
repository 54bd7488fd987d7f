"""The three-event worked example: a conflict-free, downward-closed set exists."""

from somm.so import And, ExistsSo, ForallFo, Implies, Not, Rel, RelStructure, SoVar, Var

STRUCTURE = RelStructure(3, {"ord": (2, [(0, 1), (0, 2)]), "conflict": (2, [(1, 2)])})


def formula():
    x_set = SoVar("X", 1)
    x, y = Var("x"), Var("y")
    ordr, conflict = Rel("ord", 2), Rel("conflict", 2)
    closed = ForallFo(x, ForallFo(y, Implies(And((ordr(x, y), x_set(y))), x_set(x))))
    consistent = ForallFo(x, ForallFo(y, Implies(And((x_set(x), x_set(y))), Not(conflict(x, y)))))
    return ExistsSo(x_set, And((closed, consistent)))


def satisfies(members) -> bool:
    members = set(members)
    closed = all(a in members for a, b in STRUCTURE["ord"] if b in members)
    return closed and not any((a, b) in STRUCTURE["conflict"] for a in members for b in members)
