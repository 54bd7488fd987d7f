import pytest

import worked
from somm.qbf import (
    Circuit,
    QdimacsError,
    clausify,
    read_qdimacs,
    simplify,
    solve_circuit,
    solve_qdimacs,
    translate,
    write_qdimacs,
)


def test_conjunction_clausifies_to_definition_and_unit():
    c = Circuit()
    a, b = c.var(), c.var()
    cnf = clausify(c, c.and_((a, b)))
    assert cnf.num_vars == 3
    assert len(cnf.clauses) == 4
    gate = 3
    assert [gate] in cnf.clauses
    assert sorted(map(sorted, cnf.clauses)) == sorted(map(sorted, [[-gate, 1], [-gate, 2], [gate, -1, -2], [gate]]))


def test_universal_equivalence_is_true():
    c = Circuit()
    x, y = c.var(), c.var()
    root = c.forall((x,), c.exists((y,), c.iff(x, y)))
    cnf = clausify(c, root)
    assert [k for k, _ in cnf.prefix] == ["a", "e"]
    assert solve_qdimacs(cnf) is True
    assert solve_qdimacs(read_qdimacs(write_qdimacs(c, root))) is True


def test_existential_instance_has_single_block():
    q = simplify(translate(worked.STRUCTURE, worked.formula()))
    cnf = clausify(q.circuit, q.root)
    assert cnf.is_propositional()
    assert [k for k, vs in cnf.prefix if vs] == ["e"]
    assert solve_qdimacs(cnf) is True


def test_roundtrip_matches_circuit_verdict():
    c = Circuit()
    x, y = c.var(), c.var()
    root = c.exists((x,), c.forall((y,), c.or_((x, y))))
    again = read_qdimacs(write_qdimacs(c, root))
    assert solve_qdimacs(again) == solve_circuit(c, root).value is True
    c2, r2 = again.to_circuit()
    assert solve_circuit(c2, r2).value is True


@pytest.mark.parametrize(
    "text, message",
    [
        ("e 1 0\n1 0\n", "before the problem line"),
        ("p cnf 1\n", "bad problem line"),
        ("p cnf 1 1\np cnf 1 1\n1 0\n", "bad problem line"),
        ("p cnf 1 1\n1 0\ne 1 0\n", "after clauses"),
        ("p cnf 1 1\ne 1\n1 0\n", "end with 0"),
        ("p cnf 1 1\n2 0\n", "exceeds"),
        ("p cnf 1 2\n1 0\n", "declares 2 clauses"),
        ("p cnf 1 1\n1\n", "not terminated"),
        ("c only a comment\n", "missing problem line"),
    ],
)
def test_header_and_body_validation(text, message):
    with pytest.raises(QdimacsError, match=message):
        read_qdimacs(text)
