import random

import pytest
from conftest import built, corpus_paths
from hypothesis import given, settings
from hypothesis import strategies as st
from litmusgen import ProgramGenerator
from violators import VIOLATORS, make, plain

from somm.events import (
    AXIOMS,
    EventStructure,
    InvalidEventStructure,
    from_rel_structure,
    mk_final_config,
    mk_valid_config,
    to_rel_structure,
    validate_axioms,
)
from somm.litmus import BuildError, build_event_structure, parse
from somm.oracle import Environment, Oracle
from somm.so import SoVar, dump_structure, parse_structure


def test_one_violator_per_axiom():
    assert sorted(VIOLATORS) == sorted(AXIOMS)


@pytest.mark.parametrize("axiom", AXIOMS)
def test_violator_triggers_exactly_its_axiom(axiom):
    violations = validate_axioms(VIOLATORS[axiom])
    assert violations
    assert {v.axiom for v in violations} == {axiom}


def test_irreflexivity_witness():
    (v,) = validate_axioms(VIOLATORS["conflict-irreflexive"])
    assert v.witness == (0,)


def test_order_laws_reported():
    es = EventStructure(plain(2), frozenset({(0, 1), (1, 0)}), frozenset(), frozenset())
    kinds = {v.axiom for v in validate_axioms(es)}
    assert {"po-reflexive", "po-antisymmetric"} <= kinds


@pytest.mark.parametrize("path", corpus_paths(), ids=lambda p: p.stem)
def test_corpus_structures_satisfy_axioms(path):
    es, _ = built(path.stem)
    assert validate_axioms(es) == []


def test_false_dependency_structure_shape():
    es, _ = built("lb-false-dep")
    # one initial write per location plus the seven thread events
    assert len(es) == 9
    desc = [e.describe().split(":")[-1] for e in es.events]
    assert desc.count("Wx=1") == 2
    read_x1 = desc.index("Rx=1")
    writers = {w for w, r in es.justifies if r == read_x1}
    assert {desc[w] for w in writers} == {"Wx=1"} and len(writers) == 2


# -- relational encoding -------------------------------------------------------------------


def three_events():
    return make(plain(3), order=[(0, 1), (0, 2)], conflict=[(1, 2), (2, 1)])


def test_three_event_encoding():
    rs = to_rel_structure(three_events())
    assert rs.universe_size == 3
    assert rs["<"] == {(0, 1), (0, 2)}
    assert rs["conflict"] == {(1, 2), (2, 1)}
    assert rs["<="] == {(0, 0), (1, 1), (2, 2), (0, 1), (0, 2)}


def test_empty_structure_rejected():
    with pytest.raises(ValueError):
        to_rel_structure(make([]))


def test_invalid_structure_rejected():
    with pytest.raises(InvalidEventStructure):
        to_rel_structure(VIOLATORS["conflict-forward"])


def _holds(rs, formula_of, members):
    x_set = SoVar("X", 1)
    env = Environment().bind_so(x_set, frozenset((m,) for m in members))
    return Oracle(rs).holds(formula_of(x_set), env)


@pytest.mark.parametrize("members, expected", [({0, 1}, True), ({1, 2}, False), ({1}, False), (set(), True)])
def test_valid_config_macro(members, expected):
    rs = to_rel_structure(three_events())
    assert _holds(rs, mk_valid_config, members) is expected
    assert three_events().is_valid_config(members) is expected


def test_final_config_without_finals_is_valid_config():
    rs = to_rel_structure(three_events())
    for members in [set(), {0}, {0, 1}, {1, 2}, {2}]:
        assert _holds(rs, mk_final_config, members) == _holds(rs, mk_valid_config, members)


def test_final_config_on_load_buffering():
    es, rs = built("lb-ctrl")
    desc = [e.describe().split(":")[-1] for e in es.events]
    execution = {0, 1, desc.index("Rx=1"), desc.index("Wy=1"), desc.index("Ry=1"), desc.index("Wx=1")}
    assert _holds(rs, mk_final_config, execution)
    assert es.is_final_config(execution)
    missing = execution - {desc.index("Wy=1")}
    assert not _holds(rs, mk_final_config, missing)


def test_rel_structure_dump_roundtrip():
    es, rs = built("lb-false-dep")
    back = from_rel_structure(parse_structure(dump_structure(rs)))
    assert back.po == es.po and back.conflict == es.conflict and back.justifies == es.justifies
    assert [(e.is_read, e.is_write, e.is_final) for e in back.events] == [
        (e.is_read, e.is_write, e.is_final) for e in es.events
    ]


def test_json_roundtrip_and_dot():
    es, _ = built("lb-ctrl")
    again = EventStructure.from_json(es.to_json())
    assert again.events == es.events and again.po == es.po and again.conflict == es.conflict
    dot = es.to_dot()
    assert dot.startswith("digraph") and "dashed" in dot


# -- frontend fuzzing ------------------------------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_random_programs_build_valid_structures(seed):
    src = ProgramGenerator(random.Random(seed)).source()
    try:
        es = build_event_structure(parse(src))
    except BuildError:
        return
    assert validate_axioms(es) == []
    ev = es.events
    for w, r in es.justifies:
        assert ev[w].is_write and ev[r].is_read and ev[w].loc == ev[r].loc and ev[w].value == ev[r].value
    # the events below any event form one control path, hence a configuration
    for e in range(len(es)):
        assert es.is_valid_config({a for a, b in es.po if b == e})
