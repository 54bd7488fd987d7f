import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import built
from litmusgen import ProgramGenerator
from somm.litmus import (
    BuildError,
    EventCapExceeded,
    LitmusSyntaxError,
    build_event_structure,
    gen_store_buffer,
    parse,
    parse_file,
    to_source,
    value_domains,
)
from somm.litmus.program import If, Load, Store


def kinds(es):
    return sorted(e.describe().split(":")[-1] for e in es.events)


def test_load_buffering_parse(litmus_dir):
    t = parse_file(litmus_dir / "lb-ctrl.lisa")
    assert len(t.threads) == 2
    for th in t.threads:
        assert isinstance(th[0], Load) and isinstance(th[1], If)
    assert {(o.reg, o.value) for o in t.outcome} == {("r1", 1), ("r2", 1)}


def test_false_dependency_parse(litmus_dir):
    t = parse_file(litmus_dir / "lb-false-dep.lisa")
    branch = t.threads[1][1]
    assert isinstance(branch, If)
    assert [type(s) for s in branch.then] == [Store] and [type(s) for s in branch.orelse] == [Store]


@pytest.mark.parametrize(
    "text, where",
    [
        ("litmus T\ninit x = 0\nallowed? true\n", None),
        ("litmus T\ninit x = 0\n{\n  r1 = x;\n}\nallowed? r9 == 1\n", None),
        ("litmus T\ninit x = 0\n{\n  x = 1.5;\n}\nallowed? true\n", 4),
        ("litmus T\ninit x = 0\n{\n  r1 = x\n  @\n}\nallowed? true\n", 5),
    ],
)
def test_syntax_errors(text, where):
    with pytest.raises(LitmusSyntaxError) as info:
        parse(text)
    if where is not None:
        assert info.value.line == where
        assert f"{where}:" in str(info.value)


def test_load_buffering_structure():
    es, _ = built("lb-ctrl")
    assert len(es) == 8
    assert kinds(es) == sorted(["Wx=0", "Wy=0", "Rx=0", "Rx=1", "Wy=1", "Ry=0", "Ry=1", "Wx=1"])
    finals = [es.events[f].describe().split(":")[-1] for f in es.finals]
    assert sorted(finals) == ["Wx=1", "Wy=1"]
    desc = [e.describe().split(":")[-1] for e in es.events]
    rx0, rx1 = desc.index("Rx=0"), desc.index("Rx=1")
    assert (rx0, rx1) in es.conflict and (rx1, rx0) in es.conflict


def test_false_dependency_writes_on_both_branches():
    es, _ = built("lb-false-dep")
    thread1 = [e for e in es.events if e.thread == 1]
    assert sorted(e.describe().split(":")[-1] for e in thread1) == ["Ry=0", "Ry=1", "Wx=1", "Wx=1"]


def test_single_store():
    es = build_event_structure(parse("litmus S\ninit x = 0\n{\n  x = 1;\n}\nallowed? true\n"))
    assert kinds(es) == ["Wx=0", "Wx=1"]
    assert not es.conflict and not es.justifies


def test_store_buffer_generator():
    t = gen_store_buffer(2)
    assert t.locations == ["x1", "x2"]
    assert [s.loc for th in t.threads for s in th] == ["x1", "x2", "x2", "x1"]
    t3 = gen_store_buffer(3)
    assert t3.threads[0][1].loc == "x3"
    assert all(o.value == 0 for o in t3.outcome)
    with pytest.raises(ValueError):
        gen_store_buffer(1)


@pytest.mark.parametrize("n", [2, 3, 5, 25])
def test_store_buffer_event_count_is_linear(n):
    assert len(build_event_structure(gen_store_buffer(n))) == 4 * n


def test_value_domains_and_override():
    t = parse("litmus V\ninit x = 0\n{\n  x = 2;\n  r1 = x;\n}\nallowed? r1 == 2\n")
    assert value_domains(t) == {"x": frozenset({0, 2})}
    assert value_domains(t, override=(1,)) == {"x": frozenset({0, 1})}
    es = build_event_structure(t, values=(0, 1, 2))
    assert sum(e.is_read for e in es.events) == 3


def test_values_directive():
    t = parse("litmus V\ninit x = 0\nvalues 0, 1\n{\n  r1 = x;\n  x = r1;\n}\nallowed? r1 == 1\n")
    assert t.values == (0, 1)
    assert "values 0, 1" in to_source(t)
    assert sum(e.is_read for e in build_event_structure(t).events) == 2


def test_event_cap():
    with pytest.raises(EventCapExceeded):
        build_event_structure(gen_store_buffer(5), event_cap=10)


def test_unsatisfiable_outcome_is_a_build_error():
    with pytest.raises(BuildError):
        build_event_structure(parse("litmus U\ninit x = 0\n{\n  r1 = x;\n}\nallowed? r1 == 1\n"))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_source_roundtrip(seed):
    t = parse(ProgramGenerator(random.Random(seed)).source())
    again = parse(to_source(t))
    assert again.threads == t.threads and again.outcome == t.outcome and again.init == t.init
