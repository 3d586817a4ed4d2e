from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tickcheck.action_lang import ValueType
from tickcheck.errors import AlgebraicLoop, ElaborationError
from tickcheck.mdl_parser import parse, print_document
from tickcheck.model_ir import elaborate, load_model, parse_distribution, topo_order, validate

from conftest import DIFF_MODELS, FIXTURES


def model_text(blocks, lines, charts=""):
    bl = "\n".join(f"Block {{ {b} }}" for b in blocks)
    ln = "\n".join(f"Line {{ {l} }}" for l in lines)
    sf = f"Stateflow {{ {charts} }}" if charts else ""
    return f"Model {{ System {{ {bl}\n{ln} }} {sf} }}"


def build(blocks, lines, charts="", check=True):
    return elaborate(parse(model_text(blocks, lines, charts)), check=check)


def codes(exc):
    return [d.code for d in exc.value.diagnostics]


CHAIN = (
    ['id 1 BlockType Constant Name "c" Value 1', 'id 2 BlockType Gain Name "g" Gain "2.5"',
     'id 3 BlockType Outport Name "o"'],
    ['SrcBlock 1 SrcPort 1 DstBlock 2 DstPort 1', 'SrcBlock "g" DstBlock "o"'],
)


def test_chain_elaborates():
    m = build(*CHAIN)
    assert len(m.blocks) == 3 and len(m.connections) == 2 and m.charts == []
    assert m.block(2).params["gain"] == Fraction(5, 2)
    assert topo_order(m) == [1, 2, 3]
    assert m.signal_types[(2, 1)] is ValueType.Real
    assert m.signal_types[(1, 1)] is ValueType.Int


def test_dangling_connection():
    with pytest.raises(ElaborationError) as exc:
        build(CHAIN[0], ['SrcBlock 1 DstBlock 9'])
    assert "DanglingConnection" in codes(exc)


def test_nonexistent_port_is_dangling():
    with pytest.raises(ElaborationError) as exc:
        build(CHAIN[0], ['SrcBlock 1 DstBlock 2 DstPort 2', 'SrcBlock 2 DstBlock 3'])
    assert "DanglingConnection" in codes(exc)


def test_unconnected_port():
    with pytest.raises(ElaborationError) as exc:
        build(CHAIN[0], ['SrcBlock 1 DstBlock 2'])
    assert codes(exc) == ["UnconnectedPort"]


def test_unknown_kind_and_arity():
    with pytest.raises(ElaborationError) as exc:
        build(['id 1 BlockType Integrator Name "i"'], [])
    assert "UnknownBlockKind" in codes(exc)
    with pytest.raises(ElaborationError) as exc:
        build(['id 1 BlockType LogicalOperator Name "l" Operator AND Inputs 1'], [])
    assert "ArityMismatch" in codes(exc)


def test_arities_per_kind():
    m = load_model(FIXTURES / "logic.mdl")
    arity = {b.kind: (b.in_ports, b.out_ports) for b in m.blocks}
    assert arity["Switch"] == (3, 1)
    assert arity["UnitDelay"] == (1, 1)
    assert arity["Constant"] == (0, 1)
    sums = [b for b in load_model(FIXTURES / "random.mdl").blocks if b.kind == "Sum"]
    assert {(b.params["signs"], b.in_ports) for b in sums} == {("+++", 3), ("++", 2)}


def test_algebraic_loop():
    blocks = ['id 1 BlockType Sum Name "s" Inputs "++"', 'id 2 BlockType Gain Name "g" Gain 2',
              'id 3 BlockType Constant Name "c" Value 1']
    lines = ['SrcBlock 1 DstBlock 2', 'SrcBlock 2 DstBlock 1 DstPort 2', 'SrcBlock 3 DstBlock 1 DstPort 1']
    m = build(blocks, lines, check=False)
    with pytest.raises(AlgebraicLoop) as exc:
        topo_order(m)
    assert sorted(exc.value.block_ids) == [1, 2]
    assert [d.code for d in validate(m)] == ["AlgebraicLoop"]


def test_delay_breaks_loop():
    blocks = ['id 1 BlockType Sum Name "s" Inputs "++"', 'id 2 BlockType UnitDelay Name "d"',
              'id 3 BlockType Constant Name "c" Value 1']
    lines = ['SrcBlock 1 DstBlock 2', 'SrcBlock 2 DstBlock 1 DstPort 2', 'SrcBlock 3 DstBlock 1 DstPort 1']
    m = build(blocks, lines)
    order = topo_order(m)
    assert order.index(1) < order.index(2)


CHART_BLOCK = ['id 1 BlockType Chart Name "ch" ChartId 5']


def chart(body):
    return f"chart {{ id 5 {body} }}"


def test_multiple_defaults():
    body = 'state { id 1 Name "A" Default 1 } state { id 2 Name "B" Default 1 }'
    with pytest.raises(ElaborationError) as exc:
        build(CHART_BLOCK, [], chart(body))
    assert "MultipleDefaults" in codes(exc)


def test_unresolved_name():
    body = 'state { id 1 Name "A" Default 1 EntryAction "x = y + 1;" } data { id 1 Name "x" DataType Int }'
    with pytest.raises(ElaborationError) as exc:
        build(CHART_BLOCK, [], chart(body))
    assert "UnresolvedName" in codes(exc)


def test_non_sibling_transition():
    body = ('state { id 1 Name "A" Default 1 state { id 2 Name "A1" Default 1 } } state { id 3 Name "B" } '
            'transition { id 1 Source 2 Destination 3 }')
    with pytest.raises(ElaborationError) as exc:
        build(CHART_BLOCK, [], chart(body))
    assert "NonSiblingTransition" in codes(exc)


def test_duplicate_priority():
    body = ('state { id 1 Name "A" Default 1 } state { id 2 Name "B" } '
            'transition { id 1 Source 1 Destination 2 Priority 1 } transition { id 2 Source 1 Destination 2 Priority 1 }')
    with pytest.raises(ElaborationError) as exc:
        build(CHART_BLOCK, [], chart(body))
    assert "DuplicatePriority" in codes(exc)


def test_chart_ports_and_hierarchy():
    m = load_model(FIXTURES / "mini_cas.mdl")
    ego = m.chart_by_name("ego")
    assert ego.input_signals == ["lead_brake", "sample"]
    assert ego.output_signals == ["brake_cmd"]
    brake = next(s for s in ego.states.values() if s.name == "Brake")
    assert [ego.states[c].name for c in brake.substates] == ["Ramp", "Hold"]
    assert ego.path(brake.substates[1]) == "ego.Brake.Hold"
    assert m.block_by_name("ego").in_ports == 2


def test_default_priority_is_appearance_order():
    m = load_model(FIXTURES / "hierarchy.mdl")
    hc = m.charts[0]
    assert [t.id for t in hc.outgoing(1)] == [4, 3]


@pytest.mark.parametrize("name", DIFF_MODELS + ["mini_cas_det", "prob_q02", "prob_q20"])
def test_fixtures_validate(name):
    m = load_model(FIXTURES / f"{name}.mdl")
    assert validate(m) == []
    order = topo_order(m)
    assert sorted(order) == sorted(b.id for b in m.blocks)
    pos = {b: k for k, b in enumerate(order)}
    for c in m.connections:
        if m.block(c.src[0]).kind not in ("UnitDelay", "Chart"):
            assert pos[c.src[0]] < pos[c.dst[0]]


@pytest.mark.parametrize("name", DIFF_MODELS)
def test_reelaborate_printed(name):
    text = (FIXTURES / f"{name}.mdl").read_text()
    a = load_model(FIXTURES / f"{name}.mdl")
    b = elaborate(parse(print_document(parse(text))))
    assert [(x.id, x.kind, x.params, x.in_ports) for x in a.blocks] == [(x.id, x.kind, x.params, x.in_ports) for x in b.blocks]
    assert a.connections == b.connections
    assert a.charts == b.charts


@pytest.mark.parametrize("text, kind", [
    ("UniformInt(0, 1)", "UniformInt"),
    ("UniformReal(-1, 2.5)", "UniformReal"),
    ("Bernoulli(0.3)", "Bernoulli"),
    ("DiscreteChoice([1, 2], [0.5, 0.5])", "DiscreteChoice"),
])
def test_distributions(text, kind):
    assert parse_distribution(text).kind == kind


@pytest.mark.parametrize("text", ["Normal(0, 1)", "UniformInt(3, 1)", "Bernoulli(1.5)", "UniformInt(0.5, 2)",
                                  "DiscreteChoice([1], [1, 2])"])
def test_bad_distributions(text):
    with pytest.raises(ValueError):
        parse_distribution(text)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 6), st.integers(1, 6)), max_size=10))
def test_elaboration_totality(edges):
    """Random Gain/UnitDelay graphs either elaborate cleanly or raise diagnostics."""
    blocks = [f'id {k} BlockType {"UnitDelay" if k % 3 == 0 else "Gain"} Name "b{k}"' for k in range(1, 7)]
    lines = [f"SrcBlock {a} DstBlock {b}" for a, b in edges]
    try:
        m = build(blocks, lines)
    except ElaborationError as exc:
        assert exc.diagnostics
    else:
        assert validate(m) == []
