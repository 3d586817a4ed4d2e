import pytest
from hypothesis import given, settings, strategies as st

from tickcheck.errors import ParseError
from tickcheck.mdl_parser import (
    RawNode, SourceSpan, decode_string, encode_string, find_all, parse, print_document,
    tokenize, untokenize,
)

GAIN_DOC = 'Model { System { Block { BlockType Gain Name "G1" id 3 Gain "2.5" } } }'


def codes(exc):
    return [d.code for d in exc.value.diagnostics]


def test_tokenize_simple():
    toks = tokenize('Model { Name "m" }')
    assert [(t.kind, t.lexeme) for t in toks[:-1]] == [
        ("ident", "Model"), ("lbrace", "{"), ("ident", "Name"), ("string", '"m"'), ("rbrace", "}")]
    assert toks[-1].kind == "eof"


def test_tokenize_keeps_numeric_strings_as_strings():
    toks = tokenize('Gain "2.5"')
    assert [(t.kind, t.lexeme) for t in toks[:-1]] == [("ident", "Gain"), ("string", '"2.5"')]


def test_unterminated_string():
    with pytest.raises(ParseError) as exc:
        tokenize('Name "unclosed')
    assert codes(exc) == ["UnterminatedString"]
    assert exc.value.diagnostics[0].span.line == 1


def test_illegal_character_has_span():
    with pytest.raises(ParseError) as exc:
        tokenize("Model {\n  @ }")
    d = exc.value.diagnostics[0]
    assert d.code == "IllegalCharacter"
    assert (d.span.line, d.span.column) == (2, 3)


def test_untokenize_restores_source():
    src = 'Model {  # c\n\tName "a\\"b"\n  x 1.50 }\n'
    assert untokenize(tokenize(src)) == src


def test_gain_document_structure():
    root = parse(GAIN_DOC)
    assert root.kind == "Model"
    (system,) = root.children
    (block,) = system.children
    assert block.params == {"BlockType": "Gain", "Name": "G1", "id": 3, "Gain": "2.5"}
    assert isinstance(block.params["Gain"], str)


def test_empty_model():
    root = parse("Model { }")
    assert root.children == [] and root.params == {}
    assert print_document(root) == "Model {\n}\n"


@pytest.mark.parametrize("src, code", [
    ("Model { System { Block { id 3 } Block { id 3 } } }", "DuplicateId"),
    ("System { }", "MissingRoot"),
    ("Model { System { }", "UnbalancedBrace"),
    ("Model { } }", "UnbalancedBrace"),
    ("Model { Name a Name b }", "DuplicateParam"),
    ("Model { Block { Name x } }", "MissingId"),
])
def test_parse_errors(src, code):
    with pytest.raises(ParseError) as exc:
        parse(src)
    assert code in codes(exc)


def test_duplicate_id_names_the_id():
    with pytest.raises(ParseError) as exc:
        parse("Model { System { Block { id 3 } Block { id 3 } } }")
    assert "3" in exc.value.diagnostics[0].message


def test_same_id_in_different_kinds_is_fine():
    root = parse("Model { Block { id 1 } state { id 1 } }")
    assert len(root.children) == 2


def test_find_all_preorder():
    root = parse("Model { System { Block { id 1 } Block { id 2 } } }")
    assert [b.params["id"] for b in find_all(root, "Block")] == [1, 2]
    assert find_all(root, "transition") == []


def test_find_all_includes_substates():
    root = parse("Model { chart { id 1 state { id 1 state { id 2 } } state { id 3 } } }")
    assert [s.params["id"] for s in find_all(root, "state")] == [1, 2, 3]


def test_print_round_trip_and_quotes():
    root = parse(GAIN_DOC)
    text = print_document(root)
    assert 'Name "G1"' in text and 'Gain "2.5"' in text
    assert parse(text).structurally_equal(root)


def test_unknown_kinds_and_params_preserved():
    root = parse("Model { Annotation { Color red Weight 2 } }")
    assert root.children[0].kind == "Annotation"
    assert root.children[0].params == {"Color": "red", "Weight": 2}


def test_source_span_validation():
    with pytest.raises(ValueError):
        SourceSpan(0, 1, 0)


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=30))
def test_string_escape_round_trip(value):
    assert decode_string(encode_string(value)) == value


idents = st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,6}", fullmatch=True)
scalars = st.one_of(
    st.integers(-10**6, 10**6),
    st.text(alphabet="ab \"\\\n1.", max_size=8),
    idents,
)


@st.composite
def trees(draw, depth=0):
    params = draw(st.dictionaries(idents.filter(lambda k: k != "id"), scalars, max_size=3))
    children = [] if depth >= 3 else draw(st.lists(trees(depth=depth + 1), max_size=3))
    kind = draw(idents.filter(lambda k: k not in ("Block", "state", "transition", "data")))
    return RawNode(kind, params, children)


@settings(max_examples=200)
@given(trees())
def test_round_trip_property(tree):
    root = RawNode("Model", tree.params, tree.children)
    assert parse(print_document(root)).structurally_equal(root)
