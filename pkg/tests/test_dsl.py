import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfci.dsl import ParseError, parse, render, render_ascii, render_dot, serialize
from dfci.msc import Modality
from dfci.protocols import model_path
from tests.strategies import documents

MINIMAL = 'protocol P { actors A, B; msg 1 A -> B: "hi"; }'

MINIMAL_CANONICAL = (
    "protocol P {\n"
    "  actors A, B;\n"
    '  msg 1 A -> B: "hi";\n'
    "}\n"
)


def test_parse_minimal():
    doc = parse(MINIMAL)
    assert [l.id for l in doc.lifelines] == ["A", "B"]
    assert doc.mandatory_msg_ids() == ["1"]
    assert doc.message("1").label == "hi"


def test_parse_investigation_source():
    doc = parse(model_path("investigation").read_text(encoding="utf-8"))
    assert doc.msg_ids() == [str(n) for n in range(1, 11)]
    assert doc.message("6").modality is Modality.OPTIONAL
    assert doc.custody_span == ("5", "10")


def test_parse_extended_syntax():
    source = """
    # comentario
    protocol P {
      actors A: "Actor \\"A\\"" role "investigator", B;
      alias Bee = B;
      objective reach "B is reached": eventually(1) or responds(1, 2) and conformant;
      msg 1 A -> Bee: "first" [opt phase=Collection];
      loop (0..2) {
        msg 2 B -> A: "second";
      }
      note "end";
    }
    """
    doc = parse(source)
    assert doc.lifelines[0].display_name == 'Actor "A"'
    assert doc.lifelines[0].role == "investigator"
    assert doc.canonical("Bee") == "B"
    assert doc.message("1").optional
    fragment = doc.fragments()[0][1]
    assert (fragment.min_iter, fragment.max_iter) == (0, 2)
    assert type(doc.objective("reach").predicate).__name__ == "Or"


def test_parse_crlf():
    assert parse(MINIMAL.replace(" ", "\r\n", 3)) == parse(MINIMAL)


def test_self_message_points_at_receiver():
    source = 'protocol P {\n  actors A, B;\n  msg 1 A -> A: "x";\n}\n'
    with pytest.raises(ParseError) as info:
        parse(source)
    err = info.value
    assert err.category == "SelfMessage"
    assert (err.span.line, err.span.column) == (3, 14)
    assert err.found == "A"


def test_unresolved_objective_points_at_reference():
    source = 'protocol P {\n  actors A, B;\n  objective o: eventually(99);\n  msg 1 A -> B: "x";\n}\n'
    with pytest.raises(ParseError) as info:
        parse(source)
    err = info.value
    assert err.category == "UnresolvedReference"
    assert (err.span.line, err.span.column, err.span.length) == (3, 27, 2)
    assert "99" in err.message


def test_syntax_error_reports_expected_tokens():
    with pytest.raises(ParseError) as info:
        parse('protocol P { actors A, B; msg 1 A B: "x"; }')
    err = info.value
    assert err.found == "B"
    assert (err.span.line, err.span.column) == (1, 35)
    assert "'->'" in err.expected
    assert "'B'" in err.message
    assert str(err).startswith("1:35: ")


def test_syntax_error_at_end_of_input():
    source = "protocol P { actors A, B;\n\n"
    with pytest.raises(ParseError) as info:
        parse(source)
    err = info.value
    assert err.found == "<EOF>"
    assert (err.span.line, err.span.column) == (1, len("protocol P { actors A, B;") + 1)


def test_unexpected_character():
    with pytest.raises(ParseError) as info:
        parse('protocol P { actors A, B; msg 1 A -> B: "x"; } @')
    assert info.value.found == "@"


def test_serialize_minimal_is_canonical():
    assert serialize(parse(MINIMAL)) == MINIMAL_CANONICAL


def test_serialize_trial_messages(trial_doc):
    text = serialize(trial_doc)
    assert '    msg 2a Prosecutor -> Judge: "charge proof" [phase=Presentation];' in text.splitlines()
    assert '    msg 2b Defendant -> Judge: "defence proof" [phase=Presentation];' in text.splitlines()


@settings(max_examples=500)
@given(documents())
def test_round_trip(doc):
    text = serialize(doc)
    parsed = parse(text)
    assert parsed == doc
    assert serialize(parsed) == text


def test_render_ascii_single_message():
    rows = render_ascii(parse(MINIMAL)).splitlines()
    assert rows[0] == "msc P"
    assert sum(bool(re.search(r"\|-+1-+>\|\s+hi$", row)) for row in rows) == 1


def test_render_ascii_backwards_and_optional(investigation_doc):
    rows = render_ascii(investigation_doc).splitlines()
    assert any(re.search(r"\|<-+6\?-+\|", row) for row in rows)
    assert any(re.search(r"\|-+8-+>\|", row) for row in rows)
    assert any(row.startswith("~ loop F0 (1..*)") for row in rows)
    assert "== scene: Digital Forensics Laboratory ==" in rows


def test_render_ascii_trial_scene_before_loop(trial_doc):
    rows = render_ascii(trial_doc).splitlines()
    scene = rows.index("== scene: court ==")
    charge = next(n for n, row in enumerate(rows) if re.search(r"-2a-+>", row))
    defence = next(n for n, row in enumerate(rows) if re.search(r"-2b-+>", row))
    assert scene < charge < defence


def test_render_dot(init_doc):
    text = render_dot(init_doc)
    assert text.startswith('digraph "init" {')
    assert 'label="7: notify of investigation"' in text
    assert '"Prosecutor_4" -> "Suspect_4"' in text
    assert text.rstrip().endswith("}")


def test_render_unknown_format(init_doc):
    assert render(init_doc, "dot") == render_dot(init_doc)
    with pytest.raises(ValueError):
        render(init_doc, "svg")


@settings(max_examples=100)
@given(doc=documents(), data=st.data())
def test_illegal_character_is_located_on_its_line(doc, data):
    lines = serialize(doc).split("\n")
    line = data.draw(st.integers(1, len(lines) - 1))
    lines[line - 1] = "@" + lines[line - 1]
    with pytest.raises(ParseError) as info:
        parse("\n".join(lines))
    assert info.value.span.line == line
    assert info.value.found == "@"


@settings(max_examples=100)
@given(doc=documents())
def test_render_never_fails(doc):
    text = render_ascii(doc)
    assert text.startswith(f"msc {doc.name}\n")
    assert render_dot(doc).rstrip().endswith("}")
