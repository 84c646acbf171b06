import itertools
from graphlib import TopologicalSorter

import pytest
from hypothesis import given, settings

from dfci.core.errors import ExpansionOutOfBounds, InvalidDocument, UnresolvedReference
from dfci.msc import (
    Event,
    EventKind,
    Eventually,
    Fragment,
    IssueCategory,
    Lifeline,
    MessageSpec,
    Modality,
    MscDocument,
    ObjectiveSpec,
    compile,
    enumerate_expansions,
    flatten,
    linearizations,
    uniform_expansion,
    validate_document,
)
from dfci.msc.model import token_from_label
from tests.strategies import documents


def _doc(*body, lifelines=("A", "B", "C"), **extra):
    return MscDocument(name="P", lifelines=tuple(Lifeline(id=l) for l in lifelines), body=body, **extra)


def _msg(msg_id, sender, receiver, optional=False):
    return MessageSpec(msg_id=msg_id, sender=sender, receiver=receiver, label=f"m{msg_id}",
                       modality=Modality.OPTIONAL if optional else Modality.MANDATORY)


def independent(k: int) -> MscDocument:
    lifelines = tuple(f"L{n}" for n in range(2 * k))
    body = tuple(_msg(str(n + 1), f"L{2 * n}", f"L{2 * n + 1}") for n in range(k))
    return _doc(*body, lifelines=lifelines)


def test_token_from_label():
    assert token_from_label("DF Expert") == "DFExpert"
    assert token_from_label("Fiscalía") == "Fiscalia"
    assert token_from_label("3rd party") == "L3rdparty"


def test_compile_single_message():
    graph = compile(_doc(_msg("1", "A", "B")))
    assert len(graph.events) == 2
    send, recv = graph.events
    assert (send.kind, recv.kind) == (EventKind.SEND, EventKind.RECV)
    assert graph.order == frozenset({(send, recv)})


def test_compile_chain_is_total():
    doc = _doc(_msg("1", "A", "B"), _msg("2", "B", "C"))
    graph = compile(doc)
    labels = [e.label for e in graph.events]
    assert labels == [("1", "send"), ("1", "recv"), ("2", "send"), ("2", "recv")]
    for a, b in zip(graph.events, graph.events[1:]):
        assert graph.precedes(a, b)
    assert len(linearizations(graph, uniform_expansion(doc), cap=10)) == 1


def test_compile_investigation(investigation_doc):
    graph = compile(investigation_doc)
    assert {e.msg_id for e in graph.events} == {str(n) for n in range(1, 11)}
    assert {e.lifeline for e in graph.events} == {"Prosecutor", "Suspect", "DFExpert", "DFTools"}
    assert graph.optionality[next(e for e in graph.events if e.msg_id == "6")] == ("6?",)
    assert graph.optionality[next(e for e in graph.events if e.msg_id == "1")] == ("F0",)


@pytest.mark.parametrize("k, expected", [(1, 1), (2, 6), (3, 90)])
def test_interleaving_counts(k, expected):
    doc = independent(k)
    assert len(linearizations(compile(doc), uniform_expansion(doc), cap=1000)) == expected


def test_linearizations_of_independent_pair_include_crossed_order():
    doc = independent(2)
    orders = linearizations(compile(doc), uniform_expansion(doc), cap=100)
    wanted = (("1", "send"), ("2", "send"), ("2", "recv"), ("1", "recv"))
    assert wanted in {tuple(e.label for e in order) for order in orders}


def test_validate_wellformed_builtins(init_doc, investigation_doc, trial_doc, case_doc):
    for doc in (init_doc, investigation_doc, trial_doc, case_doc):
        assert validate_document(doc) == []


def test_validate_self_message():
    issues = validate_document(_doc(_msg("1", "A", "A")))
    assert [i.category for i in issues] == [IssueCategory.SELF_MESSAGE]
    assert issues[0].location == "message 1"


def test_validate_unresolved_objective():
    doc = _doc(_msg("1", "A", "B"),
               objectives=(ObjectiveSpec(id="o", predicate=Eventually(msg_id="99")),))
    issues = validate_document(doc)
    assert [i.category for i in issues] == [IssueCategory.UNRESOLVED_REFERENCE]
    assert issues[0].ref == "99"


def test_validate_structural_issues():
    doc = _doc(
        _msg("1", "A", "B"),
        _msg("1", "B", "Z"),
        Fragment.loop(_msg("2", "A", "B"), min_iter=3, max_iter=2),
        custody_span=("2", "1"),
    )
    categories = {i.category for i in validate_document(doc)}
    assert categories == {
        IssueCategory.DUPLICATE_MESSAGE,
        IssueCategory.UNRESOLVED_REFERENCE,
        IssueCategory.INVALID_BOUNDS,
        IssueCategory.CUSTODY_ORDER,
    }


def test_empty_fragment_is_reported():
    doc = _doc(_msg("1", "A", "B"), Fragment.opt())
    assert [i.category for i in validate_document(doc)] == [IssueCategory.EMPTY_FRAGMENT]


def test_compile_rejects_invalid_documents():
    with pytest.raises(UnresolvedReference):
        compile(_doc(_msg("1", "A", "Z")))
    with pytest.raises(InvalidDocument):
        compile(_doc(_msg("1", "A", "A")))


def test_mandatory_messages(investigation_doc, trial_doc):
    assert investigation_doc.mandatory_msg_ids() == ["1", "2", "3", "4", "5", "7", "8", "9", "10"]
    assert trial_doc.mandatory_msg_ids() == ["1", "2a", "2b", "9a", "9b"]


def test_scene_annotation(investigation_doc, trial_doc):
    assert investigation_doc.message("7").scene is None
    assert investigation_doc.message("8").scene == "Digital Forensics Laboratory"
    assert trial_doc.message("2a").scene == "court"


def test_uniform_expansion_flattens_loops(trial_doc):
    occurrences = flatten(trial_doc, uniform_expansion(trial_doc, take=True, loops=2))
    assert len(occurrences) == 1 + 2 * 8 + 2
    assert [o.instance for o in occurrences if o.message.msg_id == "2a"] == [0, 1]
    skipped = flatten(trial_doc, uniform_expansion(trial_doc, take=False, loops=1))
    assert [o.message.msg_id for o in skipped] == ["1", "2a", "2b", "9a", "9b"]


def test_flatten_requires_every_choice(investigation_doc):
    with pytest.raises(ExpansionOutOfBounds):
        flatten(investigation_doc, uniform_expansion(_doc(_msg("1", "A", "B"))))


def test_enumerate_expansions_counts():
    doc = _doc(_msg("1", "A", "B", optional=True), Fragment.loop(_msg("2", "B", "C"), min_iter=0, max_iter=2))
    assert len(list(enumerate_expansions(doc))) == 2 * 3


def test_enumerate_expansions_needs_bounded_loops(investigation_doc):
    with pytest.raises(ExpansionOutOfBounds):
        next(enumerate_expansions(investigation_doc))
    assert next(enumerate_expansions(investigation_doc, loop_cap=2)) is not None


@settings(max_examples=150)
@given(doc=documents())
def test_compiled_order_is_a_strict_partial_order(doc):
    graph = compile(doc)
    assert len(list(TopologicalSorter(graph.predecessors()).static_order())) == len(graph.events)
    assert not any((b, a) in graph.order for a, b in graph.order)

    for msg in doc.messages():
        send = Event(msg.msg_id, EventKind.SEND, doc.canonical(msg.sender))
        recv = Event(msg.msg_id, EventKind.RECV, doc.canonical(msg.receiver))
        assert (send, recv) in graph.order

    for lifeline in doc.lifelines:
        for a, b in itertools.combinations(graph.lifeline_events(lifeline.id), 2):
            assert (a, b) in graph.order or (b, a) in graph.order
