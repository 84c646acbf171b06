import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfci.conformance import (
    ConformanceReport,
    ObjectiveStatus,
    Verdict,
    Violation,
    ViolationKind,
    check_objectives,
    check_trace,
    dumps_trace,
    loads_trace,
    oracle_check,
)
from dfci.core.errors import CapExceeded, ProtocolMismatch, TraceFormatError
from dfci.msc import And, Eventually, Fragment, Lifeline, MessageSpec, MscDocument, ObjectiveSpec, Or, Responds
from dfci.protocols import golden_trace_path
from tests.strategies import oracle_cases, trace_from_labels


def _renumber(events):
    return [event.model_copy(update={"seq": n}) for n, event in enumerate(events)]


def _without(events, *msg_ids):
    return _renumber([e for e in events if e.msg_id not in msg_ids])


def _labels(*pairs):
    return [(msg_id, kind) for msg_id, kind in pairs]


@pytest.fixture
def pair_doc():
    lifelines = tuple(Lifeline(id=l) for l in ("A", "B", "C", "D"))
    return MscDocument(name="P", lifelines=lifelines, body=(
        MessageSpec(msg_id="1", sender="A", receiver="B", label="one"),
        MessageSpec(msg_id="2", sender="C", receiver="D", label="two"),
    ))


def test_golden_investigation_is_conformant(investigation_doc, golden_trace):
    report = check_trace(investigation_doc, golden_trace("investigation"))
    assert report.verdict is Verdict.CONFORMANT
    assert report.violations == ()


def test_optional_message_may_be_absent(investigation_doc, golden_trace):
    trace = _without(golden_trace("investigation"), "6")
    assert check_trace(investigation_doc, trace).conformant


def test_empty_trace_misses_first_message(investigation_doc):
    report = check_trace(investigation_doc, [])
    assert report.verdict is Verdict.NONCONFORMANT
    assert report.violations[0].kind is ViolationKind.MISSING_MESSAGE
    assert report.violations[0].msg_id == "1"
    assert report.violations[0].seq == "end"


def test_report_ten_before_eight(investigation_doc, golden_trace):
    events = golden_trace("investigation")
    ten = [e for e in events if e.msg_id == "10"]
    rest = [e for e in events if e.msg_id != "10"]
    position = next(n for n, e in enumerate(rest) if e.msg_id == "8")
    report = check_trace(investigation_doc, _renumber(rest[:position] + ten + rest[position:]))
    assert ViolationKind.ORDER_VIOLATION in report.kinds()
    violation = next(v for v in report.violations if v.kind is ViolationKind.ORDER_VIOLATION)
    assert violation.msg_id == "10"


def test_dropping_mandatory_message(investigation_doc, golden_trace):
    report = check_trace(investigation_doc, _without(golden_trace("investigation"), "10"))
    assert [(v.kind, v.msg_id) for v in report.violations] == [(ViolationKind.MISSING_MESSAGE, "10")]


def test_prefix_mode(investigation_doc, golden_trace):
    prefix = golden_trace("investigation")[:8]
    assert check_trace(investigation_doc, prefix, prefix=True).conformant
    assert not check_trace(investigation_doc, prefix).conformant


def test_independent_messages_interleave(pair_doc):
    crossed = trace_from_labels(pair_doc, _labels(("1", "send"), ("2", "send"), ("2", "recv"), ("1", "recv")))
    assert check_trace(pair_doc, crossed).conformant
    assert oracle_check(pair_doc, crossed) is Verdict.CONFORMANT


def test_receive_before_send(pair_doc):
    trace = trace_from_labels(pair_doc, _labels(("1", "recv"), ("1", "send"), ("2", "send"), ("2", "recv")))
    report = check_trace(pair_doc, trace)
    assert ViolationKind.RECV_BEFORE_SEND in report.kinds()
    assert oracle_check(pair_doc, trace) is Verdict.NONCONFORMANT


def test_unknown_message_and_lifeline_mismatch(pair_doc):
    trace = trace_from_labels(pair_doc, _labels(("1", "send"), ("1", "recv"), ("2", "send"), ("2", "recv")))
    trace.append(trace[0].model_copy(update={"seq": 4, "msg_id": "99"}))
    trace.append(trace[2].model_copy(update={"seq": 5, "sender": "B"}))
    kinds = check_trace(pair_doc, trace).kinds()
    assert {ViolationKind.UNKNOWN_MESSAGE, ViolationKind.LIFELINE_MISMATCH} <= kinds


def test_loop_bound_exceeded():
    doc = MscDocument(name="P", lifelines=(Lifeline(id="A"), Lifeline(id="B")), body=(
        Fragment.loop(MessageSpec(msg_id="1", sender="A", receiver="B", label="x"), min_iter=1, max_iter=1),
    ))
    trace = trace_from_labels(doc, _labels(("1", "send"), ("1", "recv"), ("1", "send"), ("1", "recv")))
    report = check_trace(doc, trace)
    assert ViolationKind.LOOP_BOUND_EXCEEDED in report.kinds()
    assert oracle_check(doc, trace) is Verdict.NONCONFORMANT


def test_loop_iterations_are_shared_between_lifelines():
    doc = MscDocument(name="P", lifelines=tuple(Lifeline(id=l) for l in "ABC"), body=(
        Fragment.loop(
            MessageSpec(msg_id="1", sender="A", receiver="B", label="x"),
            MessageSpec(msg_id="2", sender="B", receiver="C", label="y"),
            min_iter=1, max_iter=2,
        ),
    ))
    two_rounds = _labels(("1", "send"), ("1", "recv"), ("2", "send"), ("2", "recv"),
                         ("1", "send"), ("1", "recv"), ("2", "send"), ("2", "recv"))
    assert check_trace(doc, trace_from_labels(doc, two_rounds)).conformant
    # C no puede cerrar el loop tras una sola vuelta si A y B dieron dos
    short = two_rounds[:6]
    report = check_trace(doc, trace_from_labels(doc, short))
    assert [v.kind for v in report.violations] == [ViolationKind.MISSING_MESSAGE]
    assert report.violations[0].msg_id == "2"


def test_protocol_mismatch(investigation_doc, golden_trace):
    with pytest.raises(ProtocolMismatch):
        check_trace(investigation_doc, golden_trace("init"))


def test_report_keeps_first_violation_per_kind():
    violations = [
        Violation(kind=ViolationKind.UNKNOWN_MESSAGE, msg_id="9", seq=5, explanation="b"),
        Violation(kind=ViolationKind.MISSING_MESSAGE, msg_id="1", seq="end", explanation="c"),
        Violation(kind=ViolationKind.UNKNOWN_MESSAGE, msg_id="8", seq=2, explanation="a"),
    ]
    report = ConformanceReport.of(violations)
    assert [(v.kind, v.seq) for v in report.violations] == [
        (ViolationKind.UNKNOWN_MESSAGE, 2),
        (ViolationKind.MISSING_MESSAGE, "end"),
    ]
    assert ConformanceReport.of([]).verdict is Verdict.CONFORMANT


@settings(max_examples=500)
@given(oracle_cases())
def test_checker_agrees_with_oracle(case):
    doc, trace = case
    assert check_trace(doc, trace).verdict is oracle_check(doc, trace)


def test_oracle_needs_bounded_loops(investigation_doc, golden_trace):
    with pytest.raises(CapExceeded):
        oracle_check(investigation_doc, golden_trace("investigation"))


def test_golden_init_oracle(init_doc, golden_trace):
    assert oracle_check(init_doc, golden_trace("init")) is Verdict.CONFORMANT


# Objetivos

def test_warrant_objective(init_doc, golden_trace):
    report = check_objectives(init_doc, golden_trace("init"))
    result = report.result("suspect_has_warrant")
    assert result.status is ObjectiveStatus.SATISFIED
    assert result.witness == 9


def test_sentence_objectives(trial_doc, golden_trace):
    report = check_objectives(trial_doc, golden_trace("trial"))
    assert report.all_satisfied
    assert report.result("sentence_delivered").witness == 21


def test_empty_trace_violates_eventually(init_doc, investigation_doc, trial_doc):
    for doc in (init_doc, investigation_doc, trial_doc):
        report = check_objectives(doc, [])
        assert not any(r.satisfied for r in report.results)
    missing = check_objectives(init_doc, []).result("suspect_has_warrant").missing
    assert missing == ("8",)


def test_unanswered_request_breaks_fair_process(trial_doc, golden_trace):
    trace = _without(golden_trace("trial"), "4")
    report = check_objectives(trial_doc, trace)
    fair = report.result("fair_process")
    assert fair.status is ObjectiveStatus.VIOLATED
    assert "4" in fair.missing
    assert report.result("sentence_delivered").satisfied


def test_responds_matches_each_request():
    lifelines = (Lifeline(id="A"), Lifeline(id="B"))
    doc = MscDocument(
        name="P",
        lifelines=lifelines,
        body=(Fragment.loop(
            MessageSpec(msg_id="1", sender="A", receiver="B", label="q"),
            Fragment.opt(MessageSpec(msg_id="2", sender="B", receiver="A", label="a")),
            min_iter=1, max_iter=3,
        ),),
        objectives=(
            ObjectiveSpec(id="answered", predicate=Responds(request="1", answer="2")),
            ObjectiveSpec(id="either", predicate=Or(left=Eventually(msg_id="2"), right=Eventually(msg_id="1"))),
        ),
    )
    one_answer = _labels(("1", "send"), ("1", "recv"), ("2", "send"), ("2", "recv"),
                         ("1", "send"), ("1", "recv"))
    report = check_objectives(doc, trace_from_labels(doc, one_answer))
    assert report.result("answered").status is ObjectiveStatus.VIOLATED
    assert report.result("either").satisfied
    assert report.result("either").witness == 1


# Formato JSONL

def test_golden_trace_text_round_trips():
    text = golden_trace_path("case").read_text(encoding="utf-8")
    assert dumps_trace(loads_trace(text)) == text


def test_trace_format_errors():
    lines = golden_trace_path("init").read_text(encoding="utf-8").splitlines()
    with pytest.raises(TraceFormatError):
        loads_trace("\n".join([lines[1], lines[0]]))
    with pytest.raises(TraceFormatError):
        loads_trace(lines[0].replace('"payload_digest":"', '"payload_digest":"zz'))
    with pytest.raises(TraceFormatError):
        loads_trace('{"seq": 0}')


def test_timestamp_requires_utc_offset():
    line = golden_trace_path("init").read_text(encoding="utf-8").splitlines()[0]
    with pytest.raises(TraceFormatError):
        loads_trace(line.replace('00:00Z"', '00:00"', 1))
    assert loads_trace(line.replace('00:00Z"', '00:00+02:00"', 1))[0].ts.endswith("+02:00")


def _eventually_predicates(msg_ids):
    return st.recursive(
        st.builds(Eventually, msg_id=st.sampled_from(msg_ids)),
        lambda inner: st.builds(And, left=inner, right=inner) | st.builds(Or, left=inner, right=inner),
        max_leaves=4,
    )


@settings(max_examples=100)
@given(case=oracle_cases(), data=st.data())
def test_eventually_objectives_ignore_event_order(case, data):
    doc, trace = case
    objectives = tuple(
        ObjectiveSpec(id=f"o{n}", predicate=data.draw(_eventually_predicates(doc.msg_ids())))
        for n in range(2)
    )
    doc = doc.model_copy(update={"objectives": objectives})
    shuffled = _renumber(data.draw(st.permutations(trace)))
    before = check_objectives(doc, trace)
    after = check_objectives(doc, shuffled)
    assert [(r.status, r.missing) for r in before.results] == [(r.status, r.missing) for r in after.results]
