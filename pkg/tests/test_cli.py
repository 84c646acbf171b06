import json

import pytest

from dfci.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, parse_kinds, parse_seeds, run
from dfci.core.errors import ConfigOutOfBounds
from dfci.protocols import golden_ledger_path, golden_trace_path, model_path
from dfci.sim import FaultKind


def _golden(name: str) -> str:
    return str(golden_trace_path(name))


def test_check_golden(capsys):
    assert run(["check", "--msc", "builtin:investigation", "--trace", _golden("investigation")]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "conformant"
    assert "  evidence_set_obtained: satisfied (seq 19)" in out.splitlines()


def test_check_empty_trace(capsys, tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("", encoding="utf-8")
    assert run(["check", "--msc", "builtin:investigation", "--trace", str(empty)]) == EXIT_VIOLATION
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "nonconformant"
    assert "  MissingMessage 1 at end:" in out


def test_check_prefix_ignores_objectives(capsys, tmp_path):
    lines = golden_trace_path("init").read_text(encoding="utf-8").splitlines(keepends=True)
    prefix = tmp_path / "prefix.jsonl"
    prefix.write_text("".join(lines[:4]), encoding="utf-8")
    assert run(["check", "--msc", "builtin:init", "--trace", str(prefix), "--prefix"]) == EXIT_OK
    assert run(["check", "--msc", "builtin:init", "--trace", str(prefix)]) == EXIT_VIOLATION


def test_check_json(capsys):
    assert run(["check", "--msc", "builtin:trial", "--trace", _golden("trial"), "--json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["conformance"]["verdict"] == "conformant"
    assert [r["id"] for r in data["objectives"]["results"]] == ["sentence_delivered", "fair_process"]


def test_check_protocol_mismatch(capsys):
    assert run(["check", "--msc", "builtin:trial", "--trace", _golden("init")]) == EXIT_USAGE
    assert capsys.readouterr().err.startswith("error: ")


def test_color_output(capsys, monkeypatch):
    monkeypatch.setenv("DFCI_COLOR", "1")
    run(["check", "--msc", "builtin:init", "--trace", _golden("init")])
    assert "\033[32mconformant\033[0m" in capsys.readouterr().out


def test_parse_prints_canonical_form(capsys):
    assert run(["parse", str(model_path("trial"))]) == EXIT_OK
    assert capsys.readouterr().out == model_path("trial").read_text(encoding="utf-8")


def test_parse_reports_position(capsys, tmp_path):
    source = tmp_path / "bad.msc"
    source.write_text('protocol P {\n  actors A, B;\n  msg 1 A -> A: "x";\n}\n', encoding="utf-8")
    assert run(["parse", str(source)]) == EXIT_USAGE
    assert capsys.readouterr().err.startswith("error: 3:14: ")


def test_missing_file(capsys, tmp_path):
    assert run(["parse", str(tmp_path / "nope.msc")]) == EXIT_USAGE
    assert "nope.msc" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    [],
    ["explode"],
    ["check", "--msc", "builtin:init"],
    ["render", "--msc", "builtin:init", "--format", "svg"],
    ["simulate", "--msc", "builtin:init", "--seed", "1", "--opt", "sometimes"],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == EXIT_USAGE


def test_help_exits_cleanly(capsys):
    assert run(["--help"]) == EXIT_OK
    assert "simulate" in capsys.readouterr().out


def test_render(capsys):
    assert run(["render", "--msc", "builtin:trial"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("msc trial")
    assert "== scene: court ==" in out
    assert run(["render", "--msc", "builtin:init", "--format", "dot"]) == EXIT_OK
    assert capsys.readouterr().out.startswith('digraph "init" {')


def test_simulate_reproduces_golden_case(capsys, tmp_path):
    out, ledger = tmp_path / "case.jsonl", tmp_path / "case.custody.json"
    argv = ["simulate", "--msc", "builtin:case", "--seed", "7", "--out", str(out), "--ledger", str(ledger)]
    assert run(argv) == EXIT_OK
    assert out.read_text(encoding="utf-8") == golden_trace_path("case").read_text(encoding="utf-8")
    assert ledger.read_text(encoding="utf-8") == golden_ledger_path("case").read_text(encoding="utf-8")


def test_simulate_to_stdout_with_fault(capsys):
    argv = ["simulate", "--msc", "builtin:init", "--seed", "1", "--fault", "drop:msg=8,p=1"]
    assert run(argv) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 8
    assert all('"msg_id":"8"' not in line for line in lines)


def test_simulate_rejects_bad_configuration(capsys):
    assert run(["simulate", "--msc", "builtin:init", "--seed", "-1"]) == EXIT_USAGE
    assert run(["simulate", "--msc", "builtin:init", "--seed", "1", "--fault", "drop:p=1"]) == EXIT_USAGE
    assert run(["simulate", "--msc", "builtin:init", "--seed", "1", "--fault", "drop:msg=42"]) == EXIT_USAGE


def test_custody_verify(capsys, tmp_path):
    ledger = golden_ledger_path("case")
    assert run(["custody", "verify", "--ledger", str(ledger)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "valid"

    entries = json.loads(ledger.read_text(encoding="utf-8"))
    entries[2]["actor"] = "Mallory"
    tampered = tmp_path / "case.custody.json"
    tampered.write_text(json.dumps(entries, indent=2), encoding="utf-8")
    assert run(["custody", "verify", "--ledger", str(tampered), "--json"]) == EXIT_VIOLATION
    result = json.loads(capsys.readouterr().out)
    assert (result["valid"], result["index"], result["check"]) == (False, 2, "entry_hash")

    assert run(["custody", "coverage", "--msc", "builtin:case", "--trace", _golden("case"),
                "--ledger", str(tampered)]) == EXIT_VIOLATION


def test_custody_coverage(capsys):
    argv = ["custody", "coverage", "--msc", "builtin:case", "--trace", _golden("case"),
            "--ledger", str(golden_ledger_path("case"))]
    assert run(argv) == EXIT_OK
    assert capsys.readouterr().out.strip() == "covered"


def test_custody_coverage_rejects_naive_timestamps(capsys, tmp_path):
    naive = tmp_path / "naive.jsonl"
    naive.write_text(golden_trace_path("case").read_text(encoding="utf-8").replace(":00Z\"", ":00\""),
                     encoding="utf-8")
    argv = ["custody", "coverage", "--msc", "builtin:case", "--trace", str(naive),
            "--ledger", str(golden_ledger_path("case"))]
    assert run(argv) == EXIT_USAGE
    assert "desplazamiento horario" in capsys.readouterr().err


def test_adversary(capsys):
    assert run(["adversary", "--msc", "builtin:init", "--kinds", "drop", "--seeds", "1..2", "--json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert len(data["rows"]) == 10
    assert run(["adversary", "--msc", "builtin:init", "--kinds", "drop"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0].split()[0] == "msg_id"


def test_seed_and_kind_lists():
    assert parse_seeds("1..3") == [1, 2, 3]
    assert parse_seeds("4,9") == [4, 9]
    assert parse_kinds("drop, tamper") == [FaultKind.DROP, FaultKind.TAMPER]
    with pytest.raises(ConfigOutOfBounds):
        parse_seeds("3..1")
    with pytest.raises(ConfigOutOfBounds):
        parse_seeds("a,b")
    with pytest.raises(ConfigOutOfBounds):
        parse_kinds("drop,explode")
