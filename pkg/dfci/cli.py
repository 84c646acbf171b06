"""Punto de entrada de línea de comandos de dfci.

Códigos de salida: 0 éxito o traza conforme, 1 violación o cadena no
válida, 2 error de uso, de sintaxis o de configuración.
"""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from typing import Optional, Sequence

from dfci.conformance.checker import ConformanceReport, check_trace
from dfci.conformance.objectives import ObjectiveReport, check_objectives
from dfci.conformance.trace import dumps_trace, load_trace
from dfci.core.config import settings
from dfci.core.errors import BrokenChain, ConfigOutOfBounds, DfciError
from dfci.custody.coverage import CoverageReport, check_custody_coverage
from dfci.custody.ledger import VerifyResult, case_id_from_path, dump_chain, load_chain, verify_chain
from dfci.dsl.parser import parse_file
from dfci.dsl.render import render
from dfci.dsl.serializer import serialize
from dfci.protocols import resolve_document
from dfci.sim.adversary import adversary_matrix
from dfci.sim.config import FaultKind, OptPolicy, SimConfig, parse_fault
from dfci.sim.simulator import simulate

logger = logging.getLogger("dfci.cli")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

_GREEN = "\033[32m"
_RED = "\033[31m"
_RESET = "\033[0m"

_SEED_RANGE = re.compile(r"^(\d+)\.\.(\d+)$")


def _paint(text: str, ok: bool) -> str:
    if not settings.color_enabled():
        return text
    return f"{_GREEN if ok else _RED}{text}{_RESET}"


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2, ensure_ascii=False))


def parse_seeds(text: str) -> list[int]:
    """
    Semillas como rango inclusivo o lista.
    Ejemplo: "1..3" -> [1, 2, 3], "4,9" -> [4, 9]
    """
    match = _SEED_RANGE.match(text.strip())
    if match:
        low, high = int(match.group(1)), int(match.group(2))
        if low > high:
            raise ConfigOutOfBounds(f"rango de semillas vacío: {text}")
        return list(range(low, high + 1))
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigOutOfBounds(f"semillas no válidas: {text}") from None


def parse_kinds(text: str) -> list[FaultKind]:
    try:
        return [FaultKind(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigOutOfBounds(f"tipos de fallo no válidos: {text}") from None


# Informes en texto

def format_conformance(report: ConformanceReport) -> list[str]:
    lines = [_paint(report.verdict.value, report.conformant)]
    for violation in report.violations:
        lines.append(f"  {violation.kind.value} {violation.msg_id} at {violation.seq}: {violation.explanation}")
    return lines


def format_objectives(report: ObjectiveReport) -> list[str]:
    lines = ["objectives:"] if report.results else []
    for result in report.results:
        status = _paint(result.status.value, result.satisfied)
        if result.satisfied and result.witness is not None:
            lines.append(f"  {result.id}: {status} (seq {result.witness})")
        elif result.missing:
            lines.append(f"  {result.id}: {status} (missing {', '.join(result.missing)})")
        else:
            lines.append(f"  {result.id}: {status}")
    return lines


def format_verify(result: VerifyResult) -> list[str]:
    if result.valid:
        return [_paint("valid", True)]
    return [f"{_paint('invalid', False)} at entry {result.index} ({result.check.value}): {result.message}"]


def format_coverage(report: CoverageReport) -> list[str]:
    lines = [_paint("covered" if report.covered else "not covered", report.covered)]
    for gap in report.gaps:
        lines.append(f"  {gap.where}: {gap.explanation}")
    return lines


# Subcomandos

def cmd_parse(args) -> int:
    doc = parse_file(args.file)
    sys.stdout.write(serialize(doc))
    return EXIT_OK


def cmd_check(args) -> int:
    doc = resolve_document(args.msc)
    trace = load_trace(args.trace)
    conformance = check_trace(doc, trace, prefix=args.prefix)
    objectives = check_objectives(doc, trace, conformance if not args.prefix else None)
    if args.json:
        _print_json({
            "conformance": conformance.model_dump(mode="json"),
            "objectives": objectives.model_dump(mode="json"),
        })
    else:
        print("\n".join(format_conformance(conformance) + format_objectives(objectives)))
    # Un prefijo aún no tiene por qué cumplir los objetivos
    ok = conformance.conformant and (args.prefix or objectives.all_satisfied)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_simulate(args) -> int:
    doc = resolve_document(args.msc)
    case_id = args.case_id or (case_id_from_path(args.ledger) if args.ledger else None)
    config = SimConfig(
        seed=args.seed,
        loops=args.loops,
        default_opt=OptPolicy(args.opt),
        faults=tuple(parse_fault(text) for text in args.fault),
        case_id=case_id,
    )
    trace, chain = simulate(doc, config)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(dumps_trace(trace))
        logger.info("Traza escrita en %s", args.out)
    else:
        sys.stdout.write(dumps_trace(trace))
    if args.ledger:
        if chain is None:
            logger.warning("El documento %s no declara custodia; no se escribe %s", doc.name, args.ledger)
        else:
            dump_chain(chain, args.ledger)
            logger.info("Registro de custodia escrito en %s", args.ledger)
    return EXIT_OK


def cmd_render(args) -> int:
    doc = resolve_document(args.msc)
    sys.stdout.write(render(doc, args.format))
    return EXIT_OK


def cmd_custody_verify(args) -> int:
    result = verify_chain(load_chain(args.ledger))
    if args.json:
        _print_json(result.model_dump(mode="json"))
    else:
        print("\n".join(format_verify(result)))
    return EXIT_OK if result.valid else EXIT_VIOLATION


def cmd_custody_coverage(args) -> int:
    doc = resolve_document(args.msc)
    trace = load_trace(args.trace)
    chain = load_chain(args.ledger)
    try:
        report = check_custody_coverage(doc, trace, chain)
    except BrokenChain as exc:
        if args.json:
            _print_json({"covered": False, "error": str(exc)})
        else:
            print(f"{_paint('invalid', False)}: {exc}")
        return EXIT_VIOLATION
    if args.json:
        _print_json(report.model_dump(mode="json"))
    else:
        print("\n".join(format_coverage(report)))
    return EXIT_OK if report.covered else EXIT_VIOLATION


def cmd_adversary(args) -> int:
    doc = resolve_document(args.msc)
    report = adversary_matrix(doc, parse_kinds(args.kinds), parse_seeds(args.seeds), include_ledger=args.ledger)
    if args.json:
        sys.stdout.write(report.to_json() + "\n")
    else:
        sys.stdout.write(report.to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dfci", description="Modelos MSC de los protocolos DFCI")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    p = commands.add_parser("parse", help="valida un fichero .msc y muestra su forma canónica")
    p.add_argument("file")
    p.set_defaults(handler=cmd_parse)

    p = commands.add_parser("check", help="conformidad de una traza y objetivos funcionales")
    p.add_argument("--msc", required=True, help="fichero .msc o builtin:<nombre>")
    p.add_argument("--trace", required=True)
    p.add_argument("--prefix", action="store_true", help="acepta prefijos de trazas conformes")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_check)

    p = commands.add_parser("simulate", help="simulación determinista con inyección de fallos")
    p.add_argument("--msc", required=True)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--fault", action="append", default=[], help="kind:msg=ID,p=RAT[,side=ledger]")
    p.add_argument("--out")
    p.add_argument("--ledger")
    p.add_argument("--opt", choices=[policy.value for policy in OptPolicy], default=OptPolicy.TAKE.value)
    p.add_argument("--loops", type=int, default=1)
    p.add_argument("--case-id", dest="case_id")
    p.set_defaults(handler=cmd_simulate)

    p = commands.add_parser("render", help="diagrama ASCII o Graphviz DOT")
    p.add_argument("--msc", required=True)
    p.add_argument("--format", choices=["ascii", "dot"], default="ascii")
    p.set_defaults(handler=cmd_render)

    p = commands.add_parser("custody", help="registro de cadena de custodia")
    custody = p.add_subparsers(dest="custody_command", metavar="action")
    custody.required = True
    v = custody.add_parser("verify", help="comprueba el encadenamiento de hashes")
    v.add_argument("--ledger", required=True)
    v.add_argument("--json", action="store_true")
    v.set_defaults(handler=cmd_custody_verify)
    c = custody.add_parser("coverage", help="cobertura del tramo custodiado de una traza")
    c.add_argument("--msc", required=True)
    c.add_argument("--trace", required=True)
    c.add_argument("--ledger", required=True)
    c.add_argument("--json", action="store_true")
    c.set_defaults(handler=cmd_custody_coverage)

    p = commands.add_parser("adversary", help="matriz de detección de fallos inyectados")
    p.add_argument("--msc", required=True)
    p.add_argument("--kinds", default="drop,tamper")
    p.add_argument("--seeds", default="1..1")
    p.add_argument("--ledger", action="store_true", help="incluye fallos sobre el registro de custodia")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_adversary)
    return parser


def configure_logging() -> None:
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL, logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        stream=sys.stderr,
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.handler(args)
    except (DfciError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    configure_logging()
    sys.exit(run())
