"""Modelos DFCI incorporados, accesibles por nombre o mediante URIs builtin:"""
from pathlib import Path
from typing import Callable

from dfci.core.errors import UnknownBuiltin
from dfci.dsl.parser import parse_file
from dfci.msc.model import MscDocument
from dfci.protocols.builtin import protocol_init, protocol_investigation, protocol_trial
from dfci.protocols.case import DfciCase, compose_case

BUILTIN_PREFIX = "builtin:"
PACKAGE_DIR = Path(__file__).resolve().parent
MODELS_DIR = PACKAGE_DIR / "models"
GOLDEN_DIR = PACKAGE_DIR / "golden"

BUILTINS: dict[str, Callable[[], MscDocument]] = {
    "init": protocol_init,
    "investigation": protocol_investigation,
    "trial": protocol_trial,
    "case": lambda: compose_case().composition,
}

# Documentos que se distribuyen también como fuente .msc
SHIPPED_MODELS = ("init", "investigation", "trial")


def builtin_document(name: str) -> MscDocument:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise UnknownBuiltin(f"modelo incorporado desconocido: {name} (disponibles: {', '.join(BUILTINS)})") from None


def resolve_document(reference: str) -> MscDocument:
    """`builtin:<nombre>` o ruta a un fichero .msc"""
    if reference.startswith(BUILTIN_PREFIX):
        return builtin_document(reference[len(BUILTIN_PREFIX):])
    return parse_file(reference)


def model_path(name: str) -> Path:
    return MODELS_DIR / f"{name}.msc"


def golden_trace_path(name: str) -> Path:
    return GOLDEN_DIR / f"{name}.jsonl"


def golden_ledger_path(name: str = "case") -> Path:
    return GOLDEN_DIR / f"{name}.custody.json"


__all__ = [
    'BUILTINS', 'SHIPPED_MODELS', 'DfciCase', 'UnknownBuiltin', 'builtin_document', 'compose_case',
    'golden_ledger_path', 'golden_trace_path', 'model_path', 'protocol_init',
    'protocol_investigation', 'protocol_trial', 'resolve_document',
]
