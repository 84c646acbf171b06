"""Oráculo de fuerza bruta: enumera expansiones y linealizaciones"""
from __future__ import annotations

import logging
from typing import Sequence

from dfci.conformance.checker import Verdict
from dfci.conformance.trace import TraceEvent, ordered, require_protocol
from dfci.core.config import settings
from dfci.core.errors import CapExceeded
from dfci.msc.graph import compile, enumerate_expansions, expand
from dfci.msc.linearize import _check_size, iter_linearizations
from dfci.msc.model import MscDocument

logger = logging.getLogger(__name__)


def oracle_check(doc: MscDocument, trace: Sequence[TraceEvent]) -> Verdict:
    """
    Conformante si la secuencia (msg_id, kind) de la traza es linealización de
    alguna expansión. Solo para documentos pequeños con loops acotados.
    """
    events = ordered(trace)
    require_protocol(doc.name, events)
    graph = compile(doc)
    for fid, fragment in doc.fragments():
        if fragment.is_loop and fragment.max_iter is None:
            raise CapExceeded(f"{fid}: el oráculo necesita loops con cota superior")

    labels = [event.label for event in events]
    for n, expansion in enumerate(enumerate_expansions(doc)):
        if n >= settings.ORACLE_EXPANSION_CAP:
            raise CapExceeded(f"más de {settings.ORACLE_EXPANSION_CAP} expansiones")
        expanded = expand(graph, expansion)
        if len(expanded.events) != len(labels):
            continue
        _check_size(expanded)
        if next(iter_linearizations(expanded, labels), None) is not None:
            logger.debug("Oráculo: traza aceptada por la expansión %d", n)
            return Verdict.CONFORMANT
    return Verdict.NONCONFORMANT
