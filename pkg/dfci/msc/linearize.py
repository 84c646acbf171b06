"""Enumeración exhaustiva de linealizaciones (oráculo para gráficos pequeños)"""
from __future__ import annotations

from typing import Iterator, Optional, Sequence

from dfci.core.config import settings
from dfci.core.errors import CapExceeded
from dfci.msc.graph import Event, EventGraph, FragmentExpansion, expand


def _check_size(graph: EventGraph) -> None:
    if len(graph.events) > settings.ORACLE_MAX_EVENTS:
        raise CapExceeded(
            f"{len(graph.events)} eventos expandidos; el oráculo admite como máximo {settings.ORACLE_MAX_EVENTS}"
        )


def iter_linearizations(
    graph: EventGraph,
    labels: Optional[Sequence[tuple[str, str]]] = None,
) -> Iterator[tuple[Event, ...]]:
    """
    Genera los órdenes totales que extienden `graph.order`, con vuelta atrás
    sobre los eventos de grado de entrada cero. Si se dan `labels`
    (pares msg_id, kind), solo se exploran las ramas que los respetan.
    """
    preds = graph.predecessors()
    indegree = {event: len(before) for event, before in preds.items()}
    successors: dict[Event, list[Event]] = {event: [] for event in graph.events}
    for a, b in graph.order:
        successors[a].append(b)
    done: set[Event] = set()
    path: list[Event] = []
    total = len(graph.events)

    def recurse():
        if len(path) == total:
            yield tuple(path)
            return
        step = len(path)
        for event in graph.events:
            if event in done or indegree[event]:
                continue
            if labels is not None and event.label != tuple(labels[step]):
                continue
            for nxt in successors[event]:
                indegree[nxt] -= 1
            done.add(event)
            path.append(event)
            yield from recurse()
            path.pop()
            done.discard(event)
            for nxt in successors[event]:
                indegree[nxt] += 1

    if labels is not None and len(labels) != total:
        return
    yield from recurse()


def linearizations(graph: EventGraph, expansion: FragmentExpansion, cap: int) -> set[tuple[Event, ...]]:
    """
    Conjunto exacto de órdenes totales del grafo expandido.
    Lanza CapExceeded si hay más de `cap`.
    """
    expanded = expand(graph, expansion)
    _check_size(expanded)
    result: set[tuple[Event, ...]] = set()
    for sequence in iter_linearizations(expanded):
        result.add(sequence)
        if len(result) > cap:
            raise CapExceeded(f"más de {cap} linealizaciones")
    return result
