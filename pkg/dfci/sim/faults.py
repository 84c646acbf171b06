"""Cirugía de fallos sobre la traza simulada y su registro de custodia"""
from __future__ import annotations

import dataclasses
import hashlib
import logging
from typing import TYPE_CHECKING, Optional, Sequence

from dfci.custody.ledger import CustodyChain
from dfci.msc.graph import EventKind
from dfci.sim.config import FaultKind, FaultRule, FaultSide
from dfci.sim.rng import SeededRandom

if TYPE_CHECKING:
    from dfci.sim.simulator import Emitted, PendingEntry

logger = logging.getLogger(__name__)

MAX_DELAY = 3


def tampered(digest: str) -> str:
    return hashlib.sha256(f"tampered:{digest}".encode("utf-8")).hexdigest()


def _instances(emitted: list["Emitted"], target: str) -> list[int]:
    seen: list[int] = []
    for item in emitted:
        if item.message.msg_id == target and item.instance not in seen:
            seen.append(item.instance)
    return seen


def _recv_index(emitted: list["Emitted"], key: tuple[str, int]) -> Optional[int]:
    for n, item in enumerate(emitted):
        if item.key() == key and item.kind is EventKind.RECV:
            return n
    return None


def _trace_fault(rule: FaultRule, emitted: list["Emitted"], rng: SeededRandom) -> list["Emitted"]:
    for instance in _instances(emitted, rule.target):
        if not rng.chance(rule.probability):
            continue
        key = (rule.target, instance)
        logger.debug("Fallo %s sobre %s#%d", rule.kind.value, rule.target, instance)
        if rule.kind is FaultKind.DROP:
            emitted = [item for item in emitted if item.key() != key]
        elif rule.kind is FaultKind.TAMPER:
            emitted = [
                dataclasses.replace(item, digest=tampered(item.digest)) if item.key() == key else item
                for item in emitted
            ]
        else:
            position = _recv_index(emitted, key)
            if rule.kind is FaultKind.DELAY:
                steps = 1 + rng.below(MAX_DELAY)
                if position is None:
                    continue
                emitted = list(emitted)
                item = emitted.pop(position)
                emitted.insert(min(position + steps, len(emitted)), item)
            elif position is not None:
                emitted = list(emitted)
                original = emitted[position]
                emitted.insert(position + 1, dataclasses.replace(original, meta=dict(original.meta)))
    return emitted


def _ledger_fault(rule: FaultRule, entries: list, plan: Sequence["PendingEntry"], dropped: set[int],
                  rng: SeededRandom) -> list:
    for index, pending in enumerate(plan):
        if pending.occurrence[0] != rule.target or index in dropped:
            continue
        if not rng.chance(rule.probability):
            continue
        logger.debug("Fallo %s sobre la entrada de custodia %d", rule.kind.value, index)
        if rule.kind is FaultKind.DROP:
            dropped.add(index)
        else:
            entry = entries[index]
            entries[index] = entry.model_copy(update={"payload_digest": tampered(entry.payload_digest)})
    return entries


def apply_faults(rules: Sequence[FaultRule], emitted: list["Emitted"], chain: Optional[CustodyChain],
                 plan: Sequence["PendingEntry"], rng: SeededRandom):
    """
    Aplica las reglas en orden, instancia a instancia, consumiendo el
    generador. Las manipulaciones del registro no recalculan hashes.
    """
    entries = list(chain.entries) if chain is not None else []
    dropped: set[int] = set()
    for rule in rules:
        if rule.side is FaultSide.TRACE:
            emitted = _trace_fault(rule, emitted, rng)
        elif chain is not None:
            entries = _ledger_fault(rule, entries, plan, dropped, rng)
    if chain is not None:
        kept = tuple(entry for index, entry in enumerate(entries) if index not in dropped)
        chain = chain.model_copy(update={"entries": kept})
    return emitted, chain
