"""Trazas de eventos en formato JSON Lines"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, Sequence

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from dfci.core.config import settings
from dfci.core.errors import ProtocolMismatch, TraceFormatError
from dfci.core.timestamps import parse_timestamp
from dfci.msc.graph import EventKind

logger = logging.getLogger(__name__)

DIGEST_PATTERN = r"^[0-9a-f]{64}$"


class TraceEvent(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    seq: int = Field(ge=0)
    ts: str = settings.BASE_TS
    protocol: str
    msg_id: str
    kind: EventKind
    sender: str = Field(alias="from")
    receiver: str = Field(alias="to")
    payload_digest: str = Field(pattern=DIGEST_PATTERN)
    meta: dict[str, str] = Field(default_factory=dict)

    @field_validator("ts")
    @classmethod
    def _iso_timestamp(cls, value: str) -> str:
        parse_timestamp(value)
        return value

    @property
    def lifeline(self) -> str:
        """Lifeline en la que ocurre el evento"""
        return self.sender if self.kind is EventKind.SEND else self.receiver

    @property
    def label(self) -> tuple[str, str]:
        return self.msg_id, self.kind.value

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True)


def ordered(trace: Iterable[TraceEvent]) -> list[TraceEvent]:
    return sorted(trace, key=lambda e: e.seq)


def require_protocol(name: str, trace: Sequence[TraceEvent]) -> None:
    for event in trace:
        if event.protocol != name:
            raise ProtocolMismatch(
                f"el evento seq={event.seq} pertenece al protocolo '{event.protocol}', no a '{name}'"
            )


def loads_trace(text: str) -> list[TraceEvent]:
    """Lee una traza JSONL; seq debe ser estrictamente creciente"""
    events: list[TraceEvent] = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            event = TraceEvent.model_validate_json(line)
        except ValidationError as exc:
            raise TraceFormatError(f"línea {number}: evento no válido: {exc.errors()[0]['msg']}") from exc
        if events and event.seq <= events[-1].seq:
            raise TraceFormatError(f"línea {number}: seq {event.seq} no es creciente")
        events.append(event)
    return events


def dumps_trace(trace: Iterable[TraceEvent]) -> str:
    return "".join(event.to_json() + "\n" for event in trace)


def load_trace(path: Path | str) -> list[TraceEvent]:
    events = loads_trace(Path(path).read_text(encoding="utf-8"))
    logger.info("Traza %s cargada: %d eventos", path, len(events))
    return events


def dump_trace(trace: Iterable[TraceEvent], path: Path | str) -> None:
    Path(path).write_text(dumps_trace(trace), encoding="utf-8")
