"""Registro de cadena de custodia encadenado por hashes SHA-256"""
from __future__ import annotations

import hashlib
import json
import logging
import re
from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, field_validator

from dfci.core.errors import BrokenChain, InvalidFirstAction, TraceFormatError
from dfci.core.timestamps import parse_timestamp

logger = logging.getLogger(__name__)

GENESIS_HASH = "0" * 64
HEX64 = r"^[0-9a-f]{64}$"
EVIDENCE_ID_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9_.-]*")
LEDGER_SUFFIX = ".custody.json"


class CustodyAction(str, Enum):
    SEIZE = "seize"
    SEAL = "seal"
    TRANSFER = "transfer"
    EXAMINE = "examine"
    PRESENT = "present"


class EntryDraft(BaseModel):
    """Campos de una entrada antes de calcular los hashes"""
    model_config = ConfigDict(frozen=True)

    ts: str
    actor: str
    action: CustodyAction
    evidence_id: str
    payload_digest: str = Field(pattern=HEX64)

    @field_validator("ts")
    @classmethod
    def _iso_timestamp(cls, value: str) -> str:
        parse_timestamp(value)
        return value

    @field_validator("evidence_id")
    @classmethod
    def _evidence_token(cls, value: str) -> str:
        if not EVIDENCE_ID_RE.fullmatch(value):
            raise ValueError(f"evidence_id no válido: {value}")
        return value


class CustodyEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int = Field(ge=0)
    ts: str
    actor: str
    action: CustodyAction
    evidence_id: str
    payload_digest: str
    prev_hash: str
    entry_hash: str

    @field_validator("ts")
    @classmethod
    def _iso_timestamp(cls, value: str) -> str:
        parse_timestamp(value)
        return value

    def canonical(self) -> str:
        return canonical_string(self.index, self.ts, self.actor, self.action, self.evidence_id,
                                self.payload_digest, self.prev_hash)


class CustodyChain(BaseModel):
    model_config = ConfigDict(frozen=True)

    case_id: str
    entries: tuple[CustodyEntry, ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def head_hash(self) -> str:
        return self.entries[-1].entry_hash if self.entries else GENESIS_HASH


class VerifyCheck(str, Enum):
    INDEX = "index"
    PREV_HASH = "prev_hash"
    ENTRY_HASH = "entry_hash"


class VerifyResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    valid: bool
    index: Optional[int] = None
    check: Optional[VerifyCheck] = None
    message: str = ""


def canonical_string(index: int, ts: str, actor: str, action: CustodyAction | str,
                     evidence_id: str, payload_digest: str, prev_hash: str) -> str:
    action_value = action.value if isinstance(action, CustodyAction) else action
    return "\n".join([str(index), ts, actor, action_value, evidence_id, payload_digest, prev_hash])


def entry_hash(canonical: str) -> str:
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _seal(index: int, draft: EntryDraft, prev_hash: str) -> CustodyEntry:
    fields = dict(
        index=index,
        ts=draft.ts,
        actor=draft.actor,
        action=draft.action,
        evidence_id=draft.evidence_id,
        payload_digest=draft.payload_digest,
        prev_hash=prev_hash,
    )
    return CustodyEntry(**fields, entry_hash=entry_hash(canonical_string(**fields)))


def open_chain(case_id: str, first: EntryDraft) -> CustodyChain:
    """Abre una cadena con su entrada génesis, que debe ser una incautación"""
    if first.action is not CustodyAction.SEIZE:
        raise InvalidFirstAction(f"la cadena debe abrirse con seize, no con {first.action.value}")
    chain = CustodyChain(case_id=case_id, entries=(_seal(0, first, GENESIS_HASH),))
    logger.info("Cadena de custodia %s abierta por %s", case_id, first.actor)
    return chain


def append_entry(chain: CustodyChain, draft: EntryDraft) -> CustodyChain:
    result = verify_chain(chain)
    if not result.valid:
        raise BrokenChain(f"cadena {chain.case_id} rota en la entrada {result.index}: {result.message}")
    entry = _seal(len(chain.entries), draft, chain.head_hash)
    return chain.model_copy(update={"entries": chain.entries + (entry,)})


def verify_chain(chain: CustodyChain) -> VerifyResult:
    """Comprueba índice, enlace y hash de cada entrada; informa del primer fallo"""
    prev_hash = GENESIS_HASH
    for position, entry in enumerate(chain.entries):
        if entry.index != position:
            return VerifyResult(valid=False, index=position, check=VerifyCheck.INDEX,
                                message=f"índice {entry.index} en la posición {position}")
        if entry.prev_hash != prev_hash:
            return VerifyResult(valid=False, index=position, check=VerifyCheck.PREV_HASH,
                                message="prev_hash no coincide con el hash de la entrada anterior")
        if entry.entry_hash != entry_hash(entry.canonical()):
            return VerifyResult(valid=False, index=position, check=VerifyCheck.ENTRY_HASH,
                                message="entry_hash no corresponde al contenido de la entrada")
        prev_hash = entry.entry_hash
    return VerifyResult(valid=True)


# Ficheros .custody.json

_ENTRIES = TypeAdapter(list[CustodyEntry])


def case_id_from_path(path: Path | str) -> str:
    name = Path(path).name
    return name[: -len(LEDGER_SUFFIX)] if name.endswith(LEDGER_SUFFIX) else Path(path).stem


def dumps_chain(chain: CustodyChain) -> str:
    entries = [entry.model_dump(mode="json") for entry in chain.entries]
    return json.dumps(entries, indent=2, ensure_ascii=False) + "\n"


def loads_chain(text: str, case_id: str) -> CustodyChain:
    try:
        entries = _ENTRIES.validate_json(text)
    except ValidationError as exc:
        raise TraceFormatError(f"registro de custodia no válido: {exc.errors()[0]['msg']}") from exc
    return CustodyChain(case_id=case_id, entries=tuple(entries))


def load_chain(path: Path | str) -> CustodyChain:
    return loads_chain(Path(path).read_text(encoding="utf-8"), case_id_from_path(path))


def dump_chain(chain: CustodyChain, path: Path | str) -> None:
    Path(path).write_text(dumps_chain(chain), encoding="utf-8")
