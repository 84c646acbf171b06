"""Configuración de simulación y reglas de fallo"""
from __future__ import annotations

import re
from enum import Enum
from fractions import Fraction
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from dfci.core.config import settings
from dfci.core.errors import ConfigOutOfBounds

U64_MAX = 2**64 - 1


class OptPolicy(str, Enum):
    TAKE = "take"
    SKIP = "skip"
    RANDOM = "random"


class FaultKind(str, Enum):
    DROP = "drop"
    TAMPER = "tamper"
    DUPLICATE = "duplicate"
    DELAY = "delay"


class FaultSide(str, Enum):
    TRACE = "trace"
    LEDGER = "ledger"


class FaultRule(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    target: str
    kind: FaultKind
    probability: Fraction = Fraction(1)
    side: FaultSide = FaultSide.TRACE

    @field_validator("probability", mode="before")
    @classmethod
    def _rational(cls, value):
        try:
            probability = Fraction(value)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"probabilidad no racional: {value}") from exc
        if not 0 <= probability <= 1:
            raise ValueError(f"probabilidad fuera de [0, 1]: {value}")
        return probability

    @field_serializer("probability")
    def _dump_probability(self, value: Fraction) -> str:
        return str(value)

    @model_validator(mode="after")
    def _ledger_kinds(self):
        if self.side is FaultSide.LEDGER and self.kind not in (FaultKind.DROP, FaultKind.TAMPER):
            raise ValueError(f"el registro de custodia solo admite drop y tamper, no {self.kind.value}")
        return self


_FAULT_SPEC = re.compile(r"^(?P<kind>\w+):(?P<params>.+)$")


def parse_fault(text: str) -> FaultRule:
    """
    Lee una regla con la forma `kind:msg=ID,p=RAT[,side=ledger]`.
    Ejemplo: "drop:msg=10,p=1/2"
    """
    match = _FAULT_SPEC.match(text.strip())
    if not match:
        raise ConfigOutOfBounds(f"regla de fallo mal formada: {text}")
    params = {}
    for pair in match.group("params").split(","):
        key, sep, value = pair.partition("=")
        if not sep:
            raise ConfigOutOfBounds(f"parámetro mal formado en '{text}': {pair}")
        params[key.strip()] = value.strip()
    if "msg" not in params:
        raise ConfigOutOfBounds(f"la regla '{text}' no indica msg=")
    try:
        return FaultRule(
            target=params["msg"],
            kind=match.group("kind"),
            probability=params.get("p", "1"),
            side=params.get("side", FaultSide.TRACE.value),
        )
    except ValueError as exc:
        raise ConfigOutOfBounds(f"regla de fallo no válida '{text}': {exc}") from exc


class SimConfig(BaseModel):
    """
    Parámetros de una simulación. `loop_iterations` y `opt_policy` se indexan
    por id de punto de decisión (F0, F1... o "<msg_id>?"); los ausentes toman
    `loops` y `default_opt`.
    """
    model_config = ConfigDict(frozen=True)

    seed: int = Field(default=0, ge=0, le=U64_MAX)
    loops: int = Field(default=1, ge=0)
    loop_iterations: dict[str, int] = Field(default_factory=dict)
    default_opt: OptPolicy = OptPolicy.TAKE
    opt_policy: dict[str, OptPolicy] = Field(default_factory=dict)
    faults: tuple[FaultRule, ...] = ()
    case_id: Optional[str] = None
    evidence_id: str = settings.EVIDENCE_ID

    def iterations_for(self, fid: str) -> int:
        return self.loop_iterations.get(fid, self.loops)

    def policy_for(self, choice_id: str) -> OptPolicy:
        return self.opt_policy.get(choice_id, self.default_opt)
