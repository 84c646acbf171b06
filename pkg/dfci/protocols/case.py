"""Composición secuencial de los tres protocolos en un caso completo"""
from __future__ import annotations

from pydantic import BaseModel, ConfigDict

from dfci.msc.model import (
    And,
    Eventually,
    Fragment,
    Lifeline,
    LifelineAlias,
    MessageSpec,
    MscDocument,
    Note,
    ObjectiveSpec,
    Or,
    Responds,
)
from dfci.protocols.builtin import (
    DEFENDANT,
    DF_EXPERT,
    DF_TOOLS,
    JUDGE,
    POLICE,
    PROSECUTOR,
    SUSPECT,
    THIRD_PARTY,
    protocol_init,
    protocol_investigation,
    protocol_trial,
)

CASE_NAME = "case"

_BOUNDARY_NOTES = {
    "init": "protocol init",
    "investigation": "protocol investigation",
    "trial": "protocol trial: the Suspect becomes the Defendant",
}


class DfciCase(BaseModel):
    model_config = ConfigDict(frozen=True)

    protocols: tuple[MscDocument, MscDocument, MscDocument]
    composition: MscDocument

    @property
    def custody_span(self) -> tuple[str, str] | None:
        return self.composition.custody_span


def qualify(protocol: str, msg_id: str) -> str:
    return f"{protocol}.{msg_id}"


def _qualify_items(protocol: str, items) -> tuple:
    result = []
    for item in items:
        if isinstance(item, MessageSpec):
            result.append(item.model_copy(update={"msg_id": qualify(protocol, item.msg_id)}))
        elif isinstance(item, Fragment):
            result.append(item.model_copy(update={"body": _qualify_items(protocol, item.body)}))
        else:
            result.append(item)
    return tuple(result)


def _qualify_predicate(protocol: str, pred):
    if isinstance(pred, Eventually):
        return Eventually(msg_id=qualify(protocol, pred.msg_id))
    if isinstance(pred, Responds):
        return Responds(request=qualify(protocol, pred.request), answer=qualify(protocol, pred.answer))
    if isinstance(pred, (And, Or)):
        return type(pred)(left=_qualify_predicate(protocol, pred.left),
                          right=_qualify_predicate(protocol, pred.right))
    return pred


def compose_case() -> DfciCase:
    """
    Concatena Init, Investigation y Trial. El Suspect pasa a llamarse
    Defendant en el juicio mediante un alias de la misma lifeline.
    """
    protocols = (protocol_init(), protocol_investigation(), protocol_trial())
    body: list = []
    objectives: list[ObjectiveSpec] = []
    for doc in protocols:
        body.append(Note(text=_BOUNDARY_NOTES[doc.name]))
        body.extend(_qualify_items(doc.name, doc.body))
        objectives.extend(
            objective.model_copy(update={"predicate": _qualify_predicate(doc.name, objective.predicate)})
            for objective in doc.objectives
        )
    suspect = Lifeline(id=SUSPECT.id, display_name="Suspect / Defendant")
    composition = MscDocument(
        name=CASE_NAME,
        lifelines=(THIRD_PARTY, PROSECUTOR, POLICE, DF_EXPERT, suspect, DF_TOOLS, JUDGE),
        aliases=(LifelineAlias(alias=DEFENDANT.id, target=SUSPECT.id),),
        body=tuple(body),
        objectives=tuple(objectives),
        custody_span=(qualify("investigation", "5"), qualify("trial", "9b")),
    )
    return DfciCase(protocols=protocols, composition=composition)
