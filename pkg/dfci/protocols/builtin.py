"""Protocolos DFCI incorporados: Init, Investigation y Trial"""
from __future__ import annotations

from dfci.msc.model import (
    Conformant,
    Eventually,
    Fragment,
    Lifeline,
    MessageSpec,
    Modality,
    MscDocument,
    Note,
    ObjectiveSpec,
    Phase,
    Responds,
    SceneMarker,
    all_of,
)

# Lifelines compartidas; el id se deriva del nombre visible
PROSECUTOR = Lifeline.named("Prosecutor")
SUSPECT = Lifeline.named("Suspect")
DEFENDANT = Lifeline.named("Defendant")
DF_EXPERT = Lifeline.named("DF Expert")
DF_TOOLS = Lifeline.named("DF Tools")
JUDGE = Lifeline.named("Judge")
THIRD_PARTY = Lifeline.named("Third Party")
POLICE = Lifeline.named("Police")


def _msg(msg_id: str, sender: Lifeline, receiver: Lifeline, label: str,
         phase: Phase | None = None, optional: bool = False) -> MessageSpec:
    return MessageSpec(
        msg_id=msg_id,
        sender=sender.id,
        receiver=receiver.id,
        label=label,
        phase=phase,
        modality=Modality.OPTIONAL if optional else Modality.MANDATORY,
    )


def protocol_init() -> MscDocument:
    """
    Protocolo 1: desde la notitia criminis hasta la notificación al
    sospechoso con la orden de registro. Los pasos 2 a 5 no aparecen en el
    texto y quedan como hueco de numeración.
    """
    return MscDocument(
        name="init",
        lifelines=(THIRD_PARTY, PROSECUTOR, POLICE, DF_EXPERT, SUSPECT),
        body=(
            _msg("0", THIRD_PARTY, PROSECUTOR, "notitia criminis"),
            _msg("1", PROSECUTOR, POLICE, "instructs further orders for preliminary investigations"),
            Note(text="messages 2-5 are numbering gaps"),
            _msg("6", PROSECUTOR, DF_EXPERT, "retain for case"),
            SceneMarker(name="crime scene"),
            _msg("7", PROSECUTOR, SUSPECT, "notify of investigation"),
            _msg("8", PROSECUTOR, SUSPECT, "show search warrant"),
        ),
        objectives=(
            ObjectiveSpec(
                id="suspect_has_warrant",
                description="the Suspect gets a search warrant",
                predicate=Eventually(msg_id="8"),
            ),
        ),
    )


def protocol_investigation() -> MscDocument:
    """Protocolo 2: interrogatorio, incautación, examen y análisis"""
    return MscDocument(
        name="investigation",
        lifelines=(PROSECUTOR, SUSPECT, DF_EXPERT, DF_TOOLS),
        body=(
            Fragment.loop(
                _msg("1", PROSECUTOR, SUSPECT, "interrogation question"),
                _msg("2", SUSPECT, PROSECUTOR, "answer"),
                min_iter=1,
            ),
            _msg("3", PROSECUTOR, DF_EXPERT, "additional case information", Phase.IDENTIFICATION),
            _msg("4", DF_EXPERT, PROSECUTOR, "list of target devices", Phase.IDENTIFICATION),
            _msg("5", DF_EXPERT, SUSPECT, "request/seize devices", Phase.COLLECTION),
            _msg("6", DF_EXPERT, SUSPECT, "show seals", Phase.COLLECTION, optional=True),
            _msg("7", SUSPECT, DF_EXPERT, "system under investigation", Phase.COLLECTION),
            SceneMarker(name="Digital Forensics Laboratory"),
            _msg("8", DF_EXPERT, DF_TOOLS, "system + filters", Phase.EXAMINATION),
            _msg("9", DF_TOOLS, DF_EXPERT, "extracted data/information", Phase.EXAMINATION),
            _msg("10", DF_EXPERT, PROSECUTOR, "digital evidence report", Phase.ANALYSIS),
        ),
        objectives=(
            ObjectiveSpec(
                id="evidence_set_obtained",
                description="the Police and the Prosecutor obtain a set of information",
                predicate=Eventually(msg_id="10"),
            ),
        ),
        custody_span=("5", "10"),
    )


def fair_process():
    """Proceso justo: traza conforme y toda petición técnica recibe respuesta"""
    return all_of(
        Conformant(),
        Responds(request="3", answer="4"),
        Responds(request="5", answer="6"),
        Responds(request="7", answer="8"),
    )


def protocol_trial() -> MscDocument:
    """Protocolo 3: juicio, con peticiones técnicas opcionales al perito"""
    presentation = Phase.PRESENTATION
    return MscDocument(
        name="trial",
        lifelines=(PROSECUTOR, DEFENDANT, JUDGE, DF_EXPERT),
        body=(
            _msg("1", PROSECUTOR, JUDGE, "documentation"),
            SceneMarker(name="court"),
            Fragment.loop(
                _msg("2a", PROSECUTOR, JUDGE, "charge proof", presentation),
                _msg("2b", DEFENDANT, JUDGE, "defence proof", presentation),
                Fragment.opt(
                    _msg("3", PROSECUTOR, DF_EXPERT, "technical request", presentation),
                    _msg("4", DF_EXPERT, PROSECUTOR, "technical answer", presentation),
                ),
                Fragment.opt(
                    _msg("5", JUDGE, DF_EXPERT, "technical request", presentation),
                    _msg("6", DF_EXPERT, JUDGE, "technical answer", presentation),
                ),
                Fragment.opt(
                    _msg("7", DEFENDANT, DF_EXPERT, "technical request", presentation),
                    _msg("8", DF_EXPERT, DEFENDANT, "technical answer", presentation),
                ),
                min_iter=1,
            ),
            _msg("9a", JUDGE, PROSECUTOR, "sentence", Phase.DECISION),
            _msg("9b", JUDGE, DEFENDANT, "sentence", Phase.DECISION),
        ),
        objectives=(
            ObjectiveSpec(
                id="sentence_delivered",
                description="at least the Defendant obtains a sentence",
                predicate=Eventually(msg_id="9b"),
            ),
            ObjectiveSpec(
                id="fair_process",
                description="the Defendant obtains a fair process",
                predicate=fair_process(),
            ),
        ),
    )
