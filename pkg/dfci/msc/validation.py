"""Validación estructural de documentos MSC"""
from __future__ import annotations

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict

from dfci.msc.model import (
    Fragment,
    MessageSpec,
    MscDocument,
    Note,
    SceneMarker,
    is_msg_id,
    is_token,
    predicate_msg_ids,
)


class IssueCategory(str, Enum):
    INVALID_TOKEN = "InvalidToken"
    INVALID_TEXT = "InvalidText"
    DUPLICATE_LIFELINE = "DuplicateLifeline"
    DUPLICATE_MESSAGE = "DuplicateMessage"
    DUPLICATE_OBJECTIVE = "DuplicateObjective"
    INVALID_ALIAS = "InvalidAlias"
    SELF_MESSAGE = "SelfMessage"
    UNRESOLVED_REFERENCE = "UnresolvedReference"
    EMPTY_FRAGMENT = "EmptyFragment"
    INVALID_BOUNDS = "InvalidBounds"
    EMPTY_SCENE = "EmptyScene"
    CUSTODY_ORDER = "CustodyOrder"


class Issue(BaseModel):
    model_config = ConfigDict(frozen=True)

    category: IssueCategory
    location: str  # "message 6", "lifeline A", "fragment F2", "custody"...
    message: str
    element: Optional[str] = None  # campo concreto: "from", "to", "start"...
    ref: Optional[str] = None  # valor referenciado que falla


def _text_ok(value: str) -> bool:
    return "\n" not in value and "\r" not in value


def validate_document(doc: MscDocument) -> list[Issue]:
    """Devuelve la lista de incidencias; vacía si el documento es válido"""
    issues: list[Issue] = []

    def add(category, location, message, element=None, ref=None):
        issues.append(Issue(category=category, location=location, message=message, element=element, ref=ref))

    if not is_token(doc.name):
        add(IssueCategory.INVALID_TOKEN, "document", f"nombre de protocolo no válido: '{doc.name}'", "name")

    # Lifelines y alias
    declared: set[str] = set()
    for lifeline in doc.lifelines:
        location = f"lifeline {lifeline.id}"
        if not is_token(lifeline.id):
            add(IssueCategory.INVALID_TOKEN, location, f"id de lifeline no válido: '{lifeline.id}'", "id")
        if lifeline.id in declared:
            add(IssueCategory.DUPLICATE_LIFELINE, location, f"lifeline '{lifeline.id}' declarada dos veces", "id")
        if not (_text_ok(lifeline.display_name) and _text_ok(lifeline.role)):
            add(IssueCategory.INVALID_TEXT, location, "texto con saltos de línea")
        declared.add(lifeline.id)

    aliases: set[str] = set()
    for alias in doc.aliases:
        location = f"alias {alias.alias}"
        if not is_token(alias.alias):
            add(IssueCategory.INVALID_TOKEN, location, f"alias no válido: '{alias.alias}'", "alias")
        if alias.alias in declared or alias.alias in aliases:
            add(IssueCategory.INVALID_ALIAS, location, f"alias '{alias.alias}' ya está en uso", "alias")
        if alias.target not in declared:
            add(IssueCategory.UNRESOLVED_REFERENCE, location, f"alias apunta a lifeline inexistente '{alias.target}'", "target")
        aliases.add(alias.alias)

    known_lifelines = declared | aliases

    # Cuerpo
    fragment_ids = doc.fragment_ids()
    seen_msgs: set[str] = set()
    for item, _ in doc.iter_items():
        if isinstance(item, MessageSpec):
            location = f"message {item.msg_id}"
            if not is_msg_id(item.msg_id):
                add(IssueCategory.INVALID_TOKEN, location, f"msg_id no válido: '{item.msg_id}'", "msg_id")
            if item.msg_id in seen_msgs:
                add(IssueCategory.DUPLICATE_MESSAGE, location, f"msg_id '{item.msg_id}' repetido", "msg_id")
            seen_msgs.add(item.msg_id)
            for element, lifeline in (("from", item.sender), ("to", item.receiver)):
                if lifeline not in known_lifelines:
                    add(IssueCategory.UNRESOLVED_REFERENCE, location,
                        f"el mensaje {item.msg_id} referencia la lifeline inexistente '{lifeline}'", element, lifeline)
            if doc.canonical(item.sender) == doc.canonical(item.receiver):
                add(IssueCategory.SELF_MESSAGE, location,
                    f"el mensaje {item.msg_id} va de '{item.sender}' a '{item.receiver}'", "to")
            if not _text_ok(item.label):
                add(IssueCategory.INVALID_TEXT, location, "la etiqueta contiene saltos de línea", "label")
        elif isinstance(item, Fragment):
            location = f"fragment {fragment_ids[id(item)]}"
            if not item.body:
                add(IssueCategory.EMPTY_FRAGMENT, location, f"fragmento {item.kind.value} vacío")
            elif not any(isinstance(child, (MessageSpec, Fragment)) for child in item.body):
                add(IssueCategory.EMPTY_FRAGMENT, location, f"fragmento {item.kind.value} sin mensajes")
            if item.is_loop:
                low, high = item.min_iter, item.max_iter
                if low is None or low < 0:
                    add(IssueCategory.INVALID_BOUNDS, location, f"min_iter no válido: {low}")
                if high is not None and high < 1:
                    add(IssueCategory.INVALID_BOUNDS, location, f"max_iter debe ser positivo: {high}")
                if low is not None and high is not None and low > high:
                    add(IssueCategory.INVALID_BOUNDS, location, f"min_iter {low} > max_iter {high}")
            elif item.min_iter is not None or item.max_iter is not None:
                add(IssueCategory.INVALID_BOUNDS, location, "un fragmento opt no admite cotas de iteración")
        elif isinstance(item, SceneMarker):
            if not item.name.strip() or not _text_ok(item.name):
                add(IssueCategory.EMPTY_SCENE, "scene", "escena vacía o con saltos de línea")
        elif isinstance(item, Note):
            if not _text_ok(item.text):
                add(IssueCategory.INVALID_TEXT, "note", "nota con saltos de línea")

    # Objetivos
    objective_ids: set[str] = set()
    for objective in doc.objectives:
        location = f"objective {objective.id}"
        if not is_token(objective.id):
            add(IssueCategory.INVALID_TOKEN, location, f"id de objetivo no válido: '{objective.id}'", "id")
        if objective.id in objective_ids:
            add(IssueCategory.DUPLICATE_OBJECTIVE, location, f"objetivo '{objective.id}' repetido", "id")
        objective_ids.add(objective.id)
        if not _text_ok(objective.description):
            add(IssueCategory.INVALID_TEXT, location, "descripción con saltos de línea")
        for msg_id in predicate_msg_ids(objective.predicate):
            if msg_id not in seen_msgs:
                add(IssueCategory.UNRESOLVED_REFERENCE, location,
                    f"el objetivo {objective.id} referencia el mensaje inexistente '{msg_id}'", "predicate", msg_id)

    # Custodia
    if doc.custody_span is not None:
        start, end = doc.custody_span
        order = doc.msg_ids()
        resolved = True
        for element, msg_id in (("start", start), ("end", end)):
            if msg_id not in seen_msgs:
                resolved = False
                add(IssueCategory.UNRESOLVED_REFERENCE, "custody",
                    f"la custodia referencia el mensaje inexistente '{msg_id}'", element, msg_id)
        if resolved and order.index(start) >= order.index(end):
            add(IssueCategory.CUSTODY_ORDER, "custody",
                f"el inicio de custodia {start} no precede al final {end}", "end")

    return issues
