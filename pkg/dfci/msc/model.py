"""Modelo de objetos MSC: lifelines, mensajes, fragmentos y documento"""
from __future__ import annotations

import re
from enum import Enum
from typing import Annotated, Iterator, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator
from unidecode import unidecode

TOKEN_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
MSGID_RE = re.compile(r"(?:[A-Za-z][A-Za-z0-9_]*\.)?[0-9]+[A-Za-z]?")


def is_token(value: str) -> bool:
    return bool(TOKEN_RE.fullmatch(value or ""))


def is_msg_id(value: str) -> bool:
    return bool(MSGID_RE.fullmatch(value or ""))


def token_from_label(label: str) -> str:
    """
    Deriva un identificador de lifeline a partir de su nombre visible.
    Ejemplo: "DF Expert" -> "DFExpert", "Fiscalía" -> "Fiscalia"
    """
    ascii_label = unidecode(label)
    token = re.sub(r"[^A-Za-z0-9_]", "", ascii_label)
    if not token or not token[0].isalpha():
        token = "L" + token
    return token


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)


class Phase(str, Enum):
    IDENTIFICATION = "Identification"
    PRESERVATION = "Preservation"
    COLLECTION = "Collection"
    EXAMINATION = "Examination"
    ANALYSIS = "Analysis"
    PRESENTATION = "Presentation"
    DECISION = "Decision"


class Modality(str, Enum):
    MANDATORY = "mandatory"
    OPTIONAL = "optional"


class FragmentKind(str, Enum):
    LOOP = "loop"
    OPT = "opt"


class Lifeline(_Frozen):
    id: str
    display_name: str = ""
    role: str = ""

    @model_validator(mode="before")
    @classmethod
    def _default_display(cls, data):
        if isinstance(data, dict) and not data.get("display_name"):
            data = {**data, "display_name": data.get("id", "")}
        return data

    @classmethod
    def named(cls, display_name: str, role: str = "") -> "Lifeline":
        return cls(id=token_from_label(display_name), display_name=display_name, role=role)


class LifelineAlias(_Frozen):
    """Nombre alternativo de una lifeline (p. ej. Defendant -> Suspect)"""
    alias: str
    target: str


class MessageSpec(_Frozen):
    item_kind: Literal["msg"] = "msg"
    msg_id: str
    sender: str = Field(alias="from")
    receiver: str = Field(alias="to")
    label: str
    modality: Modality = Modality.MANDATORY
    phase: Optional[Phase] = None
    # Derivado del último marcador de escena; lo fija MscDocument
    scene: Optional[str] = None

    @property
    def optional(self) -> bool:
        return self.modality is Modality.OPTIONAL

    @property
    def choice_id(self) -> str:
        return f"{self.msg_id}?"


class SceneMarker(_Frozen):
    item_kind: Literal["scene"] = "scene"
    name: str


class Note(_Frozen):
    item_kind: Literal["note"] = "note"
    text: str


class Fragment(_Frozen):
    item_kind: Literal["fragment"] = "fragment"
    kind: FragmentKind
    body: tuple["Item", ...]
    min_iter: Optional[int] = None
    max_iter: Optional[int] = None  # None en un loop = sin cota

    @classmethod
    def loop(cls, *body: "Item", min_iter: int = 1, max_iter: Optional[int] = None) -> "Fragment":
        return cls(kind=FragmentKind.LOOP, body=body, min_iter=min_iter, max_iter=max_iter)

    @classmethod
    def opt(cls, *body: "Item") -> "Fragment":
        return cls(kind=FragmentKind.OPT, body=body)

    @property
    def is_loop(self) -> bool:
        return self.kind is FragmentKind.LOOP

    @property
    def lower(self) -> int:
        return self.min_iter if self.min_iter is not None else 1


Item = Annotated[Union[MessageSpec, Fragment, SceneMarker, Note], Field(discriminator="item_kind")]


# Predicados de objetivos funcionales

class Eventually(_Frozen):
    op: Literal["eventually"] = "eventually"
    msg_id: str


class Responds(_Frozen):
    """Toda petición enviada recibe después su respuesta"""
    op: Literal["responds"] = "responds"
    request: str
    answer: str


class Conformant(_Frozen):
    op: Literal["conformant"] = "conformant"


class And(_Frozen):
    op: Literal["and"] = "and"
    left: "Predicate"
    right: "Predicate"


class Or(_Frozen):
    op: Literal["or"] = "or"
    left: "Predicate"
    right: "Predicate"


Predicate = Annotated[Union[Eventually, Responds, Conformant, And, Or], Field(discriminator="op")]


def predicate_msg_ids(pred) -> Iterator[str]:
    if isinstance(pred, Eventually):
        yield pred.msg_id
    elif isinstance(pred, Responds):
        yield pred.request
        yield pred.answer
    elif isinstance(pred, (And, Or)):
        yield from predicate_msg_ids(pred.left)
        yield from predicate_msg_ids(pred.right)


def all_of(*preds) -> "Predicate":
    result = preds[0]
    for pred in preds[1:]:
        result = And(left=result, right=pred)
    return result


class ObjectiveSpec(_Frozen):
    id: str
    description: str = ""
    predicate: Predicate


def _annotate_scenes(items, scene: Optional[str]):
    """Propaga la escena activa a los mensajes en orden de documento"""
    annotated = []
    for item in items:
        if isinstance(item, SceneMarker):
            scene = item.name
            annotated.append(item)
        elif isinstance(item, MessageSpec):
            annotated.append(item if item.scene == scene else item.model_copy(update={"scene": scene}))
        elif isinstance(item, Fragment):
            body, scene = _annotate_scenes(item.body, scene)
            annotated.append(item.model_copy(update={"body": tuple(body)}))
        else:
            annotated.append(item)
    return annotated, scene


class MscDocument(_Frozen):
    name: str
    lifelines: tuple[Lifeline, ...]
    aliases: tuple[LifelineAlias, ...] = ()
    body: tuple[Item, ...]
    objectives: tuple[ObjectiveSpec, ...] = ()
    custody_span: Optional[tuple[str, str]] = None

    @model_validator(mode="before")
    @classmethod
    def _scenes(cls, data):
        if isinstance(data, dict) and "body" in data:
            body, _ = _annotate_scenes(tuple(data["body"]), None)
            data = {**data, "body": tuple(body)}
        return data

    # Consultas de solo lectura

    def alias_table(self) -> dict[str, str]:
        return {a.alias: a.target for a in self.aliases}

    def canonical(self, lifeline: str) -> str:
        return self.alias_table().get(lifeline, lifeline)

    def iter_items(self) -> Iterator[tuple[Item, tuple[Fragment, ...]]]:
        """Recorre el cuerpo en preorden con la pila de fragmentos que lo encierran"""
        def walk(items, enclosing):
            for item in items:
                yield item, enclosing
                if isinstance(item, Fragment):
                    yield from walk(item.body, enclosing + (item,))
        yield from walk(self.body, ())

    def messages(self) -> list[MessageSpec]:
        return [item for item, _ in self.iter_items() if isinstance(item, MessageSpec)]

    def message(self, msg_id: str) -> Optional[MessageSpec]:
        for msg in self.messages():
            if msg.msg_id == msg_id:
                return msg
        return None

    def msg_ids(self) -> list[str]:
        return [m.msg_id for m in self.messages()]

    def fragments(self) -> list[tuple[str, Fragment]]:
        """Fragmentos con su id F0, F1... en preorden"""
        frags = [item for item, _ in self.iter_items() if isinstance(item, Fragment)]
        return [(f"F{n}", frag) for n, frag in enumerate(frags)]

    def fragment_ids(self) -> dict[int, str]:
        return {id(frag): fid for fid, frag in self.fragments()}

    def enclosing(self, msg_id: str) -> tuple[Fragment, ...]:
        for item, enclosing in self.iter_items():
            if isinstance(item, MessageSpec) and item.msg_id == msg_id:
                return enclosing
        return ()

    def is_mandatory(self, msg_id: str) -> bool:
        msg = self.message(msg_id)
        if msg is None or msg.optional:
            return False
        return all(frag.is_loop and frag.lower >= 1 for frag in self.enclosing(msg_id))

    def mandatory_msg_ids(self) -> list[str]:
        return [m.msg_id for m in self.messages() if self.is_mandatory(m.msg_id)]

    def max_occurrences(self, msg_id: str) -> Optional[int]:
        """Número máximo de apariciones de un mensaje; None si algún loop no tiene cota"""
        count = 1
        for frag in self.enclosing(msg_id):
            if frag.is_loop:
                if frag.max_iter is None:
                    return None
                count *= frag.max_iter
        return count

    def lifelines_of(self, items) -> set[str]:
        """Lifelines canónicas que intervienen en una lista de items"""
        found = set()
        for item in items:
            if isinstance(item, MessageSpec):
                found.add(self.canonical(item.sender))
                found.add(self.canonical(item.receiver))
            elif isinstance(item, Fragment):
                found |= self.lifelines_of(item.body)
        return found

    def objective(self, objective_id: str) -> Optional[ObjectiveSpec]:
        return next((o for o in self.objectives if o.id == objective_id), None)


Fragment.model_rebuild()
And.model_rebuild()
Or.model_rebuild()
ObjectiveSpec.model_rebuild()
MscDocument.model_rebuild()
