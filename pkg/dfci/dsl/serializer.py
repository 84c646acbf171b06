"""Serialización canónica de documentos MSC a la sintaxis .msc"""
from dfci.msc.model import (
    And,
    Conformant,
    Eventually,
    Fragment,
    Lifeline,
    MessageSpec,
    MscDocument,
    Note,
    Or,
    Responds,
    SceneMarker,
)

INDENT = "  "

_PRECEDENCE = {Or: 1, And: 2}


def quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _lifeline(lifeline: Lifeline) -> str:
    out = lifeline.id
    if lifeline.display_name and lifeline.display_name != lifeline.id:
        out += f": {quote(lifeline.display_name)}"
    if lifeline.role:
        out += f" role {quote(lifeline.role)}"
    return out


def _precedence(pred) -> int:
    return _PRECEDENCE.get(type(pred), 3)


def serialize_predicate(pred) -> str:
    if isinstance(pred, Eventually):
        return f"eventually({pred.msg_id})"
    if isinstance(pred, Responds):
        return f"responds({pred.request}, {pred.answer})"
    if isinstance(pred, Conformant):
        return "conformant"
    op = "and" if isinstance(pred, And) else "or"
    own = _precedence(pred)
    left = serialize_predicate(pred.left)
    right = serialize_predicate(pred.right)
    if _precedence(pred.left) < own:
        left = f"({left})"
    # Operadores asociativos por la izquierda
    if _precedence(pred.right) <= own:
        right = f"({right})"
    return f"{left} {op} {right}"


def _message(msg: MessageSpec) -> str:
    attrs = []
    if msg.optional:
        attrs.append("opt")
    if msg.phase is not None:
        attrs.append(f"phase={msg.phase.value}")
    suffix = f" [{' '.join(sorted(attrs))}]" if attrs else ""
    return f"msg {msg.msg_id} {msg.sender} -> {msg.receiver}: {quote(msg.label)}{suffix};"


def _items(items, depth: int, lines: list[str]) -> None:
    pad = INDENT * depth
    for item in items:
        if isinstance(item, MessageSpec):
            lines.append(pad + _message(item))
        elif isinstance(item, Fragment):
            if item.is_loop:
                upper = "*" if item.max_iter is None else str(item.max_iter)
                lines.append(f"{pad}loop ({item.lower}..{upper}) {{")
            else:
                lines.append(f"{pad}opt {{")
            _items(item.body, depth + 1, lines)
            lines.append(pad + "}")
        elif isinstance(item, SceneMarker):
            lines.append(f"{pad}scene {quote(item.name)};")
        elif isinstance(item, Note):
            lines.append(f"{pad}note {quote(item.text)};")


def serialize(doc: MscDocument) -> str:
    """
    Forma canónica: un elemento por línea, dos espacios por nivel de
    fragmento, atributos ordenados y cotas de loop siempre explícitas.
    """
    lines = [f"protocol {doc.name} {{"]
    lines.append(INDENT + "actors " + ", ".join(_lifeline(l) for l in doc.lifelines) + ";")
    for alias in doc.aliases:
        lines.append(f"{INDENT}alias {alias.alias} = {alias.target};")
    for objective in doc.objectives:
        description = f" {quote(objective.description)}" if objective.description else ""
        lines.append(f"{INDENT}objective {objective.id}{description}: {serialize_predicate(objective.predicate)};")
    if doc.custody_span is not None:
        start, end = doc.custody_span
        lines.append(f"{INDENT}custody {start} .. {end};")
    _items(doc.body, 1, lines)
    lines.append("}")
    return "\n".join(lines) + "\n"
