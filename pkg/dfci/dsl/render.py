"""Representaciones de un documento MSC: texto ASCII y Graphviz DOT"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

from dfci.msc.model import Fragment, MessageSpec, MscDocument, Note, SceneMarker

RenderFormat = Literal["ascii", "dot"]

COLUMN_GAP = 6


@dataclass
class _Row:
    kind: str  # "msg", "scene", "note", "open", "close"
    text: str = ""
    message: Optional[MessageSpec] = None


def _rows(doc: MscDocument) -> list[_Row]:
    fragment_ids = doc.fragment_ids()
    rows: list[_Row] = []

    def walk(items):
        for item in items:
            if isinstance(item, MessageSpec):
                rows.append(_Row("msg", message=item))
            elif isinstance(item, SceneMarker):
                rows.append(_Row("scene", f"== scene: {item.name} =="))
            elif isinstance(item, Note):
                rows.append(_Row("note", f"-- note: {item.text} --"))
            elif isinstance(item, Fragment):
                fid = fragment_ids[id(item)]
                if item.is_loop:
                    upper = "*" if item.max_iter is None else item.max_iter
                    header = f"loop {fid} ({item.lower}..{upper})"
                else:
                    header = f"opt {fid}"
                rows.append(_Row("open", header))
                walk(item.body)
                rows.append(_Row("close", f"end {fid}"))

    walk(doc.body)
    return rows


def _msg_tag(msg: MessageSpec) -> str:
    return f"{msg.msg_id}?" if msg.optional else msg.msg_id


def _arrow(tag: str, shaft: int, rightwards: bool) -> str:
    """Flecha de `shaft` caracteres con la etiqueta centrada"""
    body = tag.center(shaft - 2, "-")
    return f"-{body}>" if rightwards else f"<{body}-"


def render_ascii(doc: MscDocument) -> str:
    """
    Escalera de texto: una columna por lifeline y, por mensaje, una flecha
    entre la barra del emisor y la del receptor seguida de la etiqueta.
    """
    names = [l.display_name or l.id for l in doc.lifelines]
    tags = [_msg_tag(m) for m in doc.messages()]
    width = max(max((len(n) for n in names), default=1), max((len(t) for t in tags), default=0) + 4) + COLUMN_GAP
    centers = {l.id: i * width + width // 2 for i, l in enumerate(doc.lifelines)}
    total = width * len(doc.lifelines)

    def bars() -> list[str]:
        line = [" "] * total
        for x in centers.values():
            line[x] = "|"
        return line

    def overlay(line: list[str], start: int, text: str) -> list[str]:
        needed = start + len(text)
        if needed > len(line):
            line.extend(" " * (needed - len(line)))
        line[start:needed] = list(text)
        return line

    header = [" "] * total
    for i, name in enumerate(names):
        start = i * width + (width - len(name)) // 2
        header[start:start + len(name)] = list(name)

    out = [f"msc {doc.name}", "".join(header).rstrip(), "".join(bars()).rstrip()]
    depth = 0
    for row in _rows(doc):
        if row.kind == "msg":
            msg = row.message
            x_from = centers[doc.canonical(msg.sender)]
            x_to = centers[doc.canonical(msg.receiver)]
            low, high = sorted((x_from, x_to))
            line = overlay(bars(), low + 1, _arrow(_msg_tag(msg), high - low - 1, x_from < x_to))
            out.append("".join(overlay(line, total + 1, msg.label)).rstrip())
        elif row.kind == "open":
            out.append("~" * (depth + 1) + f" {row.text} " + "~" * 4)
            depth += 1
        elif row.kind == "close":
            depth -= 1
            out.append("~" * (depth + 1) + f" {row.text} " + "~" * 4)
        else:
            out.append(row.text)
    out.append("".join(bars()).rstrip())
    return "\n".join(out) + "\n"


def _dot_id(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_dot(doc: MscDocument) -> str:
    """Un nodo por (lifeline, fila); las filas se alinean con rank=same"""
    ids = [l.id for l in doc.lifelines]
    out = [f"digraph {_dot_id(doc.name)} {{", "  rankdir=TB;", "  node [shape=point];"]
    for lifeline in doc.lifelines:
        out.append(f"  {_dot_id(lifeline.id + '_0')} [shape=box, label={_dot_id(lifeline.display_name or lifeline.id)}];")
    out.append("  {rank=same; " + " ".join(_dot_id(i + "_0") + ";" for i in ids) + "}")

    row = 0
    for entry in _rows(doc):
        if entry.kind != "msg":
            out.append(f"  // {entry.text}")
            continue
        row += 1
        msg = entry.message
        for lifeline in ids:
            out.append(f"  {_dot_id(f'{lifeline}_{row - 1}')} -> {_dot_id(f'{lifeline}_{row}')} "
                       "[style=dashed, arrowhead=none];")
        out.append("  {rank=same; " + " ".join(_dot_id(f"{i}_{row}") + ";" for i in ids) + "}")
        style = ", style=dotted" if msg.optional else ""
        source = _dot_id(f"{doc.canonical(msg.sender)}_{row}")
        target = _dot_id(f"{doc.canonical(msg.receiver)}_{row}")
        out.append(f"  {source} -> {target} [label={_dot_id(f'{msg.msg_id}: {msg.label}')}{style}];")
    out.append("}")
    return "\n".join(out) + "\n"


def render(doc: MscDocument, format: RenderFormat = "ascii") -> str:
    if format == "ascii":
        return render_ascii(doc)
    if format == "dot":
        return render_dot(doc)
    raise ValueError(f"formato de salida desconocido: {format}")
