"""Parser de la sintaxis .msc basado en lark"""
from __future__ import annotations

import re
from functools import lru_cache
from pathlib import Path
from typing import Optional

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, UnexpectedToken
from lark.lexer import PatternStr
from pydantic import BaseModel, ConfigDict, Field

from dfci.core.errors import DfciError
from dfci.msc.model import (
    And,
    Conformant,
    Eventually,
    Fragment,
    FragmentKind,
    Lifeline,
    LifelineAlias,
    MessageSpec,
    Modality,
    MscDocument,
    Note,
    ObjectiveSpec,
    Or,
    Phase,
    Responds,
    SceneMarker,
)
from dfci.msc.validation import Issue, validate_document

GRAMMAR_PATH = Path(__file__).resolve().parent / "msc.lark"

_ESCAPE_RE = re.compile(r'\\(["\\])')


class SourceSpan(BaseModel):
    model_config = ConfigDict(frozen=True)

    line: int = Field(ge=1)
    column: int = Field(ge=1)
    length: int = Field(ge=1)


class ParseError(DfciError):
    """Error de sintaxis o incidencia de validación localizada en el fuente"""

    def __init__(self, span: SourceSpan, expected: list[str], found: str, message: str,
                 category: Optional[str] = None):
        super().__init__(message)
        self.span = span
        self.expected = expected
        self.found = found
        self.message = message
        self.category = category

    def __str__(self) -> str:
        return f"{self.span.line}:{self.span.column}: {self.message}"


@lru_cache(maxsize=1)
def _lark() -> Lark:
    return Lark(GRAMMAR_PATH.read_text(encoding="utf-8"), parser="lalr", lexer="contextual", start="start",
                propagate_positions=True)


def _unquote(token: Token) -> str:
    return _ESCAPE_RE.sub(r"\1", str(token)[1:-1])


def _span(token: Token) -> tuple[SourceSpan, str]:
    text = str(token)
    return SourceSpan(line=token.line, column=token.column, length=max(1, len(text))), text


class _Custody(tuple):
    pass


class _Bounds(tuple):
    pass


class _DocumentBuilder(Transformer):
    """Transforma el árbol de lark en un MscDocument y anota posiciones"""

    def __init__(self):
        super().__init__()
        # (location, element, ref) -> (SourceSpan, lexema)
        self.spans: dict[tuple, tuple[SourceSpan, str]] = {}
        self.fragment_marks: list[tuple[int, int]] = []

    def _mark(self, location: str, element: Optional[str], token: Token, ref: Optional[str] = None):
        self.spans[(location, element, ref)] = _span(token)
        self.spans.setdefault((location, element, None), _span(token))
        self.spans.setdefault((location, None, None), _span(token))

    # Documento

    def start(self, items):
        name = items[0]
        self._mark("document", "name", name)
        lifelines = items[1]
        aliases, objectives, body = [], [], []
        custody = None
        for item in items[2:]:
            if isinstance(item, LifelineAlias):
                aliases.append(item)
            elif isinstance(item, ObjectiveSpec):
                objectives.append(item)
            elif isinstance(item, _Custody):
                custody = (item[0], item[1])
            else:
                body.append(item)
        return MscDocument(
            name=str(name),
            lifelines=tuple(lifelines),
            aliases=tuple(aliases),
            body=tuple(body),
            objectives=tuple(objectives),
            custody_span=custody,
        )

    def actors(self, items):
        return list(items)

    def lifeline(self, items):
        token = items[0]
        self._mark(f"lifeline {token}", "id", token)
        extra = dict(items[1:])
        return Lifeline(id=str(token), display_name=extra.get("display", ""), role=extra.get("role", ""))

    def display(self, items):
        return ("display", _unquote(items[0]))

    def role(self, items):
        return ("role", _unquote(items[0]))

    def alias_decl(self, items):
        alias, target = items
        self._mark(f"alias {alias}", "alias", alias)
        self._mark(f"alias {alias}", "target", target, str(target))
        return LifelineAlias(alias=str(alias), target=str(target))

    # Objetivos

    def objective(self, items):
        ident = items[0]
        description = _unquote(items[1]) if len(items) == 3 else ""
        predicate = items[-1]
        location = f"objective {ident}"
        self._mark(location, "id", ident)
        for (loc, element, ref), value in list(self.spans.items()):
            if loc == "predicate":
                self.spans[(location, "predicate", ref)] = value
                del self.spans[(loc, element, ref)]
        return ObjectiveSpec(id=str(ident), description=description, predicate=predicate)

    def eventually(self, items):
        self._mark("predicate", "msg", items[0], str(items[0]))
        return Eventually(msg_id=str(items[0]))

    def responds(self, items):
        request, answer = items
        self._mark("predicate", "msg", request, str(request))
        self._mark("predicate", "msg", answer, str(answer))
        return Responds(request=str(request), answer=str(answer))

    def conformant(self, items):
        return Conformant()

    def conj(self, items):
        return And(left=items[0], right=items[1])

    def disj(self, items):
        return Or(left=items[0], right=items[1])

    def custody(self, items):
        start, end = items
        self._mark("custody", "start", start, str(start))
        self._mark("custody", "end", end, str(end))
        return _Custody((str(start), str(end)))

    # Cuerpo

    def message(self, items):
        msg_id, sender, receiver, label = items[:4]
        attrs = items[4] if len(items) > 4 else []
        location = f"message {msg_id}"
        self.spans[(location, None, None)] = _span(msg_id)
        self._mark(location, "msg_id", msg_id)
        self._mark(location, "from", sender, str(sender))
        self._mark(location, "to", receiver, str(receiver))
        self._mark(location, "label", label)
        modality = Modality.MANDATORY
        phase = None
        for attr in attrs:
            if attr[0] == "opt":
                modality = Modality.OPTIONAL
            else:
                phase = Phase(attr[1])
        return MessageSpec(
            msg_id=str(msg_id),
            sender=str(sender),
            receiver=str(receiver),
            label=_unquote(label),
            modality=modality,
            phase=phase,
        )

    def attrs(self, items):
        return list(items)

    def opt_attr(self, items):
        return ("opt",)

    def phase_attr(self, items):
        return ("phase", str(items[0]))

    @v_args(meta=True)
    def loop(self, meta, items):
        self.fragment_marks.append((meta.line, meta.column))
        bounds = (1, None)
        if items and isinstance(items[0], _Bounds):
            bounds, items = tuple(items[0]), items[1:]
        return Fragment(kind=FragmentKind.LOOP, body=tuple(items), min_iter=bounds[0], max_iter=bounds[1])

    @v_args(meta=True)
    def opt(self, meta, items):
        self.fragment_marks.append((meta.line, meta.column))
        return Fragment(kind=FragmentKind.OPT, body=tuple(items))

    def bounds(self, items):
        return _Bounds((int(items[0]), items[1]))

    def upper(self, items):
        token = items[0]
        return None if token.type == "STAR" else int(token)

    def scene(self, items):
        self._mark("scene", None, items[0])
        return SceneMarker(name=_unquote(items[0]))

    def note(self, items):
        self._mark("note", None, items[0])
        return Note(text=_unquote(items[0]))

    # Promoción de incidencias

    def fragment_spans(self) -> dict[str, tuple[SourceSpan, str]]:
        marks = sorted(self.fragment_marks)
        return {
            f"F{n}": (SourceSpan(line=line, column=column, length=1), "")
            for n, (line, column) in enumerate(marks)
        }

    def promote(self, issue: Issue) -> ParseError:
        spans = {**self.spans}
        for fid, value in self.fragment_spans().items():
            spans[(f"fragment {fid}", None, None)] = value
        located = (
            spans.get((issue.location, issue.element, issue.ref))
            or spans.get((issue.location, issue.element, None))
            or spans.get((issue.location, None, None))
            or spans.get(("document", "name", None))
        )
        span, lexeme = located or (SourceSpan(line=1, column=1, length=1), "")
        if not lexeme:
            lexeme = issue.ref or issue.location
        message = f"{issue.category.value}: {issue.message} (en '{lexeme}')"
        return ParseError(span=span, expected=[], found=lexeme, message=message, category=issue.category.value)


def _describe_expected(names) -> list[str]:
    described = []
    parser = _lark()
    for name in sorted(names):
        try:
            pattern = parser.get_terminal(name).pattern
        except KeyError:
            described.append(name)
            continue
        described.append(f"'{pattern.value}'" if isinstance(pattern, PatternStr) else name)
    return described


def _syntax_error(exc: UnexpectedInput, text: str) -> ParseError:
    if isinstance(exc, UnexpectedCharacters):
        found = exc.char
        expected = _describe_expected(exc.allowed or ())
        line, column = exc.line, exc.column
    elif isinstance(exc, UnexpectedToken):
        token = exc.token
        expected = _describe_expected(exc.expected or ())
        if token.type == "$END":
            found, line, column = "<EOF>", None, None
        else:
            found = str(token)
            line, column = token.line, token.column
    else:
        found = "<EOF>"
        expected = _describe_expected(getattr(exc, "expected", ()) or ())
        line, column = None, None
    if not line or line < 1:
        # Fin de entrada: justo después del último carácter significativo
        content = text.rstrip()
        lines = content.split("\n")
        line = len(lines)
        column = len(lines[-1]) + 1
    span = SourceSpan(line=line, column=max(1, column or 1), length=max(1, len(found)))
    wanted = ", ".join(expected) if expected else "otra cosa"
    message = f"se esperaba {wanted} pero se encontró '{found}'"
    return ParseError(span=span, expected=expected, found=found, message=message)


def parse(source: str) -> MscDocument:
    """
    Analiza un documento .msc. Lanza ParseError con el primer error de sintaxis
    o con la primera incidencia de validate_document, localizada en el fuente.
    """
    text = source.replace("\r\n", "\n").replace("\r", "\n")
    try:
        tree = _lark().parse(text)
    except UnexpectedInput as exc:
        raise _syntax_error(exc, text) from None
    builder = _DocumentBuilder()
    doc = builder.transform(tree)
    issues = validate_document(doc)
    if issues:
        raise builder.promote(issues[0])
    return doc


def parse_file(path: Path | str) -> MscDocument:
    return parse(Path(path).read_text(encoding="utf-8"))
