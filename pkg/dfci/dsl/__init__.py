from dfci.dsl.parser import ParseError, SourceSpan, parse, parse_file
from dfci.dsl.render import render, render_ascii, render_dot
from dfci.dsl.serializer import serialize, serialize_predicate

__all__ = [
    'ParseError', 'SourceSpan', 'parse', 'parse_file',
    'render', 'render_ascii', 'render_dot',
    'serialize', 'serialize_predicate',
]
