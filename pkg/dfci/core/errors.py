"""Excepciones del toolkit.

Los hallazgos sobre datos (issues de validación, violaciones, huecos de
custodia) se devuelven como valores; estas excepciones cubren precondiciones
rotas y entradas que no se pueden procesar.
"""


class DfciError(Exception):
    """Base de todos los errores de dfci"""


class InvalidDocument(DfciError):
    """El documento no supera validate_document"""

    def __init__(self, message: str, issues=None):
        super().__init__(message)
        self.issues = list(issues or [])


class UnresolvedReference(InvalidDocument):
    pass


class CyclicOrder(DfciError):
    pass


class CapExceeded(DfciError):
    pass


class ExpansionOutOfBounds(DfciError):
    pass


class ProtocolMismatch(DfciError):
    pass


class TraceFormatError(DfciError):
    pass


class InvalidFirstAction(DfciError):
    pass


class BrokenChain(DfciError):
    pass


class NoCustodySpan(DfciError):
    pass


class ConfigOutOfBounds(DfciError):
    pass


class UnknownBuiltin(DfciError):
    pass
