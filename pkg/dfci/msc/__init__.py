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
    all_of,
)
from dfci.msc.validation import Issue, IssueCategory, validate_document
from dfci.msc.graph import (
    Event,
    EventGraph,
    EventKind,
    FragmentChoice,
    FragmentExpansion,
    compile,
    enumerate_expansions,
    expand,
    flatten,
    uniform_expansion,
)
from dfci.msc.linearize import iter_linearizations, linearizations

__all__ = [
    'And', 'Conformant', 'Eventually', 'Fragment', 'FragmentKind', 'Lifeline',
    'LifelineAlias', 'MessageSpec', 'Modality', 'MscDocument', 'Note',
    'ObjectiveSpec', 'Or', 'Phase', 'Responds', 'SceneMarker', 'all_of',
    'Issue', 'IssueCategory', 'validate_document',
    'Event', 'EventGraph', 'EventKind', 'FragmentChoice', 'FragmentExpansion',
    'compile', 'enumerate_expansions', 'expand', 'flatten', 'uniform_expansion',
    'iter_linearizations', 'linearizations',
]
