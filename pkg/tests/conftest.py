import pytest
from hypothesis import HealthCheck, settings

from dfci.conformance.trace import load_trace
from dfci.custody.ledger import load_chain
from dfci.protocols import builtin_document, golden_ledger_path, golden_trace_path

settings.register_profile(
    "dfci",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large, HealthCheck.function_scoped_fixture],
)
settings.load_profile("dfci")


@pytest.fixture
def init_doc():
    return builtin_document("init")


@pytest.fixture
def investigation_doc():
    return builtin_document("investigation")


@pytest.fixture
def trial_doc():
    return builtin_document("trial")


@pytest.fixture
def case_doc():
    return builtin_document("case")


@pytest.fixture
def golden_trace():
    return lambda name: load_trace(golden_trace_path(name))


@pytest.fixture
def golden_chain():
    return load_chain(golden_ledger_path("case"))


@pytest.fixture(autouse=True)
def _no_color(monkeypatch):
    monkeypatch.setenv("DFCI_COLOR", "0")
