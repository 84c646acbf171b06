# scripts/export_models.py
"""Regenera los modelos .msc y los ficheros golden a partir de los constructores"""
from dfci.conformance.trace import dump_trace
from dfci.custody.ledger import dump_chain
from dfci.dsl.serializer import serialize
from dfci.protocols import BUILTINS, GOLDEN_DIR, SHIPPED_MODELS, builtin_document, golden_ledger_path, golden_trace_path, model_path
from dfci.sim.config import SimConfig
from dfci.sim.simulator import simulate

GOLDEN_SEED = 7

for name in SHIPPED_MODELS:
    model_path(name).write_text(serialize(builtin_document(name)), encoding="utf-8")
    print(f"✅ Modelo exportado a {model_path(name)}")

GOLDEN_DIR.mkdir(exist_ok=True)
for name in BUILTINS:
    trace, chain = simulate(builtin_document(name), SimConfig(seed=GOLDEN_SEED))
    dump_trace(trace, golden_trace_path(name))
    print(f"✅ Traza golden exportada a {golden_trace_path(name)}")
    if name == "case" and chain is not None:
        dump_chain(chain, golden_ledger_path(name))
        print(f"✅ Registro de custodia exportado a {golden_ledger_path(name)}")
