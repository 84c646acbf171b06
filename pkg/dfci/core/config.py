"""Configuración simple por variables de entorno (sin Pydantic Settings)"""
import os

from dotenv import load_dotenv

load_dotenv()


def get_env(key: str, default: str = "") -> str:
    return os.getenv(key, default)


# Salida de la CLI
COLOR = get_env("DFCI_COLOR", "0") == "1"
LOG_LEVEL = get_env("DFCI_LOG_LEVEL", "WARNING").upper()

# Simulación
LOOP_CAP = int(get_env("DFCI_LOOP_CAP", "3"))
BASE_TS = get_env("DFCI_BASE_TS", "2024-01-01T00:00:00Z")
EVIDENCE_ID = get_env("DFCI_EVIDENCE_ID", "seized-devices")

# Oráculo de linealizaciones
ORACLE_MAX_EVENTS = int(get_env("DFCI_ORACLE_MAX_EVENTS", "24"))
ORACLE_EXPANSION_CAP = int(get_env("DFCI_ORACLE_EXPANSION_CAP", "10000"))
LINEARIZATION_CAP = int(get_env("DFCI_LINEARIZATION_CAP", "100000"))


class SimpleSettings:
    def __init__(self):
        self.COLOR = COLOR
        self.LOG_LEVEL = LOG_LEVEL
        self.LOOP_CAP = LOOP_CAP
        self.BASE_TS = BASE_TS
        self.EVIDENCE_ID = EVIDENCE_ID
        self.ORACLE_MAX_EVENTS = ORACLE_MAX_EVENTS
        self.ORACLE_EXPANSION_CAP = ORACLE_EXPANSION_CAP
        self.LINEARIZATION_CAP = LINEARIZATION_CAP

    def color_enabled(self) -> bool:
        # La CLI relee la variable para respetar cambios en tiempo de ejecución
        return get_env("DFCI_COLOR", "1" if self.COLOR else "0") == "1"


settings = SimpleSettings()
