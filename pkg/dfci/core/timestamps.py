"""Marcas de tiempo ISO-8601 con desplazamiento horario"""
from datetime import datetime


def parse_timestamp(value: str) -> datetime:
    """Interpreta `value` (se admite el sufijo `Z`); exige desplazamiento explícito"""
    try:
        instant = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError as exc:
        raise ValueError(f"marca de tiempo no ISO-8601: {value}") from exc
    if instant.tzinfo is None:
        raise ValueError(f"marca de tiempo sin desplazamiento horario: {value}")
    return instant
