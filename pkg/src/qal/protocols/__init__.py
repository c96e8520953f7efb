"""Bundled campaign configurations for the four benchmark systems.

Each file runs against its synthetic stand-in unless ``[data] dataset`` is
pointed at a real table with the same schema.
"""

from importlib import resources

PROTOCOLS = ("system_1", "system_2", "system_3", "system_4")


def protocol_text(name: str) -> str:
    if name not in PROTOCOLS:
        raise ValueError(f"unknown protocol {name!r}; expected one of {PROTOCOLS}")
    return resources.files(__name__).joinpath(f"{name}.toml").read_text(encoding="utf-8")
