"""Config-driven experiment protocols and their file outputs."""

from .config import ConfigError, UnknownKind, load_config, parse_config, resolve
from .output import Table, format_csv, read_csv, write_outputs
from .runners import execute, plan

__all__ = [
    "ConfigError", "Table", "UnknownKind", "execute", "format_csv", "load_config",
    "parse_config", "plan", "read_csv", "resolve", "write_outputs",
]
