import os
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Mapping, Optional

from dotenv import dotenv_values

from .logger import logger

CONFIG_ENV_VAR = "SYNDETIC_CONFIG"
DEFAULT_CONFIG_PATH = "syndetic.env"


@dataclass(frozen=True)
class RunConfig:
    """Search scales, caps and the seed shared by every command"""
    ball_cap: int = 10**6
    search_cap: int = 2 * 10**6
    partition_cap: int = 10**6
    grid_cap: int = 4 * 10**6
    radius: int = 4
    z_window: int = 1000
    max_shift: int = 60
    seed: int = 0
    cert_dir: str = "certificates"
    parallelism: int = 1
    finite_subset_cap: int = 16
    periodic_cap: int = 12
    scs_exhaustive_cap: int = 200000
    scs_restarts: int = 64

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def replace(self, **changes: Any) -> "RunConfig":
        values = self.to_dict()
        values.update({k: v for k, v in changes.items() if v is not None})
        return RunConfig(**values)


def _env_key(name: str) -> str:
    return f"SYNDETIC_{name.upper()}"


def _coerce(name: str, raw: str) -> Any:
    default = getattr(RunConfig, name)
    if isinstance(default, int):
        return int(raw)
    return raw


def load_config(path: Optional[str] = None, environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """Load RunConfig from a dotenv-style key-value file, then apply environment overrides.

    The file path comes from `path`, else from $SYNDETIC_CONFIG, else `syndetic.env`.
    A missing file is not an error: defaults apply.
    """
    environ = os.environ if environ is None else environ
    path = path or environ.get(CONFIG_ENV_VAR, DEFAULT_CONFIG_PATH)

    file_values: Dict[str, Optional[str]] = {}
    if path and os.path.exists(path):
        logger.info(f"Loading run configuration from {path}")
        file_values = dotenv_values(path)

    values: Dict[str, Any] = {}
    for field in fields(RunConfig):
        key = _env_key(field.name)
        raw = environ.get(key, file_values.get(key))
        if raw is None or raw == "":
            continue
        try:
            values[field.name] = _coerce(field.name, raw)
        except ValueError:
            raise ValueError(f"Configuration key {key} expects an integer, got {raw!r}")

    return RunConfig(**values)
