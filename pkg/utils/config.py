"""
Model Configuration Documents
=============================

Plain `key = value` text, the same syntax as a .env file, parsed with
python-dotenv. Comments and blank lines are allowed; unknown keys are
rejected with the offending key named in the error.

    n = 4
    m = 4
    class = V
    f_d_hz = 100
    samples = 100000
    s_ratios = 0.8, 0.6, 0.4
"""

import logging
import math
from io import StringIO
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

from dotenv import dotenv_values

from constants import Defaults
from models.types import ModelConfig
from utils.errors import ConfigError

logger = logging.getLogger(__name__)


def _as_int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {text!r}") from None


def _as_float(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(key, f"expected a number, got {text!r}") from None
    if math.isnan(value):
        raise ConfigError(key, "NaN is not allowed")
    return value


def _as_ratios(key: str, text: str) -> Optional[Tuple[float, ...]]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    return tuple(_as_float(key, p) for p in parts) if parts else None


def _as_class(key: str, text: str) -> str:
    return text.strip().upper()


def _as_theta(key: str, text: str) -> Optional[float]:
    return _as_float(key, text) if text.strip() else None


# document key -> (ModelConfig field, parser)
FIELDS: Dict[str, Tuple[str, Callable[[str, str], Any]]] = {
    "n": ("n", _as_int),
    "m": ("m", _as_int),
    "class": ("model_class", _as_class),
    "f_d_hz": ("f_d", _as_float),
    "s_f": ("s_f", _as_float),
    "samples": ("n_sam", _as_int),
    "k_f": ("k_f", _as_float),
    "s_ratios": ("s_ratios", _as_ratios),
    "omega": ("omega", _as_float),
    "n_s": ("n_s", _as_int),
    "seed": ("seed", _as_int),
    "theta": ("theta", _as_theta),
}


def parse_config(text: str, scenario: bool = False, **overrides) -> ModelConfig:
    """
    Build a validated ModelConfig from a document. S_f defaults to 20 for
    scenario runs and 8 otherwise; keyword overrides win over the document.
    """
    raw = dotenv_values(stream=StringIO(text), interpolate=False)
    values: Dict[str, Any] = {"s_f": Defaults.S_F_SCENARIO if scenario else Defaults.S_F_GENERATE}
    for key, value in raw.items():
        name = key.strip().lower()
        if name not in FIELDS:
            raise ConfigError(name, f"unknown key (allowed: {', '.join(FIELDS)})")
        if value is None:
            raise ConfigError(name, "missing '=' and value")
        field_name, convert = FIELDS[name]
        values[field_name] = convert(name, value.strip())
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ModelConfig(**values)


def load_config(path, scenario: bool = False, **overrides) -> ModelConfig:
    text = Path(path).read_text(encoding="utf-8")
    config = parse_config(text, scenario=scenario, **overrides)
    logger.debug(f"loaded config {path}: class {config.model_class}, {config.n}x{config.m}")
    return config


def serialize_config(config: ModelConfig) -> str:
    """Document text that parse_config turns back into an equal config"""
    lines = [
        f"n = {config.n}",
        f"m = {config.m}",
        f"class = {config.model_class}",
        f"f_d_hz = {config.f_d!r}",
        f"s_f = {config.s_f!r}",
        f"samples = {config.n_sam}",
        f"k_f = {config.k_f!r}",
        f"omega = {config.omega!r}",
        f"n_s = {config.n_s}",
        f"seed = {config.seed}",
        f"theta = {'' if config.theta is None else repr(config.theta)}",
    ]
    if config.s_ratios:
        lines.append(f"s_ratios = {', '.join(repr(r) for r in config.s_ratios)}")
    return "\n".join(lines) + "\n"
