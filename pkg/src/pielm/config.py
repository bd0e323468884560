"""Run configuration: defaults, INI-style files and CLI overrides."""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

from .solver import DEFAULT_RCOND

# hidden width and sample counts per spatial dimension
DEFAULTS_1D = {"M": 150, "nc": 100, "ni": 50}
DEFAULTS_2D = {"M": 200, "nc": 2000, "ni": 401}

STRATEGIES = ("random", "grid")


@dataclass(frozen=True)
class RunConfig:
    case: int = 1
    seed: int = 1
    M: Optional[int] = None
    nc: Optional[int] = None
    ni: Optional[int] = None
    nf: Optional[int] = None
    rcond: float = DEFAULT_RCOND
    weight_lo: float = -1.0
    weight_hi: float = 1.0
    strategy: str = "random"
    normalize_inputs: bool = False
    include_fixed_neumann: bool = False
    row_scale: str = ""
    grid: int = 100
    grid_t: int = 100
    trace_samples: int = 101
    out: str = "runs"

    def resolved(self) -> "RunConfig":
        """Fill size defaults from the case's dimension and validate."""
        if self.case not in (1, 2, 3, 4):
            raise ValueError(f"case must be 1..4, got {self.case}")
        base = DEFAULTS_1D if self.case in (1, 2) else DEFAULTS_2D
        cfg = replace(
            self,
            M=self.M if self.M is not None else base["M"],
            nc=self.nc if self.nc is not None else base["nc"],
            ni=self.ni if self.ni is not None else base["ni"],
        )
        cfg = replace(cfg, nf=cfg.nf if cfg.nf is not None else cfg.ni)
        for name in ("M", "nc", "ni", "nf", "grid", "grid_t", "trace_samples"):
            if getattr(cfg, name) < 1:
                raise ValueError(f"{name} must be positive")
        if cfg.seed < 0:
            raise ValueError("seed must be non-negative")
        if cfg.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if cfg.weight_lo > cfg.weight_hi:
            raise ValueError("weight_lo must not exceed weight_hi")
        if cfg.include_fixed_neumann and cfg.case != 1:
            raise ValueError("include_fixed_neumann only applies to case 1")
        parse_row_scale(cfg.row_scale)
        return cfg

    def as_dict(self):
        return asdict(self)


def parse_row_scale(text: str) -> dict:
    """``"interface.:10,stefan:2"`` -> ``{"interface.": 10.0, "stefan": 2.0}``."""
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        label, _, value = item.rpartition(":")
        if not label:
            raise ValueError(f"row_scale entry {item!r} must look like label:factor")
        out[label] = float(value)
    return out


def _coerce(name, raw):
    kind = {f.name: f.type for f in fields(RunConfig)}[name]
    if "bool" in str(kind):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if "int" in str(kind):
        return int(raw)
    if "float" in str(kind):
        return float(raw)
    return raw.strip()


def load_config(path) -> dict:
    """Read a sectioned ``key = value`` file; section names are ignored."""
    parser = configparser.ConfigParser()
    parser.optionxform = str
    with open(path) as fh:
        parser.read_file(fh)
    known = {f.name for f in fields(RunConfig)}
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            if key not in known:
                raise ValueError(f"unknown config key {key!r} in [{section}]")
            values[key] = _coerce(key, raw)
    return values


def make_config(file_values=None, **overrides) -> RunConfig:
    """File values first, then non-None overrides, then resolution."""
    values = dict(file_values or {})
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values).resolved()
