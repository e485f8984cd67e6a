"""Study configuration: JSON in, validated dataclasses out, and back.

Design bounds are written in table units with the unit in the key
(``l_D_mm``, ``k_s_N_per_mm``, ``T_pt_N``).  Nested sections (``protocol``,
``world``, ``transmission``, ``tpe``) override fields of the corresponding
config class by field name, in SI.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from graspforge.dynamics.world import WorldConfig
from graspforge.objects import CATALOG, CATALOG_BY_NAME, ObjectSpec
from graspforge.optimizer.space import SearchSpace
from graspforge.optimizer.tpe import TpeConfig
from graspforge.scenario import ProtocolConfig
from graspforge.transmission import (
    DESIGN_NAMES,
    TABLE_UNIT_SCALE,
    TABLE_UNIT_SUFFIX,
    DesignParams,
    TransmissionConfig,
)


class ConfigError(ValueError):
    pass


def table_key(name: str) -> str:
    return f"{name}_{TABLE_UNIT_SUFFIX[name]}"


TABLE_KEYS = {table_key(n): n for n in DESIGN_NAMES}


def _default_table_bounds() -> dict[str, tuple[float, float]]:
    space = SearchSpace()
    return {
        table_key(n): (round(lo / TABLE_UNIT_SCALE[n], 9), round(hi / TABLE_UNIT_SCALE[n], 9))
        for n, (lo, hi) in space.bounds.items()
    }


NESTED = {
    "protocol": ProtocolConfig,
    "world": WorldConfig,
    "transmission": TransmissionConfig,
    "tpe": TpeConfig,
}


def _coerce(cls, section: str, overrides: dict):
    if not isinstance(overrides, dict):
        raise ConfigError(f"{section}: expected an object, got {type(overrides).__name__}")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(overrides) - set(known))
    if unknown:
        raise ConfigError(f"{section}: unknown keys {unknown}; allowed: {sorted(known)}")
    base = cls()
    values = {}
    for key, value in overrides.items():
        default = getattr(base, key)
        if isinstance(default, bool):
            ok = isinstance(value, bool)
        elif isinstance(default, int):
            ok = isinstance(value, int) and not isinstance(value, bool)
        else:
            ok = isinstance(value, (int, float)) and not isinstance(value, bool)
            value = float(value) if ok else value
        if not ok:
            raise ConfigError(f"{section}.{key}: expected {type(default).__name__}, got {value!r}")
        values[key] = value
    try:
        return replace(base, **values)
    except ValueError as exc:
        raise ConfigError(f"{section}: {exc}") from exc


@dataclass(frozen=True)
class StudyConfig:
    bounds: dict[str, tuple[float, float]] = field(default_factory=_default_table_bounds)
    catalog: tuple[str, ...] = tuple(o.name for o in CATALOG)
    m: int = 4
    n_iter: int = 2000
    seed: int = 0
    parallelism: int = 1
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    world: WorldConfig = field(default_factory=WorldConfig)
    transmission: TransmissionConfig = field(default_factory=TransmissionConfig)
    tpe: TpeConfig = field(default_factory=TpeConfig)
    out: str = "study"

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError("m must be at least 1")
        if self.n_iter < 1:
            raise ConfigError("n_iter must be at least 1")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if not self.catalog:
            raise ConfigError("catalog must not be empty")
        missing = [n for n in self.catalog if n not in CATALOG_BY_NAME]
        if missing:
            raise ConfigError(f"unknown objects {missing}; known: {', '.join(CATALOG_BY_NAME)}")
        try:
            self.space
        except ValueError as exc:
            raise ConfigError(f"bounds: {exc}") from exc

    @property
    def space(self) -> SearchSpace:
        return SearchSpace({
            n: (lo * TABLE_UNIT_SCALE[n], hi * TABLE_UNIT_SCALE[n])
            for n, (lo, hi) in ((TABLE_KEYS[k], v) for k, v in self.bounds.items())
        })

    @property
    def objects(self) -> list[ObjectSpec]:
        return [CATALOG_BY_NAME[n] for n in self.catalog]

    @classmethod
    def from_dict(cls, data: dict) -> "StudyConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        allowed = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ConfigError(f"unknown keys {unknown}; allowed: {sorted(allowed)}")
        kwargs = {}
        for key, value in data.items():
            if key == "bounds":
                kwargs[key] = _parse_bounds(value)
            elif key in NESTED:
                kwargs[key] = _coerce(NESTED[key], key, value)
            elif key == "catalog":
                if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                    raise ConfigError("catalog: expected a list of object names")
                kwargs[key] = tuple(value)
            elif key == "out":
                if not isinstance(value, str):
                    raise ConfigError("out: expected a string")
                kwargs[key] = value
            else:
                if not isinstance(value, int) or isinstance(value, bool):
                    raise ConfigError(f"{key}: expected an integer, got {value!r}")
                kwargs[key] = value
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path) -> "StudyConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "bounds":
                value = {k: list(v) for k, v in value.items()}
            elif f.name in NESTED:
                value = asdict(value)
            elif f.name == "catalog":
                value = list(value)
            out[f.name] = value
        return out

    def with_overrides(self, **changes) -> "StudyConfig":
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes)


def _parse_bounds(value) -> dict[str, tuple[float, float]]:
    if not isinstance(value, dict):
        raise ConfigError("bounds: expected an object of name_unit -> [lower, upper]")
    unknown = sorted(set(value) - set(TABLE_KEYS))
    if unknown:
        raise ConfigError(f"bounds: unknown keys {unknown}; allowed: {list(TABLE_KEYS)}")
    out = _default_table_bounds()
    for key, pair in value.items():
        if (not isinstance(pair, (list, tuple)) or len(pair) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)):
            raise ConfigError(f"bounds.{key}: expected [lower, upper]")
        lo, hi = float(pair[0]), float(pair[1])
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ConfigError(f"bounds.{key}: bounds must be finite")
        out[key] = (lo, hi)
    return out


def params_to_table(params: DesignParams) -> dict[str, float]:
    return {table_key(n): getattr(params, n) / TABLE_UNIT_SCALE[n] for n in DESIGN_NAMES}


def load_params(path: str | Path) -> DesignParams:
    """Design from a best.json (SI ``params``) or a flat object of table-unit keys."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read params {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    if "params" in data:
        si = data["params"]
        if not isinstance(si, dict):
            raise ConfigError(f"{path}: params must be an object")
        keys, scale = {n: n for n in DESIGN_NAMES}, {n: 1.0 for n in DESIGN_NAMES}
    else:
        si = data
        keys, scale = {n: table_key(n) for n in DESIGN_NAMES}, TABLE_UNIT_SCALE
        unknown = sorted(set(data) - set(TABLE_KEYS))
        if unknown:
            raise ConfigError(f"{path}: unknown keys {unknown}; expected {list(TABLE_KEYS)}")
    missing = [keys[n] for n in DESIGN_NAMES if keys[n] not in si]
    if missing:
        raise ConfigError(f"{path}: missing {missing}")
    bad = [keys[n] for n in DESIGN_NAMES if not isinstance(si[keys[n]], (int, float)) or isinstance(si[keys[n]], bool)]
    if bad:
        raise ConfigError(f"{path}: non-numeric values for {bad}")
    values = {n: si[keys[n]] * scale[n] for n in DESIGN_NAMES}
    params = DesignParams(**{n: float(values[n]) for n in DESIGN_NAMES})
    problems = params.violations()
    if problems:
        raise ConfigError(f"{path}: " + "; ".join(problems))
    return params
