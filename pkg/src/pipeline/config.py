"""Configuration for simulation runs.

Every key is documented in docs/CONFIGURATION.md together with the model
symbol it sets. Configurations are YAML or JSON documents with the
sections ``physics``, ``discretization``, ``time``, ``initial`` and
``output`` plus the top-level keys ``cache`` and ``seed``.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from src.core.errors import SchemaError

try:  # Optional dependency - documented in requirements
    import yaml  # type: ignore
except ImportError:  # pragma: no cover - exercised when PyYAML is missing
    yaml = None  # type: ignore


# ---------------------------------------------------------------------------
# Field coercion
# ---------------------------------------------------------------------------


def _coerce(value: Any, kind: str, path: str) -> Any:
    optional = kind.startswith("Optional[")
    if optional:
        if value is None:
            return None
        kind = kind[len("Optional[") : -1]
    try:
        if kind == "float":
            if isinstance(value, bool):
                raise TypeError("boolean given")
            result = float(value)
            if not math.isfinite(result):
                raise ValueError("not finite")
            return result
        if kind == "int":
            if isinstance(value, bool) or float(value) != int(float(value)):
                raise TypeError("not an integer")
            return int(float(value))
        if kind == "bool":
            if isinstance(value, bool):
                return value
            if str(value).lower() in {"true", "yes", "1"}:
                return True
            if str(value).lower() in {"false", "no", "0"}:
                return False
            raise ValueError("not a boolean")
        if kind == "str":
            return str(value)
        if kind == "Path":
            return Path(value)
        if kind.startswith("Dict"):
            if not isinstance(value, dict):
                raise TypeError("expected a mapping")
            return dict(value)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: cannot read {value!r} as {kind} ({exc})", path) from exc
    raise SchemaError(f"{path}: unsupported field type {kind}", path)


def _section(cls, data: Any, path: str):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: expected a mapping", path)
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise SchemaError(f"{path}.{unknown[0]}: unknown key", f"{path}.{unknown[0]}")
    values = {name: _coerce(data[name], known[name].type, f"{path}.{name}") for name in data}
    return cls(**values)


def _require(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise SchemaError(f"{path}: {message}", path)


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------


@dataclass
class PhysicsConfig:
    """Physical parameters: L, rho_f, rho_s, mu, beta, alpha."""

    length: float = 1.0
    rho_f: float = 1.0
    rho_s: float = 1.0
    mu: float = 0.1
    beta: float = 1.0
    alpha: float = 0.01

    def validate(self) -> None:
        for name in ("length", "rho_f", "rho_s", "mu", "beta", "alpha"):
            _require(getattr(self, name) > 0, f"physics.{name}", "must be positive")


@dataclass
class DiscretizationConfig:
    """Basis size N and quadrature resolution."""

    n_pairs: int = 16
    interior_wavenumbers: Optional[int] = None
    interior_profiles: Optional[int] = None
    n_x: Optional[int] = None
    n_z: Optional[int] = None
    oversampling: float = 2.0
    beam_projection: str = "l2"
    compat_tol: float = 1e-6

    def validate(self) -> None:
        _require(self.n_pairs >= 2, "discretization.n_pairs", "must be >= 2")
        _require(self.oversampling >= 1.0, "discretization.oversampling", "must be >= 1")
        _require(
            self.beam_projection in ("l2", "h2"),
            "discretization.beam_projection",
            "must be 'l2' or 'h2'",
        )
        _require(self.compat_tol > 0, "discretization.compat_tol", "must be positive")

    def grid_sizes(self, max_wavenumber: int, max_z_degree: int, length: float = 1.0) -> tuple:
        """Quadrature sizes, derived from the basis where not set explicitly.

        The z rule also has to resolve the boundary layers exp(-kappa z) of
        the lifted profiles, so it grows with the largest wavenumber.
        """
        n_x = self.n_x
        if n_x is None:
            n_x = max(16, 2 * math.ceil(self.oversampling * 4 * max_wavenumber / 2))
        n_z = self.n_z
        if n_z is None:
            kappa_max = 2.0 * math.pi * max_wavenumber / length
            n_z = max(
                24,
                math.ceil(self.oversampling * (max_z_degree + 1)),
                math.ceil(kappa_max) + 24,
            )
        return n_x, n_z


@dataclass
class TimeConfig:
    """Time step, horizon and Picard coupling controls."""

    dt: float = 1e-3
    t_end: float = 0.5
    picard_tol: float = 1e-10
    picard_max_iter: int = 25
    dt_halving: bool = False
    dt_min: float = 1e-6
    h_floor: float = 1e-6

    def validate(self) -> None:
        _require(self.dt > 0, "time.dt", "must be positive")
        _require(self.t_end > 0, "time.t_end", "must be positive")
        _require(self.picard_tol > 0, "time.picard_tol", "must be positive")
        _require(self.picard_max_iter >= 1, "time.picard_max_iter", "must be >= 1")
        _require(self.dt_min > 0, "time.dt_min", "must be positive")
        _require(self.h_floor > 0, "time.h_floor", "must be positive")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class InitialConfig:
    """Initial data: a registered scenario with parameters, or a sampled file."""

    scenario: str = "flat"
    params: Dict[str, Any] = field(default_factory=dict)
    file: Optional[Path] = None

    def validate(self) -> None:
        _require(bool(self.scenario), "initial.scenario", "must name a scenario")


@dataclass
class OutputConfig:
    """Output cadence, paths and formats."""

    directory: Path = Path("output")
    output_dt: Optional[float] = None
    snapshots: bool = False
    snapshot_format: str = "csv"
    snapshot_nx: int = 64
    snapshot_nz: int = 16
    checkpoint_every: int = 0
    norm_ceiling: float = 1e6

    def validate(self) -> None:
        if self.output_dt is not None:
            _require(self.output_dt > 0, "output.output_dt", "must be positive")
        _require(self.snapshot_format in ("csv", "npz"), "output.snapshot_format", "must be 'csv' or 'npz'")
        _require(self.snapshot_nx >= 2, "output.snapshot_nx", "must be >= 2")
        _require(self.snapshot_nz >= 2, "output.snapshot_nz", "must be >= 2")
        _require(self.checkpoint_every >= 0, "output.checkpoint_every", "must be >= 0")
        _require(self.norm_ceiling > 0, "output.norm_ceiling", "must be positive")


_SECTIONS = {
    "physics": PhysicsConfig,
    "discretization": DiscretizationConfig,
    "time": TimeConfig,
    "initial": InitialConfig,
    "output": OutputConfig,
}


@dataclass
class SimConfig:
    """Top-level configuration of a simulation run."""

    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    discretization: DiscretizationConfig = field(default_factory=DiscretizationConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    cache: Optional[Path] = None
    seed: int = 0

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base_dir: Optional[Path] = None) -> "SimConfig":
        if not isinstance(data, dict):
            raise SchemaError("configuration must be a mapping at the top level")
        unknown = sorted(set(data) - set(_SECTIONS) - {"cache", "seed"})
        if unknown:
            raise SchemaError(f"{unknown[0]}: unknown section", unknown[0])

        sections = {name: _section(kind, data.get(name), name) for name, kind in _SECTIONS.items()}
        config = cls(
            **sections,
            cache=_coerce(data.get("cache"), "Optional[Path]", "cache"),
            seed=_coerce(data.get("seed", 0), "int", "seed"),
        )
        if base_dir is not None:
            config._resolve_paths(base_dir)
        config.validate()
        return config

    def _resolve_paths(self, base_dir: Path) -> None:
        if self.initial.file is not None and not self.initial.file.is_absolute():
            self.initial.file = (base_dir / self.initial.file).resolve()
        if self.cache is not None and str(self.cache) != ":memory:" and not self.cache.is_absolute():
            self.cache = (base_dir / self.cache).resolve()

    def validate(self) -> None:
        for name in _SECTIONS:
            getattr(self, name).validate()
        if self.output.output_dt is not None:
            ratio = self.output.output_dt / self.time.dt
            _require(
                abs(ratio - round(ratio)) < 1e-9 and round(ratio) >= 1,
                "output.output_dt",
                "must be a positive multiple of time.dt",
            )

    def to_dict(self) -> Dict[str, Any]:
        """Serialise to plain types (paths as strings)."""

        def plain(value: Any) -> Any:
            if isinstance(value, Path):
                return str(value)
            if isinstance(value, dict):
                return {k: plain(v) for k, v in value.items()}
            if isinstance(value, list):
                return [plain(v) for v in value]
            return value

        data = {name: plain(asdict(getattr(self, name))) for name in _SECTIONS}
        data["cache"] = plain(self.cache)
        data["seed"] = self.seed
        return data

    @property
    def output_every(self) -> int:
        if self.output.output_dt is None:
            return 1
        return int(round(self.output.output_dt / self.time.dt))


# ---------------------------------------------------------------------------
# Loading, overrides, hashing
# ---------------------------------------------------------------------------


def _read_document(config_path: Path) -> Any:
    raw_text = config_path.read_text()
    suffix = config_path.suffix.lower()
    if suffix in {".yaml", ".yml"}:
        if yaml is None:
            raise RuntimeError(
                "PyYAML is required to parse YAML configuration files. "
                "Install it via `pip install PyYAML`."
            )
        return yaml.safe_load(raw_text) or {}
    if suffix == ".json":
        return json.loads(raw_text or "{}")
    raise SchemaError(f"Unsupported configuration format '{suffix}'. Use .yaml, .yml, or .json.")


def load_config(path: Path | str) -> SimConfig:
    """Load a simulation configuration from JSON or YAML."""

    config_path = Path(path)
    if not config_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")
    data = _read_document(config_path)
    return SimConfig.from_dict(data, config_path.parent.resolve())


def write_config(config: SimConfig, path: Path | str) -> Path:
    """Write a configuration document (format chosen by suffix)."""

    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    data = config.to_dict()
    if target.suffix.lower() in {".yaml", ".yml"}:
        if yaml is None:
            raise RuntimeError("PyYAML is required to write YAML configuration files.")
        target.write_text(yaml.safe_dump(data, sort_keys=False))
    else:
        target.write_text(json.dumps(data, indent=2))
    return target


def _parse_scalar(text: str) -> Any:
    if yaml is not None:
        return yaml.safe_load(text)
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(config: SimConfig, overrides: Sequence[str]) -> SimConfig:
    """Return a copy with ``section.key=value`` assignments applied."""

    data = copy.deepcopy(config.to_dict())
    for item in overrides:
        if "=" not in item:
            raise SchemaError(f"override '{item}' is not of the form key=value")
        key, _, raw = item.partition("=")
        parts: List[str] = [p for p in key.strip().split(".") if p]
        if not parts:
            raise SchemaError(f"override '{item}' has an empty key")
        target = data
        for part in parts[:-1]:
            child = target.get(part)
            if child is None:
                child = target[part] = {}
            if not isinstance(child, dict):
                raise SchemaError(f"{key}: cannot descend into a scalar", key)
            target = child
        target[parts[-1]] = _parse_scalar(raw.strip())
    return SimConfig.from_dict(data)


def config_hash(config: SimConfig) -> str:
    """SHA-256 over the canonical JSON form of the configuration."""

    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()
