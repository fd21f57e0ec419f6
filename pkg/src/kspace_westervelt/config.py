"""Run configuration: strict JSON schema, validation, and object builders.

A config file is a JSON object with the sections below; unknown keys are
rejected so typos surface immediately.

    {
      "name": "sec3a_1d_homogeneous",
      "grid": {"n": [640], "dx": [6.25e-4]},
      "medium": {
        "c0": 1500.0,                      # optional; defaults to background c
        "background": {"c": 1500, "rho": 1000, "beta": 3.5, "delta": 0},
        "inclusions": [
          {"shape": "cylinder", "center": [0, 0], "radius": 0.004, "c": 3000},
          {"shape": "slab", "axis": 0, "start": 0.0, "stop": null, "c": 2250}
        ],
        "maps": {"c": "c.bin"},            # raw float64 maps with .json sidecars
        "smoothing": null                  # or a cutoff fraction in (0, 1]
      },
      "source": {"p0": 1e6, "f0": 2e5, "sigma_sq": 1e-10, "x0": -0.1},
      "solver": {"scheme": "sinc", "cfl": 0.1, "t_end": 2.1e-4,
                 "h_order": 4, "bootstrap": "analytic"},
      "absorber": {"enabled": true, "thickness": 40, "u0": 2.0, "alpha": 0.1},
      "probes": [{"name": "x125mm", "position": [0.125]}],
      "snapshots": [],
      "output": {"directory": null, "snapshot_format": "raw"}
    }

``source.sigma_sq`` is the variance of the Gaussian envelope in s^2. A
value quoted as "sigma = 1e-10" is read as sigma^2 = 1e-10 s^2; reading it
as sigma = 1e-10 s would give a 10 GHz-wide pulse, which no quoted
bandwidth supports.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .boundary import AbsorberProfile, absorber_profile, in_layer
from .grid import GridSpec
from .medium import MediumMaps, smooth_medium
from .source import PulseSpec

SIGMA_NOTE = (
    "source.sigma_sq is the Gaussian variance in s^2 (envelope exp(-tau^2/(2 sigma_sq))); "
    "quoted 'sigma' values are read as sigma^2"
)


class ConfigError(ValueError):
    """Raised with every violation found, not only the first."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid config:\n  " + "\n  ".join(self.problems))


@dataclass
class GridConfig:
    n: list[int]
    dx: list[float]
    origin: list[float] | None = None


@dataclass
class Material:
    c: float = 1500.0
    rho: float = 1000.0
    beta: float = 0.0
    delta: float = 0.0


@dataclass
class Inclusion:
    shape: str
    c: float | None = None
    rho: float | None = None
    beta: float | None = None
    delta: float | None = None
    center: list[float] | None = None
    radius: float | None = None
    axis: int = 0
    start: float | None = None
    stop: float | None = None


@dataclass
class MediumConfig:
    background: Material = field(default_factory=Material)
    c0: float | None = None
    inclusions: list[Inclusion] = field(default_factory=list)
    maps: dict[str, str] = field(default_factory=dict)
    smoothing: float | None = None


@dataclass
class SourceConfig:
    p0: float
    f0: float
    sigma_sq: float = 1e-10
    x0: float = 0.0
    strip_halfwidth: float | None = None
    taper_width: float = 0.0
    burst_cycles: float | None = None
    ramp_cycles: float = 2.0


@dataclass
class SolverConfig:
    t_end: float
    cfl: float | None = None
    dt: float | None = None
    scheme: str = "sinc"
    h_order: int = 4
    bootstrap: str = "analytic"
    max_growth: float = 1e6
    force_unstable: bool = False


@dataclass
class AbsorberConfig:
    enabled: bool = True
    thickness: int = 20
    u0: float = 2.0
    alpha: float = 0.1
    rate_scale: float = 0.05


@dataclass
class Probe:
    name: str
    position: list[float]


@dataclass
class OutputConfig:
    directory: str | None = None
    snapshot_format: str = "raw"


@dataclass
class RunConfig:
    grid: GridConfig
    medium: MediumConfig
    solver: SolverConfig
    source: SourceConfig | None = None
    absorber: AbsorberConfig = field(default_factory=AbsorberConfig)
    probes: list[Probe] = field(default_factory=list)
    snapshots: list[float] = field(default_factory=list)
    output: OutputConfig = field(default_factory=OutputConfig)
    name: str = "run"
    deterministic: bool = True
    base_dir: str | None = field(default=None, compare=False)

    # -- serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        return d

    def config_hash(self) -> str:
        """Short digest of the physics-relevant settings (output location excluded)."""
        d = self.to_dict()
        d.pop("output")
        d.pop("name")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def replace(self, **sections) -> "RunConfig":
        new = copy.deepcopy(self)
        for k, v in sections.items():
            setattr(new, k, v)
        return new

    # -- builders -----------------------------------------------------------
    def build_grid(self) -> GridSpec:
        return GridSpec(tuple(self.grid.n), tuple(self.grid.dx), None if self.grid.origin is None else tuple(self.grid.origin))

    def build_medium(self, grid: GridSpec | None = None) -> MediumMaps:
        grid = grid or self.build_grid()
        return build_medium(self.medium, grid, self.base_dir)

    def build_pulse(self) -> PulseSpec | None:
        if self.source is None:
            return None
        return PulseSpec(**asdict(self.source))

    def build_absorber(self, grid: GridSpec | None = None) -> AbsorberProfile | None:
        if not self.absorber.enabled:
            return None
        grid = grid or self.build_grid()
        a = self.absorber
        return absorber_profile(grid, a.thickness, a.u0, a.alpha, a.rate_scale)

    @property
    def incident_speed(self) -> float:
        """Speed at which the analytic initial pulse travels (the background medium's)."""
        return float(self.medium.background.c)

    def resolve_dt(self, grid: GridSpec | None = None, medium: MediumMaps | None = None) -> float:
        if self.solver.dt is not None:
            return float(self.solver.dt)
        grid = grid or self.build_grid()
        medium = medium or self.build_medium(grid)
        return self.solver.cfl * grid.min_dx / medium.c_max


# -- parsing -----------------------------------------------------------------

_SECTION_TYPES = {
    "grid": GridConfig,
    "source": SourceConfig,
    "solver": SolverConfig,
    "absorber": AbsorberConfig,
    "output": OutputConfig,
}
_TOP_KEYS = {"name", "grid", "medium", "source", "solver", "absorber", "probes", "snapshots", "output", "deterministic"}
_REQUIRED = {"grid": {"n", "dx"}, "source": {"p0", "f0"}, "solver": {"t_end"}}


def _fields(cls) -> set[str]:
    return set(cls.__dataclass_fields__)


def _section(raw, cls, where: str, problems: list[str]):
    if not isinstance(raw, dict):
        problems.append(f"{where}: expected an object")
        return None
    unknown = set(raw) - _fields(cls)
    for k in sorted(unknown):
        problems.append(f"{where}.{k}: unknown key")
    missing = _REQUIRED.get(where, set()) - set(raw)
    for k in sorted(missing):
        problems.append(f"{where}.{k}: required")
    if missing:
        return None
    try:
        return cls(**{k: v for k, v in raw.items() if k not in unknown})
    except TypeError as exc:
        problems.append(f"{where}: {exc}")
        return None


def _number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _parse_medium(raw, problems: list[str]) -> MediumConfig | None:
    if not isinstance(raw, dict):
        problems.append("medium: expected an object")
        return None
    unknown = set(raw) - _fields(MediumConfig)
    for k in sorted(unknown):
        problems.append(f"medium.{k}: unknown key")
    bg_raw = raw.get("background", {})
    bg = None
    if isinstance(bg_raw, dict):
        for k in sorted(set(bg_raw) - _fields(Material)):
            problems.append(f"medium.background.{k}: unknown key")
        bg = Material(**{k: v for k, v in bg_raw.items() if k in _fields(Material)})
    else:
        problems.append("medium.background: expected an object")
    inclusions = []
    for i, inc in enumerate(raw.get("inclusions", []) or []):
        where = f"medium.inclusions[{i}]"
        if not isinstance(inc, dict):
            problems.append(f"{where}: expected an object")
            continue
        for k in sorted(set(inc) - _fields(Inclusion)):
            problems.append(f"{where}.{k}: unknown key")
        if "shape" not in inc:
            problems.append(f"{where}.shape: required")
            continue
        inclusions.append(Inclusion(**{k: v for k, v in inc.items() if k in _fields(Inclusion)}))
    maps = raw.get("maps", {}) or {}
    if not isinstance(maps, dict):
        problems.append("medium.maps: expected an object")
        maps = {}
    if bg is None:
        return None
    return MediumConfig(bg, raw.get("c0"), inclusions, dict(maps), raw.get("smoothing"))


def config_from_dict(raw: dict, base_dir=None) -> RunConfig:
    """Build and validate a :class:`RunConfig`; raises :class:`ConfigError` listing all problems."""
    problems: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigError(["config root must be an object"])
    for k in sorted(set(raw) - _TOP_KEYS):
        problems.append(f"{k}: unknown key")
    for k in ("grid", "medium", "solver"):
        if k not in raw:
            problems.append(f"{k}: required section missing")
    grid = _section(raw["grid"], GridConfig, "grid", problems) if "grid" in raw else None
    medium = _parse_medium(raw["medium"], problems) if "medium" in raw else None
    solver = _section(raw["solver"], SolverConfig, "solver", problems) if "solver" in raw else None
    source = None
    if raw.get("source") is not None:
        source = _section(raw["source"], SourceConfig, "source", problems)
    absorber = _section(raw.get("absorber", {}), AbsorberConfig, "absorber", problems)
    output = _section(raw.get("output", {}), OutputConfig, "output", problems)
    probes = []
    for i, p in enumerate(raw.get("probes", []) or []):
        if isinstance(p, dict):
            for k in sorted(set(p) - {"name", "position"}):
                problems.append(f"probes[{i}].{k}: unknown key")
            if "position" not in p:
                problems.append(f"probes[{i}].position: required")
                continue
            pos = p["position"]
            name = p.get("name", f"probe{i}")
        else:
            pos, name = p, f"probe{i}"
        pos = [pos] if _number(pos) else pos
        if not isinstance(pos, list) or not all(_number(v) for v in pos):
            problems.append(f"probes[{i}]: position must be a list of numbers")
            continue
        probes.append(Probe(str(name), [float(v) for v in pos]))
    snapshots = raw.get("snapshots", []) or []
    if not isinstance(snapshots, list) or not all(_number(t) for t in snapshots):
        problems.append("snapshots: expected a list of times in seconds")
        snapshots = []

    if problems or grid is None or medium is None or solver is None:
        raise ConfigError(problems or ["incomplete config"])

    cfg = RunConfig(
        grid=grid,
        medium=medium,
        solver=solver,
        source=source,
        absorber=absorber or AbsorberConfig(),
        probes=probes,
        snapshots=[float(t) for t in snapshots],
        output=output or OutputConfig(),
        name=str(raw.get("name", "run")),
        deterministic=bool(raw.get("deterministic", True)),
        base_dir=None if base_dir is None else str(base_dir),
    )
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    """Check cross-field invariants; raises :class:`ConfigError` with all violations."""
    problems: list[str] = []
    g = cfg.grid
    if isinstance(g.dx, (int, float)):
        g.dx = [float(g.dx)] * len(g.n)
    if isinstance(g.n, int):
        g.n = [g.n]
    grid = None
    if not (isinstance(g.n, list) and all(isinstance(v, int) and v >= 2 for v in g.n)):
        problems.append("grid.n: expected a list of integers >= 2")
    elif not (isinstance(g.dx, list) and len(g.dx) == len(g.n) and all(_number(v) and v > 0 for v in g.dx)):
        problems.append("grid.dx: expected one positive spacing per axis")
    elif g.origin is not None and (not isinstance(g.origin, list) or len(g.origin) != len(g.n)):
        problems.append("grid.origin: expected one coordinate per axis")
    else:
        grid = cfg.build_grid()

    s = cfg.solver
    if (s.cfl is None) == (s.dt is None):
        problems.append("solver: give exactly one of 'cfl' and 'dt' (the other is derived)")
    for key in ("cfl", "dt"):
        v = getattr(s, key)
        if v is not None and not (_number(v) and v > 0):
            problems.append(f"solver.{key}: must be positive")
    if not (_number(s.t_end) and s.t_end >= 0):
        problems.append("solver.t_end: must be non-negative")
    if s.scheme not in ("sinc", "leapfrog"):
        problems.append(f"solver.scheme: {s.scheme!r} is not 'sinc' or 'leapfrog'")
    if s.h_order not in (2, 4):
        problems.append("solver.h_order: must be 2 or 4")
    if s.bootstrap not in ("analytic", "linear"):
        problems.append(f"solver.bootstrap: {s.bootstrap!r} is not 'analytic' or 'linear'")

    m = cfg.medium
    bg = m.background
    for key in ("c", "rho", "beta", "delta"):
        if not _number(getattr(bg, key)):
            problems.append(f"medium.background.{key}: must be a number")
    if _number(bg.c) and bg.c <= 0:
        problems.append("medium.background.c: must be positive")
    if _number(bg.rho) and bg.rho <= 0:
        problems.append("medium.background.rho: must be positive")
    if _number(bg.delta) and bg.delta < 0:
        problems.append("medium.background.delta: must be non-negative")
    if m.c0 is not None and not (_number(m.c0) and m.c0 > 0):
        problems.append("medium.c0: must be positive")
    if m.smoothing is not None and not (_number(m.smoothing) and 0 < m.smoothing <= 1):
        problems.append("medium.smoothing: cutoff fraction must lie in (0, 1]")
    for i, inc in enumerate(m.inclusions):
        where = f"medium.inclusions[{i}]"
        if inc.shape == "cylinder":
            if inc.center is None or grid is not None and len(inc.center) != grid.ndim:
                problems.append(f"{where}.center: one coordinate per axis required")
            if not (_number(inc.radius) and inc.radius > 0):
                problems.append(f"{where}.radius: must be positive")
        elif inc.shape == "slab":
            if grid is not None and not 0 <= inc.axis < grid.ndim:
                problems.append(f"{where}.axis: out of range")
            if inc.start is None and inc.stop is None:
                problems.append(f"{where}: slab needs 'start' and/or 'stop'")
        else:
            problems.append(f"{where}.shape: {inc.shape!r} is not 'cylinder' or 'slab'")
        if inc.c is not None and not (_number(inc.c) and inc.c > 0):
            problems.append(f"{where}.c: must be positive")
        if inc.rho is not None and not (_number(inc.rho) and inc.rho > 0):
            problems.append(f"{where}.rho: must be positive")
        if inc.delta is not None and not (_number(inc.delta) and inc.delta >= 0):
            problems.append(f"{where}.delta: must be non-negative")
    for key in m.maps:
        if key not in ("c", "rho", "beta", "delta"):
            problems.append(f"medium.maps.{key}: unknown map (use c, rho, beta or delta)")

    a = cfg.absorber
    if a.enabled:
        if not (isinstance(a.thickness, int) and a.thickness >= 0):
            problems.append("absorber.thickness: must be a non-negative integer")
        elif grid is not None and any(2 * a.thickness >= n for n in grid.n):
            problems.append(f"absorber.thickness: {a.thickness} points per edge do not fit grid {grid.n}")

    if cfg.source is not None:
        try:
            cfg.build_pulse()
        except ValueError as exc:
            problems.append(f"source: {exc}")

    if cfg.output.snapshot_format not in ("raw", "npy"):
        problems.append("output.snapshot_format: must be 'raw' or 'npy'")
    for t in cfg.snapshots:
        if _number(s.t_end) and not 0 <= t <= s.t_end:
            problems.append(f"snapshots: time {t:g} s lies outside [0, t_end]")

    names = [p.name for p in cfg.probes]
    for dup in sorted({n for n in names if names.count(n) > 1}):
        problems.append(f"probes: duplicate name {dup!r}")
    if grid is not None:
        for p in cfg.probes:
            if len(p.position) != grid.ndim:
                problems.append(f"probe {p.name!r}: position needs {grid.ndim} coordinates")
                continue
            try:
                idx = grid.index_of(p.position)
            except ValueError:
                problems.append(f"probe {p.name!r}: position {p.position} lies outside the domain")
                continue
            if a.enabled and isinstance(a.thickness, int) and in_layer(grid, idx, a.thickness):
                problems.append(f"probe {p.name!r}: position {p.position} lies inside the absorbing layer")

    if problems:
        raise ConfigError(problems)


def parse_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: not valid JSON ({exc})"]) from exc
    return config_from_dict(raw, base_dir=path.parent)


# -- presets -----------------------------------------------------------------

def preset_names() -> list[str]:
    files = resources.files(__package__).joinpath("presets").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".json"))


def preset_dict(name: str) -> dict:
    name = name[:-5] if name.endswith(".json") else name
    res = resources.files(__package__).joinpath("presets").joinpath(f"{name}.json")
    if not res.is_file():
        raise KeyError(f"no preset named {name!r}; available: {', '.join(preset_names())}")
    return json.loads(res.read_text())


def load_preset(name: str) -> RunConfig:
    return config_from_dict(preset_dict(name))


def load_config(spec: str) -> RunConfig:
    """Path to a JSON file, or the name of a bundled preset."""
    p = Path(spec)
    if p.is_file():
        return parse_config(p)
    return load_preset(spec)


# -- medium construction -----------------------------------------------------

def _read_map(path: Path, grid: GridSpec) -> np.ndarray:
    from .analysis import read_raw_field

    data, meta = read_raw_field(path)
    if tuple(data.shape) != grid.n:
        raise ConfigError([f"map {path}: shape {tuple(data.shape)} does not match grid {grid.n}"])
    if "dx" in meta and not np.allclose(meta["dx"], grid.dx, rtol=1e-9):
        raise ConfigError([f"map {path}: dx {meta['dx']} does not match grid {list(grid.dx)}"])
    return data


def build_medium(mc: MediumConfig, grid: GridSpec, base_dir=None) -> MediumMaps:
    bg = mc.background
    maps = {k: np.full(grid.n, float(getattr(bg, k))) for k in ("c", "rho", "beta", "delta")}
    coords = grid.coords()
    for inc in mc.inclusions:
        if inc.shape == "cylinder":
            r2 = sum((x - x0) ** 2 for x, x0 in zip(coords, inc.center))
            mask = r2 <= inc.radius**2
        else:
            x = coords[inc.axis]
            mask = np.ones_like(x, dtype=bool)
            if inc.start is not None:
                mask &= x >= inc.start
            if inc.stop is not None:
                mask &= x < inc.stop
        mask = np.broadcast_to(mask, grid.n)
        for k in maps:
            v = getattr(inc, k)
            if v is not None:
                maps[k][mask] = float(v)
    base = Path(base_dir) if base_dir is not None else Path.cwd()
    for key, rel in mc.maps.items():
        maps[key] = _read_map(base / rel, grid)
    c0 = float(mc.c0) if mc.c0 is not None else float(bg.c)
    medium = MediumMaps(maps["c"], maps["rho"], maps["beta"], maps["delta"], c0)
    if mc.smoothing is not None and mc.smoothing < 1:
        medium = smooth_medium(medium, grid, mc.smoothing)
    return medium
