"""INI run configuration: parsing to SI domain records with line-level diagnostics.

Sections are ``[experiment]``, ``[molecule]``, ``[model]``, ``[scan]`` and
``[output]``. Values carry units (``266 nm``, ``1 ms``, ``10123 amu``); bare
numbers are SI. The full key list lives in ``docs/formats.md``.
"""
from __future__ import annotations

import configparser
import hashlib
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

from ..core import (BinaryAmplitude, CollapseParams, CustomGrating, Disk, DomainError, InterferometerSpec,
                    Model, MoleculeSpec, PointCluster, SinusoidalPhase, Sphere, de_broglie_wavenumber, validate)
from ..units import format_quantity, parse_quantity

PRESET_DIR = Path(__file__).resolve().parent.parent / "presets"

# key -> quantity kind; "str", "int", "bool" and "grating" are parsed specially
_SCHEMA = {
    "experiment": {
        "l1": "length", "l2": "length", "t1": "time", "t2": "time", "d": "length",
        "k": "wavenumber", "velocity": "velocity",
        "grating1": "grating", "grating2": "grating", "grating3": "grating",
        "allow_velocity_mismatch": "bool",
    },
    "molecule": {
        "n_a": "dimensionless", "total_mass": "mass", "atomic_mass": "mass",
        "geometry": "str", "radius": "length",
    },
    "model": {
        "model": "str", "lambda": "rate", "r_c": "length", "t": "temperature",
        "u_x": "velocity", "u_y": "velocity", "u_z": "velocity", "tau_c": "time",
        "prefactor": "rate", "dcsl_variants": "str",
    },
    "scan": {
        "rc_min": "length", "rc_max": "length", "rc_points": "int", "criterion": "dimensionless",
        "seed": "int", "data": "str", "order": "int",
        "n_points": "int", "periods": "int", "mean_count": "dimensionless",
        "visibility_uncertainty": "dimensionless",
        "x_max": "length", "x_points": "int",
        "lambda_min": "rate",
        "classicality_radius": "length", "classicality_time": "time",
        "delta_x": "length", "system_temperature": "temperature", "threshold": "dimensionless",
        "t_min": "temperature", "t_max": "temperature", "t_points": "int",
        "u_min": "velocity", "u_max": "velocity", "u_points": "int",
    },
    "output": {"directory": "str", "format": "str"},
}

# record field (as named by core.validate) -> config key
_FIELD_KEYS = {
    "lam": ("model", "lambda"), "r_C": ("model", "r_c"), "T": ("model", "t"), "u": ("model", "u_x"),
    "tau_C": ("model", "tau_c"), "n_A": ("molecule", "n_a"), "m_A": ("molecule", "total_mass"),
    "geometry": ("molecule", "geometry"), "geometry.radius": ("molecule", "radius"),
    "L1": ("experiment", "l1"), "L2": ("experiment", "l2"), "t1": ("experiment", "t1"),
    "t2": ("experiment", "t2"), "d": ("experiment", "d"), "k": ("experiment", "k"),
}


class ConfigError(DomainError):
    """A configuration value is missing, malformed or violates an invariant."""

    def __init__(self, message, *, path=None, section=None, key=None, line=None):
        where = []
        if path:
            where.append(str(path))
        if line:
            where.append(f"line {line}")
        if section:
            where.append(f"[{section}]" + (f" {key}" if key else ""))
        super().__init__(": ".join([", ".join(where), message]) if where else message)
        self.path, self.section, self.key, self.line = path, section, key, line


@dataclass(frozen=True)
class ScanSpec:
    rc_min: float = 1e-10
    rc_max: float = 1e-3
    rc_points: int = 100
    criterion: float = 9.0
    seed: int = 2026
    data: Optional[str] = None
    order: int = 16
    n_points: int = 100
    periods: int = 2
    mean_count: float = 1e4
    visibility_uncertainty: float = 0.1
    x_max: float = 1e-6
    x_points: int = 201
    lambda_min: Optional[float] = None
    classicality_radius: float = 1e-5
    classicality_time: float = 1e-2
    delta_x: Optional[float] = None
    system_temperature: float = 300.0
    threshold: float = 0.01
    t_min: float = 1e-12
    t_max: float = 1e3
    t_points: int = 61
    u_min: float = 1.0
    u_max: float = 1e7
    u_points: int = 61

    @property
    def r_C_grid(self):
        import numpy as np

        return np.logspace(math.log10(self.rc_min), math.log10(self.rc_max), self.rc_points)


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "out"
    format: str = "csv"


@dataclass(frozen=True)
class RunConfig:
    experiment: InterferometerSpec
    molecule: MoleculeSpec
    model: CollapseParams
    prefactor: Optional[float] = None
    dcsl_variants: Tuple[Tuple[float, float], ...] = ()
    scan: ScanSpec = field(default_factory=ScanSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    path: Optional[str] = None
    sha256: str = ""

    def data_path(self) -> Optional[Path]:
        """Fringe CSV named in ``[scan] data``, relative to the config file."""
        if not self.scan.data:
            return None
        p = Path(self.scan.data)
        if not p.is_absolute() and self.path:
            p = Path(self.path).parent / p
        return p


def resolve_config_path(name) -> Path:
    """A file path, or the name of a shipped preset (``kdtl``, ``dcompare``)."""
    p = Path(name)
    if p.is_file():
        return p
    preset = PRESET_DIR / f"{p.stem}.ini"
    if p.parent == Path(".") and preset.is_file():
        return preset
    raise ConfigError(f"config file not found: {name}")


def _line_index(text: str) -> dict:
    """(section, key) -> (1-based line number, key as written), by scanning the raw text."""
    out, section = {}, None
    for n, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"^\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip().lower()
            out.setdefault((section, None), (n, None))
            continue
        m = re.match(r"^([^=:#;\s][^=:]*?)\s*[=:]", s)
        if m and section is not None:
            key = m.group(1).strip()
            out.setdefault((section, key.lower()), (n, key))
    return out


class _Reader:
    def __init__(self, text: str, path):
        self.path = path
        self.lines = _line_index(text)
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        try:
            parser.read_string(text, source=str(path or "<config>"))
        except configparser.Error as exc:
            raise ConfigError(f"malformed config: {exc}", path=path) from None
        self.values = {}
        for section in parser.sections():
            name = section.strip().lower()
            if name not in _SCHEMA:
                raise ConfigError(f"unknown section; expected one of {sorted(_SCHEMA)}",
                                  path=path, section=section, line=self.lines.get((name, None), (None,))[0])
            for key, raw in parser.items(section):
                if key not in _SCHEMA[name]:
                    raise self.error(name, key, f"unknown key; expected one of {sorted(_SCHEMA[name])}")
                self.values[(name, key)] = raw.strip()

    def error(self, section, key, message):
        line, written = self.lines.get((section, key)) or (None, None)
        if line is None:
            line = self.lines.get((section, None), (None,))[0]
        return ConfigError(message, path=self.path, section=section, key=written or key, line=line)

    def has(self, section, key):
        return (section, key) in self.values

    def get(self, section, key, default=None, *, required=False):
        if (section, key) not in self.values:
            if required:
                raise self.error(section, key, "required key is missing")
            return default
        raw = self.values[(section, key)]
        kind = _SCHEMA[section][key]
        try:
            if kind == "str":
                return raw
            if kind == "int":
                value = float(raw)
                if not value.is_integer():
                    raise DomainError(f"expected an integer, got {raw!r}")
                return int(value)
            if kind == "bool":
                lowered = raw.lower()
                if lowered not in ("true", "false", "yes", "no", "1", "0"):
                    raise DomainError(f"expected true or false, got {raw!r}")
                return lowered in ("true", "yes", "1")
            if kind == "grating":
                return parse_grating(raw)
            return parse_quantity(raw, kind)
        except DomainError as exc:
            raise self.error(section, key, f"{raw!r}: {exc}") from None


def parse_grating(text: str):
    """``binary <open fraction>``, ``phase <amplitude rad>`` or ``custom c-N, ..., cN``."""
    parts = text.split(None, 1)
    if len(parts) != 2:
        raise DomainError(f"grating must be 'binary <f>', 'phase <phi>' or 'custom <c...>', got {text!r}")
    kind, rest = parts[0].lower(), parts[1]
    try:
        if kind == "binary":
            return BinaryAmplitude(float(rest))
        if kind == "phase":
            return SinusoidalPhase(parse_quantity(rest, "angle"))
        if kind == "custom":
            return CustomGrating(tuple(complex(c.strip().replace(" ", "")) for c in rest.split(",")))
    except ValueError as exc:
        raise DomainError(f"bad grating value {rest!r}: {exc}") from None
    raise DomainError(f"unknown grating kind {kind!r}; expected binary, phase or custom")


def format_grating(g) -> str:
    if isinstance(g, BinaryAmplitude):
        return f"binary {g.open_fraction!r}"
    if isinstance(g, SinusoidalPhase):
        return f"phase {g.phase_amplitude!r}"
    return "custom " + ", ".join(repr(c) for c in g.coefficients)


def _parse_variants(text: str) -> Tuple[Tuple[float, float], ...]:
    """``1e-8 K @ 2e4 m/s; 1e-9 K @ 1e5 m/s`` -> ((T, u_x), ...)."""
    out = []
    for item in filter(None, (s.strip() for s in text.split(";"))):
        if "@" not in item:
            raise DomainError(f"dCSL variant must read '<T> @ <u_x>', got {item!r}")
        T, u = (s.strip() for s in item.split("@", 1))
        out.append((parse_quantity(T, "temperature"), parse_quantity(u, "velocity")))
    return tuple(out)


def _molecule(r: _Reader) -> MoleculeSpec:
    n_A = r.get("molecule", "n_a", required=True)
    total, atomic = r.get("molecule", "total_mass"), r.get("molecule", "atomic_mass")
    if (total is None) == (atomic is None):
        raise r.error("molecule", "total_mass", "give exactly one of total_mass and atomic_mass")
    m_A = atomic if atomic is not None else total / n_A
    geometry = r.get("molecule", "geometry", "point").lower()
    radius = r.get("molecule", "radius")
    if geometry in ("sphere", "disk"):
        if radius is None:
            raise r.error("molecule", "radius", f"required for geometry {geometry}")
        geom = Sphere(radius) if geometry == "sphere" else Disk(radius)
    elif geometry in ("point", "pointcluster", "point_cluster"):
        geom = PointCluster()
    else:
        raise r.error("molecule", "geometry", f"unknown geometry {geometry!r}; expected sphere, disk or point")
    return MoleculeSpec(n_A=n_A, m_A=m_A, geometry=geom)


def _experiment(r: _Reader, mass: float) -> InterferometerSpec:
    L1 = r.get("experiment", "l1", required=True)
    L2 = r.get("experiment", "l2", L1)
    t1 = r.get("experiment", "t1", required=True)
    t2 = r.get("experiment", "t2", t1)
    k = r.get("experiment", "k")
    if k is None:
        v = r.get("experiment", "velocity")
        if v is None:
            if not (L1 > 0 and t1 > 0):
                raise r.error("experiment", "t1", "need L1 > 0 and t1 > 0 to derive the velocity")
            v = L1 / t1
        try:
            k = de_broglie_wavenumber(mass, v)
        except DomainError as exc:
            raise r.error("experiment", "velocity", str(exc)) from None
    kwargs = dict(L1=L1, L2=L2, t1=t1, t2=t2, d=r.get("experiment", "d", required=True), k=k,
                  allow_velocity_mismatch=r.get("experiment", "allow_velocity_mismatch", False))
    for g in ("grating1", "grating2", "grating3"):
        if r.has("experiment", g):
            kwargs[g] = r.get("experiment", g)
    return InterferometerSpec(**kwargs)


def _params(r: _Reader) -> CollapseParams:
    try:
        model = Model.parse(r.get("model", "model", "csl"))
    except DomainError as exc:
        raise r.error("model", "model", str(exc)) from None
    u = None
    if any(r.has("model", c) for c in ("u_x", "u_y", "u_z")):
        u = tuple(r.get("model", c, 0.0) for c in ("u_x", "u_y", "u_z"))
    return CollapseParams(model=model, lam=r.get("model", "lambda", 0.0), r_C=r.get("model", "r_c", 1e-7),
                          T=r.get("model", "t"), u=u, tau_C=r.get("model", "tau_c"))


def _scan(r: _Reader) -> ScanSpec:
    kwargs = {}
    for key in _SCHEMA["scan"]:
        if r.has("scan", key):
            kwargs[key] = r.get("scan", key)
    scan = ScanSpec(**kwargs)
    checks = [
        ("rc_min", scan.rc_min > 0), ("rc_max", scan.rc_max > scan.rc_min), ("rc_points", scan.rc_points >= 1),
        ("criterion", scan.criterion > 0), ("seed", scan.seed >= 0), ("order", scan.order >= 1),
        ("n_points", scan.n_points >= 8), ("periods", scan.periods >= 1), ("mean_count", scan.mean_count > 0),
        ("visibility_uncertainty", scan.visibility_uncertainty > 0),
        ("x_max", scan.x_max > 0), ("x_points", scan.x_points >= 2),
        ("lambda_min", scan.lambda_min is None or scan.lambda_min > 0),
        ("classicality_radius", scan.classicality_radius > 0), ("classicality_time", scan.classicality_time > 0),
        ("delta_x", scan.delta_x is None or scan.delta_x > 0),
        ("system_temperature", scan.system_temperature > 0), ("threshold", scan.threshold > 0),
        ("t_min", scan.t_min > 0), ("t_max", scan.t_max > scan.t_min), ("t_points", scan.t_points >= 1),
        ("u_min", scan.u_min > 0), ("u_max", scan.u_max > scan.u_min), ("u_points", scan.u_points >= 1),
    ]
    for key, ok in checks:
        if not ok:
            raise r.error("scan", key, f"invalid value {getattr(scan, key)!r}")
    return scan


def parse_config(text: str, path=None) -> RunConfig:
    r = _Reader(text, path)
    mol = _molecule(r)
    for v in validate(mol):
        section, key = _FIELD_KEYS.get(v.field, ("molecule", v.field.lower()))
        raise r.error(section, key, v.rule)
    spec = _experiment(r, mol.mass)
    for v in validate(spec):
        head = v.field.split(".")[0]
        section, key = _FIELD_KEYS.get(head, ("experiment", head.lower()))
        raise r.error(section, key, f"{v.field} {v.rule}")
    params = _params(r)
    for v in validate(params):
        section, key = _FIELD_KEYS.get(v.field, ("model", v.field.lower()))
        raise r.error(section, key, v.rule)
    prefactor = r.get("model", "prefactor")
    if prefactor is not None and not prefactor >= 0:
        raise r.error("model", "prefactor", "must be >= 0")
    try:
        variants = _parse_variants(r.get("model", "dcsl_variants", ""))
    except DomainError as exc:
        raise r.error("model", "dcsl_variants", str(exc)) from None
    if any(not (T > 0) for T, _ in variants):
        raise r.error("model", "dcsl_variants", "temperatures must be > 0")
    out = OutputSpec(directory=r.get("output", "directory", "out"), format=r.get("output", "format", "csv").lower())
    if out.format not in ("csv", "json"):
        raise r.error("output", "format", f"expected csv or json, got {out.format!r}")
    return RunConfig(experiment=spec, molecule=mol, model=params, prefactor=prefactor, dcsl_variants=variants,
                     scan=_scan(r), output=out, path=str(path) if path else None,
                     sha256=hashlib.sha256(text.encode("utf-8")).hexdigest())


def load_config(path) -> RunConfig:
    path = resolve_config_path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", path=path) from None
    return parse_config(text, path)


def dump_config(cfg: RunConfig) -> str:
    """INI text in SI units that :func:`parse_config` reads back to equal records."""
    e, m, p, s = cfg.experiment, cfg.molecule, cfg.model, cfg.scan
    fq = format_quantity
    lines = ["[experiment]",
             f"L1 = {fq(e.L1, 'length')}", f"L2 = {fq(e.L2, 'length')}",
             f"t1 = {fq(e.t1, 'time')}", f"t2 = {fq(e.t2, 'time')}",
             f"d = {fq(e.d, 'length')}", f"k = {fq(e.k, 'wavenumber')}",
             f"grating1 = {format_grating(e.grating1)}", f"grating2 = {format_grating(e.grating2)}",
             f"grating3 = {format_grating(e.grating3)}",
             f"allow_velocity_mismatch = {str(e.allow_velocity_mismatch).lower()}",
             "", "[molecule]", f"n_A = {m.n_A!r}", f"atomic_mass = {fq(m.m_A, 'mass')}"]
    geom = m.geometry
    if isinstance(geom, Sphere):
        lines += ["geometry = sphere", f"radius = {fq(geom.radius, 'length')}"]
    elif isinstance(geom, Disk):
        lines += ["geometry = disk", f"radius = {fq(geom.radius, 'length')}"]
    else:
        lines.append("geometry = point")
    lines += ["", "[model]", f"model = {p.model.value}", f"lambda = {fq(p.lam, 'rate')}",
              f"r_C = {fq(p.r_C, 'length')}"]
    if p.T is not None:
        lines.append(f"T = {fq(p.T, 'temperature')}")
    if p.u is not None:
        lines += [f"u_{c} = {fq(v, 'velocity')}" for c, v in zip("xyz", p.u)]
    if p.tau_C is not None:
        lines.append(f"tau_C = {fq(p.tau_C, 'time')}")
    if cfg.prefactor is not None:
        lines.append(f"prefactor = {fq(cfg.prefactor, 'rate')}")
    if cfg.dcsl_variants:
        lines.append("dcsl_variants = " + "; ".join(f"{fq(T, 'temperature')} @ {fq(u, 'velocity')}"
                                                     for T, u in cfg.dcsl_variants))
    lines += ["", "[scan]"]
    for key, kind in _SCHEMA["scan"].items():
        value = getattr(s, key)
        if value is None:
            continue
        if key == "data":
            path = cfg.data_path()
            lines.append(f"data = {path.resolve() if path else value}")
        elif kind in ("int", "str"):
            lines.append(f"{key} = {value}")
        else:
            lines.append(f"{key} = {fq(value, kind)}")
    lines += ["", "[output]", f"directory = {cfg.output.directory}", f"format = {cfg.output.format}", ""]
    return "\n".join(lines)


def describe(cfg: RunConfig) -> dict:
    """JSON-ready SI view of the resolved configuration."""
    from dataclasses import asdict

    def clean(v):
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        if isinstance(v, complex):
            return [v.real, v.imag]
        if hasattr(v, "value") and isinstance(v, Model):
            return v.value
        return v

    e = asdict(cfg.experiment)
    for g in ("grating1", "grating2", "grating3"):
        e[g] = format_grating(getattr(cfg.experiment, g))
    m = asdict(cfg.molecule)
    m["geometry"] = type(cfg.molecule.geometry).__name__
    m["radius"] = cfg.molecule.radius
    m["mass"] = cfg.molecule.mass
    return clean({
        "experiment": e, "molecule": m, "model": asdict(cfg.model), "prefactor": cfg.prefactor,
        "dcsl_variants": list(cfg.dcsl_variants), "scan": asdict(cfg.scan), "output": asdict(cfg.output),
    })
