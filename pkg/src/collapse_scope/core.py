"""Physical constants, shared domain records and their validation.

Every quantity held by these records is SI. Conversion from laboratory units
(amu, nm, ms, ...) happens in :mod:`collapse_scope.units` at the I/O boundary.
"""
from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass, field, replace
from typing import Optional, Union


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to meet its accuracy contract."""


class TruncationError(NumericalError):
    """A truncated series did not converge within the allowed number of terms."""


@dataclass(frozen=True)
class Constants:
    hbar: float = 1.054571817e-34  # J s
    k_B: float = 1.380649e-23  # J/K
    amu: float = 1.66053906660e-27  # kg
    m0: float = 1.67262192369e-27  # kg, proton
    m_e: float = 9.1093837015e-31  # kg


# CODATA 2018
CONSTANTS = Constants()
HBAR = CONSTANTS.hbar
K_B = CONSTANTS.k_B
AMU = CONSTANTS.amu
M0 = CONSTANTS.m0
M_E = CONSTANTS.m_e


class Model(str, enum.Enum):
    CSL = "csl"
    DCSL = "dcsl"
    CCSL = "ccsl"

    @classmethod
    def parse(cls, name: Union[str, "Model"]) -> "Model":
        if isinstance(name, Model):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise DomainError(f"unknown collapse model {name!r}; expected csl, dcsl or ccsl") from None


@dataclass(frozen=True)
class CollapseParams:
    """Collapse-model parameters.

    ``T`` and ``u`` are read only for dCSL, ``tau_C`` only for cCSL. They are
    never filled in implicitly; a dCSL record without ``T`` fails validation.
    """

    model: Model
    lam: float
    r_C: float
    T: Optional[float] = None
    u: Optional[tuple] = None
    tau_C: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "model", Model.parse(self.model))
        if self.u is not None:
            object.__setattr__(self, "u", tuple(self.u))

    @property
    def u_x(self) -> float:
        if self.u is None:
            raise DomainError("noise drift velocity u is not set")
        return float(self.u[0])

    def with_lambda(self, lam: float) -> "CollapseParams":
        return replace(self, lam=lam)

    def with_r_C(self, r_C: float) -> "CollapseParams":
        return replace(self, r_C=r_C)

    def for_model(self, model) -> "CollapseParams":
        """Copy restricted to the fields ``model`` actually reads."""
        model = Model.parse(model)
        return CollapseParams(
            model=model,
            lam=self.lam,
            r_C=self.r_C,
            T=self.T if model is Model.DCSL else None,
            u=self.u if model is Model.DCSL else None,
            tau_C=self.tau_C if model is Model.CCSL else None,
        )


@dataclass(frozen=True)
class Sphere:
    radius: float


@dataclass(frozen=True)
class Disk:
    radius: float


@dataclass(frozen=True)
class PointCluster:
    pass


Geometry = Union[Sphere, Disk, PointCluster]


@dataclass(frozen=True)
class MoleculeSpec:
    n_A: float
    m_A: float
    geometry: Geometry = field(default_factory=PointCluster)

    @property
    def mass(self) -> float:
        return self.n_A * self.m_A

    @property
    def radius(self) -> Optional[float]:
        return getattr(self.geometry, "radius", None)


@dataclass(frozen=True)
class BinaryAmplitude:
    open_fraction: float


@dataclass(frozen=True)
class SinusoidalPhase:
    """Phase grating with transmission ``exp(i (phase_amplitude/2) cos(2 pi x / d))``."""

    phase_amplitude: float


@dataclass(frozen=True)
class CustomGrating:
    """Explicit Fourier coefficients ordered from index -N to +N."""

    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(complex(c) for c in self.coefficients))

    @property
    def order(self) -> int:
        return (len(self.coefficients) - 1) // 2


GratingSpec = Union[BinaryAmplitude, SinusoidalPhase, CustomGrating]


@dataclass(frozen=True)
class InterferometerSpec:
    L1: float
    L2: float
    t1: float
    t2: float
    d: float
    k: float
    grating1: GratingSpec = BinaryAmplitude(0.42)
    grating2: GratingSpec = SinusoidalPhase(3.0)
    grating3: GratingSpec = BinaryAmplitude(0.42)
    allow_velocity_mismatch: bool = False

    @property
    def L(self) -> float:
        if self.L1 != self.L2:
            raise DomainError(f"pattern requires L1 == L2, got L1={self.L1!r}, L2={self.L2!r}")
        return self.L1

    @property
    def talbot_length(self) -> float:
        return self.d**2 * self.k / (2 * math.pi)


def de_broglie_wavenumber(mass: float, velocity: float) -> float:
    """Matter-wave wavenumber ``m v / hbar`` in rad/m."""
    if not (_is_real(mass) and mass > 0):
        raise DomainError(f"mass must be positive, got {mass!r}")
    if not (_is_real(velocity) and velocity > 0):
        raise DomainError(f"velocity must be positive, got {velocity!r}")
    return mass * velocity / HBAR


@dataclass(frozen=True)
class Violation:
    field: str
    rule: str

    def __str__(self):
        return f"{self.field}: {self.rule}"


def _is_real(x) -> bool:
    return isinstance(x, numbers.Real) and not isinstance(x, bool) and math.isfinite(x)


def _require(out, name, value, rule, test):
    try:
        ok = _is_real(value) and bool(test(value))
    except Exception:
        ok = False
    if not ok:
        out.append(Violation(name, rule))


def _validate_params(p: CollapseParams):
    out = []
    _require(out, "lam", p.lam, "must be >= 0", lambda v: v >= 0)
    _require(out, "r_C", p.r_C, "must be > 0", lambda v: v > 0)
    if p.model is Model.DCSL:
        if p.T is None:
            out.append(Violation("T", "required for dCSL"))
        else:
            _require(out, "T", p.T, "must be > 0 for dCSL", lambda v: v > 0)
        if p.u is None:
            out.append(Violation("u", "required for dCSL"))
        else:
            try:
                ok = len(p.u) == 3 and all(_is_real(c) for c in p.u)
            except TypeError:
                ok = False
            if not ok:
                out.append(Violation("u", "must be a finite 3-vector"))
    elif p.model is Model.CCSL:
        if p.tau_C is None:
            out.append(Violation("tau_C", "required for cCSL"))
        else:
            _require(out, "tau_C", p.tau_C, "must be >= 0 for cCSL", lambda v: v >= 0)
    return out


def _validate_geometry(g, out):
    if isinstance(g, (Sphere, Disk)):
        _require(out, "geometry.radius", g.radius, "must be > 0", lambda v: v > 0)
    elif not isinstance(g, PointCluster):
        out.append(Violation("geometry", "must be Sphere, Disk or PointCluster"))


def _validate_molecule(mol: MoleculeSpec):
    out = []
    _require(out, "n_A", mol.n_A, "must be >= 1", lambda v: v >= 1)
    _require(out, "m_A", mol.m_A, "must be > 0", lambda v: v > 0)
    _validate_geometry(mol.geometry, out)
    return out


def _validate_grating(name, g, out):
    if isinstance(g, BinaryAmplitude):
        _require(out, f"{name}.open_fraction", g.open_fraction, "must lie in (0, 1)", lambda v: 0 < v < 1)
    elif isinstance(g, SinusoidalPhase):
        _require(out, f"{name}.phase_amplitude", g.phase_amplitude, "must be finite", lambda v: True)
    elif isinstance(g, CustomGrating):
        n = len(g.coefficients)
        if n == 0 or n % 2 == 0:
            out.append(Violation(f"{name}.coefficients", "need an odd count indexed -N..N"))
        elif not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in g.coefficients):
            out.append(Violation(f"{name}.coefficients", "must be finite"))
    else:
        out.append(Violation(name, "unknown grating kind"))


def _validate_interferometer(spec: InterferometerSpec):
    out = []
    for name in ("L1", "L2", "t1", "t2", "d", "k"):
        _require(out, name, getattr(spec, name), "must be > 0", lambda v: v > 0)
    if not out and not spec.allow_velocity_mismatch:
        v1, v2 = spec.L1 / spec.t1, spec.L2 / spec.t2
        if abs(v1 - v2) > 0.01 * max(v1, v2):
            out.append(Violation("t2", f"L1/t1={v1:.6g} m/s and L2/t2={v2:.6g} m/s differ by more than 1%"))
    for name in ("grating1", "grating2", "grating3"):
        _validate_grating(name, getattr(spec, name), out)
    return out


def validate(spec) -> list:
    """Return the invariant violations of a domain record; empty means valid."""
    if isinstance(spec, CollapseParams):
        return _validate_params(spec)
    if isinstance(spec, MoleculeSpec):
        return _validate_molecule(spec)
    if isinstance(spec, InterferometerSpec):
        return _validate_interferometer(spec)
    return [Violation(type(spec).__name__, "not a validatable record")]


def require_valid(*records) -> None:
    for r in records:
        problems = validate(r)
        if problems:
            raise DomainError("; ".join(str(p) for p in problems))
