import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collapse_scope.core import (AMU, HBAR, BinaryAmplitude, CollapseParams, CustomGrating, Disk, DomainError,
                                 InterferometerSpec, Model, MoleculeSpec, PointCluster, SinusoidalPhase, Sphere,
                                 de_broglie_wavenumber, require_valid, validate)
from collapse_scope.units import format_quantity, parse_quantity


def test_wavenumber_unit_identity():
    assert de_broglie_wavenumber(AMU, HBAR / AMU) == pytest.approx(1.0, rel=1e-15)


def test_wavenumber_kdtl():
    # m v / hbar with CODATA 2018 constants
    assert de_broglie_wavenumber(10123 * AMU, 100.0) == pytest.approx(1.5939774513423963e13, rel=1e-12)


@pytest.mark.parametrize("mass,v", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (float("nan"), 1.0)])
def test_wavenumber_domain(mass, v):
    with pytest.raises(DomainError):
        de_broglie_wavenumber(mass, v)


def test_grw_params_valid():
    assert validate(CollapseParams(Model.CSL, 1e-16, 1e-7)) == []


def test_zero_r_C_names_field():
    problems = validate(CollapseParams(Model.CSL, 1e-16, 0.0))
    assert len(problems) == 1 and problems[0].field == "r_C"


def test_dcsl_missing_T():
    problems = validate(CollapseParams(Model.DCSL, 1e-16, 1e-7, u=(0.0, 0.0, 0.0)))
    assert [p.field for p in problems] == ["T"]


def test_ccsl_requires_tau():
    assert [p.field for p in validate(CollapseParams(Model.CCSL, 1e-8, 1e-7))] == ["tau_C"]


def test_model_parse():
    assert Model.parse("DCSL") is Model.DCSL
    with pytest.raises(DomainError):
        Model.parse("grw")


def test_for_model_drops_unused_fields():
    p = CollapseParams(Model.DCSL, 1.0, 1e-7, T=1.0, u=(1, 2, 3), tau_C=1e-14)
    assert p.for_model("csl") == CollapseParams(Model.CSL, 1.0, 1e-7)
    assert p.for_model("ccsl").tau_C == 1e-14 and p.for_model("ccsl").T is None


def test_velocity_mismatch_rule():
    spec = InterferometerSpec(0.1, 0.1, 1e-3, 1.1e-3, 266e-9, 1e13)
    assert [v.field for v in validate(spec)] == ["t2"]
    ok = InterferometerSpec(0.1, 0.1, 1e-3, 1.1e-3, 266e-9, 1e13, allow_velocity_mismatch=True)
    assert validate(ok) == []


def test_grating_and_molecule_rules():
    spec = InterferometerSpec(0.1, 0.1, 1e-3, 1e-3, 266e-9, 1e13, grating1=BinaryAmplitude(1.5),
                              grating2=CustomGrating((1, 0)))
    fields = {v.field for v in validate(spec)}
    assert fields == {"grating1.open_fraction", "grating2.coefficients"}
    bad = MoleculeSpec(0.5, -1.0, Sphere(-1.0))
    assert {v.field for v in validate(bad)} == {"n_A", "m_A", "geometry.radius"}
    with pytest.raises(DomainError, match="n_A"):
        require_valid(bad)


def test_L_requires_symmetric_arms():
    spec = InterferometerSpec(0.1, 0.2, 1e-3, 2e-3, 266e-9, 1e13)
    with pytest.raises(DomainError):
        spec.L


_anything = st.one_of(st.none(), st.floats(allow_nan=True, allow_infinity=True), st.integers(), st.text(max_size=3),
                      st.booleans(), st.tuples(st.floats(), st.floats()))


@settings(max_examples=300, deadline=None)
@given(lam=_anything, r=_anything, T=_anything, u=_anything, tau=_anything,
       model=st.sampled_from(list(Model)))
def test_validate_params_total(lam, r, T, u, tau, model):
    try:
        p = CollapseParams(model, lam, r, T=T, u=u if isinstance(u, tuple) or u is None else None, tau_C=tau)
    except TypeError:
        return
    assert isinstance(validate(p), list)


@settings(max_examples=200, deadline=None)
@given(st.one_of(_anything, st.builds(InterferometerSpec, _anything, _anything, _anything, _anything, _anything,
                                      _anything),
                 st.builds(MoleculeSpec, _anything, _anything, st.sampled_from([PointCluster(), Disk(-1), Sphere(1)]))))
def test_validate_total_on_any_record(record):
    out = validate(record)
    assert isinstance(out, list)


@settings(max_examples=300, deadline=None)
@given(value=st.floats(min_value=1e-30, max_value=1e30),
       kind=st.sampled_from(["length", "time", "mass", "temperature", "rate", "velocity", "wavenumber"]))
def test_unit_round_trip_lossless(value, kind):
    assert parse_quantity(format_quantity(value, kind), kind) == value


@pytest.mark.parametrize("text,kind,expected", [
    ("266 nm", "length", 2.66e-7), ("1 ms", "time", 1e-3), ("10 nm", "length", 1e-8),
    ("1e-8 K", "temperature", 1e-8), ("2e4 m/s", "velocity", 2e4), ("0.1", "length", 0.1),
    ("10123 amu", "mass", 10123 * AMU), ("3 mrad", "angle", 3e-3),
])
def test_parse_quantity(text, kind, expected):
    assert parse_quantity(text, kind) == expected


@pytest.mark.parametrize("text,kind", [("1 ms", "length"), ("abc", "time"), ("1 parsec", "length")])
def test_parse_quantity_errors(text, kind):
    with pytest.raises(DomainError):
        parse_quantity(text, kind)
