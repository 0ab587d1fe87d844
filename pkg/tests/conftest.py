import pytest

from collapse_scope.core import AMU, CollapseParams, InterferometerSpec, Model, MoleculeSpec, Sphere, de_broglie_wavenumber

KDTL_MASS_AMU = 10123.0
KDTL_N_ATOMS = 810


def kdtl_molecule():
    return MoleculeSpec(n_A=KDTL_N_ATOMS, m_A=KDTL_MASS_AMU * AMU / KDTL_N_ATOMS, geometry=Sphere(1e-8))


def kdtl_spec(velocity=100.0):
    mol = kdtl_molecule()
    L = 0.1
    return InterferometerSpec(L1=L, L2=L, t1=L / velocity, t2=L / velocity, d=266e-9,
                              k=de_broglie_wavenumber(mol.mass, velocity))


@pytest.fixture
def mol():
    return kdtl_molecule()


@pytest.fixture
def spec():
    return kdtl_spec()


@pytest.fixture
def csl():
    return CollapseParams(Model.CSL, 1e-6, 1e-7)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, in criterion order."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", None) != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append((props["criterion"], outcome.upper()[:4], props.get("title", ""), rep.duration))
    if lines:
        terminalreporter.section("acceptance criteria")
        for n, status, title, dur in sorted(lines):
            terminalreporter.write_line(f"criterion {n}: {status} {title} ({dur:.1f} s)")
