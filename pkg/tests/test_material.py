import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from magnetocasimir.material import (
    MaterialSpec,
    PlateModel,
    isotropic_permittivity_at,
    permittivity_at,
)


def test_zero_field_unit_background():
    p = permittivity_at(MaterialSpec(1.0, 0.0, 0.0), 1.0)
    assert p.eps_xx == p.eps_yy == p.eps_V == 2.0
    assert p.eps_yz == 0.0


def test_unit_field_components():
    p = permittivity_at(MaterialSpec(1.0, 0.0, 1.0), 1.0)
    assert p.eps_xx == pytest.approx(2.0, abs=1e-15)
    assert p.eps_yy == pytest.approx(1.5, abs=1e-15)
    assert p.eps_yz == pytest.approx(-0.5, abs=1e-15)
    assert p.eps_V == pytest.approx(1.5 + 0.25 / 1.5, abs=1e-15)


def test_insb_like_hand_values():
    assert permittivity_at(MaterialSpec(15.7, 0.1, 0.0), 0.5).eps_xx == pytest.approx(
        15.7 * (1 + 1 / (0.5 * 0.6)), rel=1e-14
    )
    assert isotropic_permittivity_at(MaterialSpec(15.7, 0.01), 0.1) == pytest.approx(
        1442.9727272727, rel=1e-10
    )
    assert isotropic_permittivity_at(MaterialSpec(1.0, 0.0), 1.0) == 2.0
    assert isotropic_permittivity_at(MaterialSpec(1.0, 0.0), 1e8) == pytest.approx(1.0, abs=1e-15)


def _rotated_tensor():
    """Drude-magneto tensor written for real omega, then evaluated at omega = i*xi."""
    w, xi, g, wc, eL = sp.symbols("omega xi gamma omega_c epsilon_L", positive=True)
    wp = 1
    exx = eL * (1 - wp**2 / (w * (w + sp.I * g)))
    eyy = eL * (1 - (w + sp.I * g) * wp**2 / (w * ((w + sp.I * g) ** 2 - wc**2)))
    eyz = eL * (sp.I * wc * wp**2 / (w * ((w + sp.I * g) ** 2 - wc**2)))
    sub = {w: sp.I * xi}
    return (xi, g, wc, eL), [sp.lambdify((xi, g, wc, eL), e.subs(sub), "mpmath") for e in (exx, eyy, eyz)]


@pytest.mark.parametrize(
    "eL,g,wc,xi",
    [(15.7, 0.1, 0.0, 0.5), (15.7, 0.01, 2.0, 0.3), (1.0, 0.0, 1.0, 1.0), (3.3, 0.2, 6.0, 4.0)],
)
def test_matches_symbolic_wick_rotation(eL, g, wc, xi):
    _, funcs = _rotated_tensor()
    exx, eyy, eyz = (complex(f(xi, g, wc, eL)) for f in funcs)
    p = permittivity_at(MaterialSpec(eL, g, wc), xi)
    for ours, ref in ((p.eps_xx, exx), (p.eps_yy, eyy), (p.eps_yz, eyz)):
        assert abs(ref.imag) <= 1e-12 * abs(ref)
        assert ours == pytest.approx(ref.real, rel=1e-12, abs=1e-15)


def test_rejects_non_positive_frequency():
    with pytest.raises(ValueError):
        permittivity_at(MaterialSpec(), 0.0)
    with pytest.raises(ValueError):
        isotropic_permittivity_at(MaterialSpec(), -1.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        MaterialSpec(eps_L=0.5)
    with pytest.raises(ValueError):
        MaterialSpec(gamma_hat=-0.1)
    with pytest.raises(ValueError):
        MaterialSpec(omega_c_hat=-1)
    with pytest.raises(ValueError):
        MaterialSpec(model="metal")
    with pytest.raises(ValueError):
        permittivity_at(MaterialSpec(model="perfect-conductor"), 1.0)


def test_isotropic_model_ignores_field():
    iso = permittivity_at(MaterialSpec(15.7, 0.01, 4.0, PlateModel.ISOTROPIC), 0.7)
    assert iso.eps_yz == 0.0
    assert iso.eps_xx == iso.eps_yy == iso.eps_V


specs = st.builds(
    MaterialSpec,
    eps_L=st.floats(1.0, 30.0),
    gamma_hat=st.floats(0.0, 1.0),
    omega_c_hat=st.floats(0.0, 10.0),
)


@settings(max_examples=60, deadline=None)
@given(spec=specs, xi=st.floats(1e-4, 1e3))
def test_tensor_invariants(spec, xi):
    p = permittivity_at(spec, xi)
    for v in (p.eps_xx, p.eps_yy, p.eps_yz, p.eps_V):
        assert np.isfinite(v)
    assert p.eps_xx > spec.eps_L and p.eps_yy > spec.eps_L
    assert p.eps_yy <= p.eps_xx * (1 + 1e-15)
    assert p.eps_V >= p.eps_yy
    assert p.eps_V >= 1.0
    if spec.omega_c_hat > 0:
        assert p.eps_yz < 0
    assert p.eps_xx == isotropic_permittivity_at(spec, xi)


@settings(max_examples=40, deadline=None)
@given(eL=st.floats(1.0, 30.0), g=st.floats(0.0, 1.0), xi=st.floats(1e-4, 1e3))
def test_zero_field_collapse_is_exact(eL, g, xi):
    p = permittivity_at(MaterialSpec(eL, g, 0.0), xi)
    assert p.eps_yz == 0.0
    assert p.eps_V - p.eps_xx == 0.0


@settings(max_examples=40, deadline=None)
@given(spec=specs, xi=st.floats(1e-3, 1e2))
def test_field_ordering(spec, xi):
    a = permittivity_at(spec, xi)
    b = permittivity_at(spec.with_field(spec.omega_c_hat + 0.5), xi)
    assert b.eps_yy <= a.eps_yy
    assert b.eps_xx == a.eps_xx


@pytest.mark.parametrize("g,power", [(0.05, 1), (0.0, 2)])
def test_limits_on_log_grid(g, power):
    spec = MaterialSpec(2.0, g, 0.7)
    big = permittivity_at(spec, 1e6)
    for v in (big.eps_xx, big.eps_yy, big.eps_V):
        assert v == pytest.approx(2.0, rel=1e-6)
    xs = np.logspace(-7, -5, 5)
    vals = np.array([permittivity_at(spec, x).eps_xx for x in xs])
    slope = np.diff(np.log(vals)) / np.diff(np.log(xs))
    assert slope == pytest.approx(-power, abs=0.01)
    vvals = np.array([permittivity_at(spec, x).eps_V for x in xs])
    vslope = np.diff(np.log(vvals)) / np.diff(np.log(xs))
    assert vslope == pytest.approx(-power, abs=0.01)
