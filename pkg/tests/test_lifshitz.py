from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import eta_trapezoid

from magnetocasimir.lifshitz import EtaPoint, QuadratureConfig, eta, eta_curve
from magnetocasimir.material import MaterialSpec

PC = MaterialSpec(model="perfect-conductor")
DEFAULT = MaterialSpec()


@pytest.mark.parametrize("L", [0.1, 0.5, 1.0, 2.0, 10.0])
def test_perfect_conductor_normalisation(L):
    p = eta(PC, L)
    assert p.converged
    assert p.eta == pytest.approx(1.0, abs=1e-6)
    assert abs(p.eta - 1.0) <= p.err_est
    assert p.evals > 0


def test_reference_trapezoid_default_material():
    adaptive = eta(DEFAULT, 1.0)
    reference = eta_trapezoid(DEFAULT, 1.0)
    assert adaptive.eta == pytest.approx(reference, rel=1e-4)
    # frozen from the 2-million-node trapezoid rule
    assert reference == pytest.approx(0.499938463, rel=1e-6)


def test_field_reduces_eta():
    e0, e2, e6 = (eta(DEFAULT.with_field(w), 1.0).eta for w in (0.0, 2.0, 6.0))
    assert e6 < e2 < e0


def test_field_monotone_on_standard_fields():
    for L in (0.5, 3.0):
        values = [eta(DEFAULT.with_field(w), L).eta for w in (0, 1, 2, 5, 6)]
        assert np.all(np.diff(values) <= 0)


def test_isotropic_path_matches_zero_field_voigt():
    for L in (0.2, 1.0, 5.0):
        a = eta(MaterialSpec(15.7, 0.01, 0.0), L).eta
        b = eta(MaterialSpec(15.7, 0.01, 3.0, "isotropic"), L).eta
        assert a == pytest.approx(b, rel=1e-6)


def test_domain_errors():
    with pytest.raises(ValueError):
        eta(DEFAULT, 0.0)
    with pytest.raises(ValueError):
        eta(DEFAULT, -1.0)
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureConfig(max_depth=0)


def test_non_convergence_is_flagged_not_hidden():
    p = eta(DEFAULT, 1.0, QuadratureConfig(rel_tol=1e-15, abs_tol=1e-30, max_depth=2))
    assert not p.converged
    ref = eta(DEFAULT, 1.0)
    assert abs(p.eta - ref.eta) <= p.err_est + ref.err_est


def test_curve_empty_and_perfect():
    assert eta_curve(DEFAULT, []) == []
    pts = eta_curve(PC, [0.5, 1.0, 2.0])
    assert [p.L_hat for p in pts] == [0.5, 1.0, 2.0]
    assert all(abs(p.eta - 1.0) < 1e-6 for p in pts)


def test_curve_validation():
    with pytest.raises(ValueError):
        eta_curve(DEFAULT, [1.0, 0.5])
    with pytest.raises(ValueError):
        eta_curve(DEFAULT, [0.0, 1.0])


def test_curve_monotone_in_separation_with_spot_checks():
    Ls = np.logspace(-1, 2, 10)
    pts = eta_curve(DEFAULT, Ls)
    values = np.array([p.eta for p in pts])
    assert np.all(np.diff(values) >= 0)
    for i in (0, 4, 9):
        assert values[i] == pytest.approx(eta_trapezoid(DEFAULT, Ls[i]), rel=1e-4)


def test_curve_concurrent_matches_serial():
    Ls = [0.3, 0.9, 2.7]
    spec = DEFAULT.with_field(2.0)
    with ThreadPoolExecutor(3) as pool:
        parallel = eta_curve(spec, Ls, executor=pool)
    assert parallel == eta_curve(spec, Ls)
    assert all(isinstance(p, EtaPoint) for p in parallel)


specs = st.builds(
    MaterialSpec,
    eps_L=st.floats(1.0, 20.0),
    gamma_hat=st.floats(0.0, 0.5),
    omega_c_hat=st.floats(0.0, 8.0),
    model=st.sampled_from(["drude-magneto", "isotropic"]),
)


@settings(max_examples=20, deadline=None)
@given(spec=specs, L=st.floats(0.1, 50.0))
def test_bounds_randomized(spec, L):
    p = eta(spec, L, QuadratureConfig(rel_tol=1e-5))
    assert p.converged
    assert 0.0 < p.eta <= 1.0 + p.err_est
    assert p.err_est >= 0.0


@settings(max_examples=20, deadline=None)
@given(spec=specs, L=st.floats(0.1, 20.0))
def test_tolerance_halving(spec, L):
    coarse = eta(spec, L, QuadratureConfig(rel_tol=1e-5))
    fine = eta(spec, L, QuadratureConfig(rel_tol=5e-6))
    assert abs(fine.eta - coarse.eta) < coarse.err_est
