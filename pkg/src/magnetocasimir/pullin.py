"""Pull-in analysis of a spring-suspended plate attracted by the Casimir force.

Force balance kappa (L0 - z) = F0(z) eta(z) with F0(z) = pi**2 hbar c A / (240 z**4)
becomes, with zb = z / L0,

    lambda(zb) = (1 - zb) zb**4 / eta(zb L0),    lambda = F0(L0) / (kappa L0).

Equilibria exist only for lambda below the fold value lambda_in, reached at
the pull-in gap zb_in where dU/dz = d2U/dz2 = 0.  For a cantilever,
kappa = E w t**3 / (4 l**3), so lambda scales like l**3 and the longest
cantilever that does not snap down scales like lambda_in**(1/3).

Anything accepting a ``material`` takes either a :class:`MaterialSpec`
(eta from the Lifshitz integral) or a plain callable ``L_hat -> eta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Union

import numpy as np
from scipy import constants, optimize

from magnetocasimir.lifshitz import QuadratureConfig, eta_cached
from magnetocasimir.material import MaterialSpec

EtaModel = Union[MaterialSpec, Callable[[float], float]]

DEFAULT_Z_RANGE = (0.05, 0.999)
SCAN_POINTS = 64
Z_TOL = 1e-4
ROOT_XTOL = 1e-7
# relative slack when checking the scanned curve for a single hump
_UNIMODAL_SLACK = 1e-6

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class NonUnimodalError(ValueError):
    """The sampled bifurcation curve has more than one interior maximum."""

    def __init__(self, message, z_grid, lam_grid):
        super().__init__(message)
        self.z_grid = z_grid
        self.lam_grid = lam_grid


class NoEquilibriumError(ValueError):
    """Requested load is at or beyond the fold: the plate pulls in."""


@dataclass(frozen=True)
class BifurcationPoint:
    z_bar: float
    lam: float
    eta_at: float
    converged: bool = True


@dataclass(frozen=True)
class PullInResult:
    z_bar_in: float
    lambda_in: float
    omega_c_hat: float
    L0_hat: float
    eta_in: float
    kappa_min_ratio: float | None = None
    detach_ratio: float | None = None
    converged: bool = True


class Equilibrium(NamedTuple):
    z_bar: float
    stable: bool


@dataclass(frozen=True)
class CantileverGeometry:
    """Rectangular cantilever and plate, SI units (Pa, m, m**2).

    ``area`` defaults to ``length * width``.
    """

    youngs_modulus: float
    width: float
    thickness: float
    length: float
    gap: float
    area: float | None = None

    def __post_init__(self):
        if self.area is None:
            object.__setattr__(self, "area", self.length * self.width)
        for name in ("youngs_modulus", "width", "thickness", "length", "gap", "area"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if self.thickness > self.width:
            raise ValueError("thickness must not exceed width")

    @property
    def stiffness(self) -> float:
        return cantilever_stiffness(self.youngs_modulus, self.width, self.thickness, self.length)


@dataclass(frozen=True)
class DeviceReport:
    kappa: float  # N/m
    F0: float  # N, perfect-conductor force at the rest gap
    lam: float
    lambda_in: float
    detach_length_max: float  # m
    pulled_in: bool
    L0_hat: float


def cantilever_stiffness(E, w, t, l):
    return E * w * t**3 / (4.0 * l**3)


def casimir_force_perfect(area, gap):
    """pi**2 hbar c A / (240 gap**4), magnitude in newtons."""
    return math.pi**2 * constants.hbar * constants.c * area / (240.0 * gap**4)


def _eta_function(material: EtaModel, config: QuadratureConfig | None):
    """Return ``L_hat -> (eta, converged)`` for a spec or a stub callable."""
    if isinstance(material, MaterialSpec):
        config = config or QuadratureConfig()

        def f(L_hat):
            p = eta_cached(material, float(L_hat), config)
            return p.eta, p.converged

        return f

    def stub(L_hat):
        return float(material(L_hat)), True

    return stub


def _omega_c(material: EtaModel) -> float:
    if isinstance(material, MaterialSpec):
        return material.effective_omega_c
    return float("nan")


def _lambda_function(material, L0_hat, config, eta_mode="pointwise", fixed_z=0.8):
    if not L0_hat > 0.0:
        raise ValueError(f"L0_hat must be > 0, got {L0_hat}")
    eta_of = _eta_function(material, config)
    if eta_mode == "pointwise":
        def point(z):
            e, ok = eta_of(z * L0_hat)
            return (1.0 - z) * z**4 / e, e, ok
    elif eta_mode == "fixed":
        e_fixed, ok_fixed = eta_of(fixed_z * L0_hat)

        def point(z):
            return (1.0 - z) * z**4 / e_fixed, e_fixed, ok_fixed
    else:
        raise ValueError(f"eta_mode must be 'pointwise' or 'fixed', got {eta_mode!r}")
    return point


def bifurcation_curve(material: EtaModel, L0_hat: float, n_points: int,
                      config: QuadratureConfig | None = None, z_range=DEFAULT_Z_RANGE,
                      eta_mode: str = "pointwise", fixed_z: float = 0.8) -> list[BifurcationPoint]:
    """lambda(zb) on a uniform grid of ``n_points`` gaps.

    ``eta_mode="pointwise"`` evaluates eta at every separation zb * L0;
    ``"fixed"`` uses the single value eta(fixed_z * L0) for the whole curve.
    """
    if n_points < 3:
        raise ValueError(f"n_points must be >= 3, got {n_points}")
    z_lo, z_hi = z_range
    if not 0.0 < z_lo < z_hi < 1.0:
        raise ValueError(f"z_range must lie inside (0, 1), got {z_range}")
    point = _lambda_function(material, L0_hat, config, eta_mode, fixed_z)
    out = []
    for z in np.linspace(z_lo, z_hi, n_points):
        lam, e, ok = point(float(z))
        out.append(BifurcationPoint(float(z), lam, e, ok))
    return out


def _golden_maximize(f, a, b, tol):
    """Golden-section maximisation on [a, b] with a closing parabolic step.

    Returns (x, f(x)) for the best point evaluated.
    """
    seen = {}

    def g(x):
        if x not in seen:
            seen[x] = f(x)
        return seen[x]

    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = g(c), g(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = g(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = g(d)

    xs = sorted(seen)
    i = max(range(len(xs)), key=lambda k: seen[xs[k]])
    if 0 < i < len(xs) - 1:
        x1, x2, x3 = xs[i - 1], xs[i], xs[i + 1]
        f1, f2, f3 = seen[x1], seen[x2], seen[x3]
        den = (x2 - x1) * (f2 - f3) - (x2 - x3) * (f2 - f1)
        if den != 0.0:
            xv = x2 - 0.5 * ((x2 - x1) ** 2 * (f2 - f3) - (x2 - x3) ** 2 * (f2 - f1)) / den
            if x1 < xv < x3:
                g(xv)
    best = max(seen, key=seen.get)
    return best, seen[best]


def find_pullin(material: EtaModel, L0_hat: float, config: QuadratureConfig | None = None,
                z_range=DEFAULT_Z_RANGE, scan_points: int = SCAN_POINTS, z_tol: float = Z_TOL,
                eta_mode: str = "pointwise") -> PullInResult:
    """Fold of the bifurcation curve: the gap and load at pull-in.

    A coarse scan brackets the maximum, golden-section search refines it.

    Raises:
        NonUnimodalError: if the scanned curve has more than one hump.
    """
    point = _lambda_function(material, L0_hat, config, eta_mode)
    z_grid = np.linspace(*z_range, scan_points)
    scan = [point(float(z)) for z in z_grid]
    lam = np.array([s[0] for s in scan])
    ok = all(s[2] for s in scan)

    i = int(np.argmax(lam))
    slack = _UNIMODAL_SLACK * lam[i]
    rising = np.diff(lam[: i + 1])
    falling = np.diff(lam[i:])
    if np.any(rising < -slack) or np.any(falling > slack):
        raise NonUnimodalError("bifurcation curve is not unimodal on the scan grid", z_grid, lam)
    if i == 0 or i == len(z_grid) - 1:
        raise NonUnimodalError("maximum lies on the edge of the scan range", z_grid, lam)

    flags = []

    def objective(z):
        value, _, good = point(z)
        flags.append(good)
        return value

    z_in, lam_in = _golden_maximize(objective, z_grid[i - 1], z_grid[i + 1], z_tol)
    eta_in = point(z_in)[1]
    return PullInResult(
        z_bar_in=float(z_in),
        lambda_in=float(lam_in),
        omega_c_hat=_omega_c(material),
        L0_hat=float(L0_hat),
        eta_in=float(eta_in),
        converged=bool(ok and all(flags)),
    )


def solve_equilibria(material: EtaModel, L0_hat: float, lam: float,
                     config: QuadratureConfig | None = None,
                     pullin: PullInResult | None = None, z_min: float = 1e-3):
    """Both equilibrium gaps for load ``lam`` below the fold.

    Returns ``(unstable, stable)`` :class:`Equilibrium` pairs; the stable root
    is the one on the far side of the pull-in gap.  ``pullin`` may be passed
    to skip recomputing the fold.

    Raises:
        NoEquilibriumError: if ``lam >= lambda_in``.
        ValueError: if ``lam <= 0`` or it is too small to bracket above ``z_min``.
    """
    if not lam > 0.0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    pullin = pullin or find_pullin(material, L0_hat, config)
    if lam >= pullin.lambda_in:
        raise NoEquilibriumError(
            f"lambda={lam:.9g} is at or beyond the fold lambda_in={pullin.lambda_in:.9g}"
        )
    point = _lambda_function(material, L0_hat, config)

    def residual(z):
        return point(z)[0] - lam

    if residual(z_min) >= 0.0:
        raise ValueError(f"lambda={lam:.3g} too small to bracket above z_bar={z_min}")
    z_in = pullin.z_bar_in
    low = optimize.brentq(residual, z_min, z_in, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    # lambda(1) = 0 exactly
    high = optimize.brentq(residual, z_in, 1.0, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    return Equilibrium(float(low), False), Equilibrium(float(high), True)


def pullin_ratios(lambda_in: float, lambda_in_baseline: float):
    """(kappa_min_ratio, detach_ratio) relative to the baseline field."""
    kappa_ratio = lambda_in_baseline / lambda_in
    detach_ratio = (lambda_in / lambda_in_baseline) ** (1.0 / 3.0)
    return kappa_ratio, detach_ratio


def field_sweep(template: MaterialSpec, L0_hat: float, omega_c_list,
                config: QuadratureConfig | None = None, baseline: float = 0.0,
                executor=None) -> list[PullInResult]:
    """Pull-in point for each cyclotron ratio, with ratios to the baseline field.

    The baseline is computed even if it is not in ``omega_c_list``.  With an
    ``executor`` the fields are evaluated concurrently; output order and
    values match the serial run.
    """
    fields = [float(w) for w in omega_c_list]
    if not fields:
        raise ValueError("omega_c_list must not be empty")
    specs = [template.with_field(w) for w in fields]
    todo = list(specs)
    base_spec = template.with_field(baseline)
    if base_spec not in todo:
        todo.append(base_spec)
    n = len(todo)
    if executor is None:
        results = [find_pullin(s, L0_hat, config) for s in todo]
    else:
        results = list(executor.map(find_pullin, todo, [L0_hat] * n, [config] * n))
    by_spec = dict(zip(todo, results))
    base = by_spec[base_spec]
    out = []
    for s in specs:
        r = by_spec[s]
        kappa_ratio, detach = pullin_ratios(r.lambda_in, base.lambda_in)
        out.append(replace(r, kappa_min_ratio=kappa_ratio, detach_ratio=detach))
    return out


def device_translate(geom: CantileverGeometry, result: PullInResult, omega_p: float,
                     rel_scale_tol: float = 1e-6) -> DeviceReport:
    """Put a dimensionless pull-in result on a concrete cantilever.

    ``omega_p`` (rad/s) sets the plasma length c/omega_p; the device gap must
    correspond to ``result.L0_hat`` in that unit.

    Raises:
        ValueError: for a non-positive plasma frequency or a gap that does not
            match the result's dimensionless separation.
    """
    if not (omega_p > 0.0 and math.isfinite(omega_p)):
        raise ValueError(f"omega_p must be positive, got {omega_p}")
    L0_hat = geom.gap * omega_p / constants.c
    if abs(L0_hat - result.L0_hat) > rel_scale_tol * result.L0_hat:
        raise ValueError(
            f"gap {geom.gap:.6g} m is L0_hat={L0_hat:.9g} in plasma units, "
            f"but the pull-in result was computed for L0_hat={result.L0_hat:.9g}"
        )
    kappa = geom.stiffness
    F0 = casimir_force_perfect(geom.area, geom.gap)
    lam = F0 / (kappa * geom.gap)
    return DeviceReport(
        kappa=kappa,
        F0=F0,
        lam=lam,
        lambda_in=result.lambda_in,
        detach_length_max=geom.length * (result.lambda_in / lam) ** (1.0 / 3.0),
        pulled_in=lam > result.lambda_in,
        L0_hat=L0_hat,
    )
