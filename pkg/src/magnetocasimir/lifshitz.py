"""Casimir reduction factor eta = F / F_perfect between two identical plates.

With u = 2 xi L and x = 2 k L (k = sqrt(xi**2 + Q**2), all in plasma units)
and Q dQ = k dk, the zero-temperature Lifshitz integral normalised to the
perfect-conductor force becomes

    eta = 15 / (2 pi**4) * int_0^inf du int_u^inf dx  x**2 (G_s + G_p),
    G = r e**-x / (1 - r e**-x),

where r is the two-plate reflection product of each polarisation.  For
r = 1 the double integral is 2 pi**4 / 15 and eta = 1 exactly.  The outer
variable is mapped as u = s / (1 - s) and the inner one as x = u + t / (1 - t),
both onto [0, 1).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from magnetocasimir import quadrature
from magnetocasimir.material import MaterialSpec
from magnetocasimir.reflectivity import products_grid, static_limit

PREFACTOR = 15.0 / (2.0 * math.pi**4)

# Inner integrals are solved this much tighter than the outer tolerance.
_INNER_TIGHTEN = 0.1


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-6
    abs_tol: float = 1e-12
    max_depth: int = 40

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.abs_tol > 0.0:
            raise ValueError(f"abs_tol must be > 0, got {self.abs_tol}")
        if int(self.max_depth) != self.max_depth or self.max_depth < 1:
            raise ValueError(f"max_depth must be an integer >= 1, got {self.max_depth}")

    def as_dict(self) -> dict:
        return {"rel_tol": self.rel_tol, "abs_tol": self.abs_tol, "max_depth": self.max_depth}


@dataclass(frozen=True)
class EtaPoint:
    L_hat: float
    omega_c_hat: float
    eta: float
    err_est: float
    evals: int
    converged: bool = True


def _green(r, x):
    """x**2 * r e**-x / (1 - r e**-x), stable for r -> 1 and small x."""
    e = np.exp(-x)
    # 1 - r e^-x = (1 - r) - r expm1(-x), both terms >= 0
    with np.errstate(invalid="ignore", divide="ignore"):
        g = x * x * r * e / ((1.0 - r) - r * np.expm1(-x))
    return np.where(x == 0.0, 0.0, g)


def integrand(spec: MaterialSpec, L_hat: float, u, x):
    """x**2 (G_s + G_p) at dimensionless (u, x) with x >= u >= 0."""
    u = np.asarray(u, dtype=float)
    x = np.asarray(x, dtype=float)
    if spec.is_perfect:
        return 2.0 * _green(1.0, x)
    scale = 1.0 / (2.0 * L_hat)
    xi = u * scale
    q = np.sqrt(np.maximum((x - u) * (x + u), 0.0)) * scale
    xi, q = np.broadcast_arrays(xi, q)
    rs = np.empty(xi.shape)
    rp = np.empty(xi.shape)
    pos = xi > 0.0
    if pos.any():
        rs[pos], rp[pos] = products_grid(spec, xi[pos], q[pos])
    if (~pos).any():
        rs[~pos], rp[~pos] = static_limit(spec, q[~pos])
    return _green(rs, x) + _green(rp, x)


def _inner(spec, L_hat, u, config):
    """int_u^inf x**2 (G_s + G_p) dx for one outer abscissa u."""

    def f(t):
        y = t / (1.0 - t)
        return integrand(spec, L_hat, u, u + y) / (1.0 - t) ** 2

    return quadrature.integrate(
        f,
        0.0,
        1.0,
        rel_tol=config.rel_tol * _INNER_TIGHTEN,
        abs_tol=config.abs_tol * _INNER_TIGHTEN,
        max_depth=config.max_depth,
        initial_panels=4,
    )


def eta(spec: MaterialSpec, L_hat: float, config: QuadratureConfig | None = None) -> EtaPoint:
    """Reduction factor at plate separation ``L_hat`` (units of c/omega_p).

    Never clips the result.  If the tolerance is not reached within
    ``config.max_depth`` the best estimate is returned with
    ``converged=False`` and the error estimate that was actually achieved.
    """
    config = config or QuadratureConfig()
    L_hat = float(L_hat)
    if not (L_hat > 0.0 and math.isfinite(L_hat)):
        raise ValueError(f"L_hat must be a positive finite number, got {L_hat}")

    inner_evals = 0
    inner_ok = True

    def outer(s):
        nonlocal inner_evals, inner_ok
        out = np.empty((2, s.size))
        for i, si in enumerate(s):
            res = _inner(spec, L_hat, si / (1.0 - si), config)
            jac = 1.0 / (1.0 - si) ** 2
            out[0, i] = res.value[0] * jac
            out[1, i] = res.error * jac
            inner_evals += res.evals
            inner_ok &= res.converged
        return out

    res = quadrature.integrate(
        outer,
        0.0,
        1.0,
        rel_tol=config.rel_tol,
        abs_tol=config.abs_tol / PREFACTOR,
        max_depth=config.max_depth,
        initial_panels=4,
    )
    value = PREFACTOR * res.value[0]
    err = PREFACTOR * (res.error + abs(res.value[1]))
    return EtaPoint(
        L_hat=L_hat,
        omega_c_hat=spec.effective_omega_c,
        eta=float(value),
        err_est=float(err),
        evals=inner_evals,
        converged=bool(res.converged and inner_ok),
    )


@functools.lru_cache(maxsize=4096)
def eta_cached(spec: MaterialSpec, L_hat: float, config: QuadratureConfig) -> EtaPoint:
    """Memoised :func:`eta`; all arguments are hashable frozen values."""
    return eta(spec, L_hat, config)


def eta_curve(spec: MaterialSpec, L_hats, config: QuadratureConfig | None = None,
              executor=None) -> list[EtaPoint]:
    """:func:`eta` at each separation of a strictly increasing sequence.

    With an ``executor`` (``concurrent.futures``) points are evaluated
    concurrently; results are identical to serial evaluation.  Unconverged
    points are returned flagged, never dropped.
    """
    config = config or QuadratureConfig()
    L_hats = [float(v) for v in L_hats]
    if any(not v > 0.0 for v in L_hats):
        raise ValueError("all separations must be > 0")
    if any(b <= a for a, b in zip(L_hats, L_hats[1:])):
        raise ValueError("separations must be strictly increasing")
    if executor is None:
        return [eta_cached(spec, v, config) for v in L_hats]
    return list(executor.map(eta, [spec] * len(L_hats), L_hats, [config] * len(L_hats)))
