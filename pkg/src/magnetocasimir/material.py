"""Magneto-optic Drude permittivity on the imaginary frequency axis.

Frequencies are in units of the plasma frequency and lengths in units of the
plasma length c/omega_p, so the plasma frequency never appears explicitly.
The magnetic field points along x (parallel to the plates); the y-z block of
the tensor carries the gyrotropic coupling with eps_zz = eps_yy and
eps_zy = -eps_yz.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class PlateModel(str, Enum):
    DRUDE_MAGNETO = "drude-magneto"
    ISOTROPIC = "isotropic"
    PERFECT_CONDUCTOR = "perfect-conductor"


# InSb-like anchors for sweeps; results are reported dimensionlessly.
DEFAULT_EPS_L = 15.7
DEFAULT_GAMMA_HAT = 0.01


@dataclass(frozen=True)
class MaterialSpec:
    """Dimensionless plate description.

    Attributes:
        eps_L: background (lattice) permittivity, >= 1.
        gamma_hat: carrier damping in units of the plasma frequency.
        omega_c_hat: cyclotron frequency in units of the plasma frequency.
        model: plate model; ``isotropic`` ignores the field and
            ``perfect-conductor`` ignores everything else.
    """

    eps_L: float = DEFAULT_EPS_L
    gamma_hat: float = DEFAULT_GAMMA_HAT
    omega_c_hat: float = 0.0
    model: PlateModel = PlateModel.DRUDE_MAGNETO

    def __post_init__(self):
        object.__setattr__(self, "model", PlateModel(self.model))
        for name in ("eps_L", "gamma_hat", "omega_c_hat"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.eps_L < 1.0:
            raise ValueError(f"eps_L must be >= 1, got {self.eps_L}")
        if self.gamma_hat < 0.0:
            raise ValueError(f"gamma_hat must be >= 0, got {self.gamma_hat}")
        if self.omega_c_hat < 0.0:
            raise ValueError(f"omega_c_hat must be >= 0, got {self.omega_c_hat}")

    @property
    def is_perfect(self) -> bool:
        return self.model is PlateModel.PERFECT_CONDUCTOR

    @property
    def effective_omega_c(self) -> float:
        """Cyclotron ratio actually seen by the optics (0 for isotropic plates)."""
        if self.model is PlateModel.DRUDE_MAGNETO:
            return self.omega_c_hat
        return 0.0

    def with_field(self, omega_c_hat: float) -> MaterialSpec:
        return MaterialSpec(self.eps_L, self.gamma_hat, omega_c_hat, self.model)

    def as_dict(self) -> dict:
        return {
            "model": self.model.value,
            "eps_L": self.eps_L,
            "gamma_hat": self.gamma_hat,
            "omega_c_hat": self.omega_c_hat,
        }


@dataclass(frozen=True)
class PermittivitySample:
    xi_hat: float
    eps_xx: float
    eps_yy: float
    eps_yz: float
    eps_V: float


@dataclass(frozen=True)
class VoigtResponse:
    """Cancellation-free form of the tensor used by the reflection formulas.

    ``chi_xx`` and ``chi_V`` are eps_xx - 1 and eps_V - 1 computed without
    subtracting large numbers; ``gyration`` is eps_yz / eps_yy.
    """

    chi_xx: np.ndarray
    chi_V: np.ndarray
    gyration: np.ndarray


def _check_frequency(xi_hat):
    xi = np.asarray(xi_hat, dtype=float)
    if np.any(~(xi > 0.0)):
        raise ValueError("xi_hat must be > 0 (the static limit is handled by callers)")
    return xi


def _drude_terms(spec: MaterialSpec, xi):
    """Drude parts (without eps_L) of eps_xx, eps_yy and eps_yz at omega = i*xi."""
    g = spec.gamma_hat
    wc = spec.effective_omega_c
    xg = xi + g
    d_xx = 1.0 / (xi * xg)
    if wc == 0.0:
        return d_xx, d_xx, np.zeros_like(d_xx)
    denom = xi * (xg * xg + wc * wc)
    d_yy = xg / denom
    d_yz = -wc / denom
    return d_xx, d_yy, d_yz


def _require_finite_model(spec: MaterialSpec):
    if spec.is_perfect:
        raise ValueError("a perfect conductor has no finite permittivity")


def permittivity_at(spec: MaterialSpec, xi_hat: float) -> PermittivitySample:
    """Dielectric tensor components at imaginary frequency ``xi_hat``.

    Raises:
        ValueError: if ``xi_hat <= 0`` or the plate is a perfect conductor.
    """
    _require_finite_model(spec)
    xi = _check_frequency(xi_hat)
    d_xx, d_yy, d_yz = _drude_terms(spec, xi)
    eps_xx = spec.eps_L * (1.0 + d_xx)
    eps_yy = spec.eps_L * (1.0 + d_yy)
    eps_yz = spec.eps_L * d_yz
    eps_V = eps_yy + eps_yz * eps_yz / eps_yy
    if xi.ndim == 0:
        return PermittivitySample(float(xi), float(eps_xx), float(eps_yy), float(eps_yz), float(eps_V))
    return PermittivitySample(xi, eps_xx, eps_yy, eps_yz, eps_V)


def isotropic_permittivity_at(spec: MaterialSpec, xi_hat: float) -> float:
    """Zero-field Drude permittivity eps(i*xi); equal to eps_xx for any field."""
    _require_finite_model(spec)
    xi = _check_frequency(xi_hat)
    eps = spec.eps_L * (1.0 + 1.0 / (xi * (xi + spec.gamma_hat)))
    return float(eps) if xi.ndim == 0 else eps


def isotropic_susceptibility(spec: MaterialSpec, xi_hat):
    """eps(i*xi) - 1 for the zero-field plate, without cancellation."""
    _require_finite_model(spec)
    xi = _check_frequency(xi_hat)
    return (spec.eps_L - 1.0) + spec.eps_L / (xi * (xi + spec.gamma_hat))


def voigt_response(spec: MaterialSpec, xi_hat) -> VoigtResponse:
    """Vectorised susceptibilities for the reflection formulas."""
    _require_finite_model(spec)
    xi = _check_frequency(xi_hat)
    eL = spec.eps_L
    d_xx, d_yy, d_yz = _drude_terms(spec, xi)
    eps_yy = eL * (1.0 + d_yy)
    eps_yz = eL * d_yz
    chi_xx = (eL - 1.0) + eL * d_xx
    chi_V = (eL - 1.0) + eL * d_yy + eps_yz * eps_yz / eps_yy
    return VoigtResponse(chi_xx, chi_V, eps_yz / eps_yy)
