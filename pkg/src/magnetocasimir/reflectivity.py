"""Two-plate reflection products at imaginary frequency, Voigt geometry.

The field B is along x and the in-plane wavevector Q along y, so s waves
(E along x) see eps_xx only and p waves (H along x) see the Voigt
permittivity eps_V = eps_yy + eps_yz**2/eps_yy plus a nonreciprocal term
proportional to (eps_yz/eps_yy) * Q.  That term changes sign between the two
facing plates, so the round-trip product r1p * r2p is real:

    rp_prod = [(eps_V k0 - k_m)**2 + g**2 Q**2] / [(eps_V k0 + k_m)**2 + g**2 Q**2]

with k0 = sqrt(Q**2 + xi**2), k_m = sqrt(Q**2 + eps_V xi**2), g = eps_yz/eps_yy.
All azimuths are treated in this pure Voigt orientation (Q perpendicular
to B).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from magnetocasimir.material import (
    MaterialSpec,
    PlateModel,
    isotropic_susceptibility,
    permittivity_at,
    voigt_response,
)

# Largest condition number accepted from the slab matching system.
MAX_CONDITION = 1e12


class PrecisionLossError(ArithmeticError):
    """The slab field-matching system is too ill-conditioned to trust."""


@dataclass(frozen=True)
class WavevectorNode:
    xi_hat: float
    q_hat: float

    def __post_init__(self):
        if not self.xi_hat >= 0.0:
            raise ValueError(f"xi_hat must be >= 0, got {self.xi_hat}")
        if not self.q_hat >= 0.0:
            raise ValueError(f"q_hat must be >= 0, got {self.q_hat}")

    @property
    def k_hat(self) -> float:
        return float(np.hypot(self.xi_hat, self.q_hat))


@dataclass(frozen=True)
class ReflectionProduct:
    rs_prod: float
    rp_prod: float


def voigt_products(xi, q, chi_xx, chi_V, gyration):
    """Reflection products from susceptibilities (eps - 1) and eps_yz/eps_yy.

    Differences like k0 - k_s are rewritten as ratios of squares so that
    weakly reflecting interfaces do not lose digits.
    """
    xi = np.asarray(xi, dtype=float)
    q = np.asarray(q, dtype=float)
    xi2 = xi * xi
    q2 = q * q
    k0 = np.sqrt(q2 + xi2)

    k_s = np.sqrt(q2 + (1.0 + chi_xx) * xi2)
    r_s = chi_xx * xi2 / (k0 + k_s) ** 2
    rs_prod = r_s * r_s

    eps_V = 1.0 + chi_V
    k_m = np.sqrt(q2 + eps_V * xi2)
    plus = eps_V * k0 + k_m
    minus = chi_V * ((eps_V + 1.0) * q2 + eps_V * xi2) / plus
    gq2 = (gyration * q) ** 2
    rp_prod = (minus * minus + gq2) / (plus * plus + gq2)
    return rs_prod, rp_prod


def fresnel_products(xi, q, chi):
    """Isotropic Fresnel products for permittivity 1 + chi at imaginary frequency."""
    xi = np.asarray(xi, dtype=float)
    q = np.asarray(q, dtype=float)
    eps = 1.0 + chi
    k0 = np.hypot(q, xi)
    k = np.sqrt(q * q + eps * xi * xi)
    # eps k0 - k = chi ((eps + 1) Q^2 + eps xi^2) / (eps k0 + k)
    r_s = chi * xi * xi / (k0 + k) ** 2
    r_p = chi * ((eps + 1.0) * q * q + eps * xi * xi) / (eps * k0 + k) ** 2
    return r_s * r_s, r_p * r_p


def products_grid(spec: MaterialSpec, xi, q):
    """Vectorised (rs_prod, rp_prod) for xi > 0."""
    if spec.is_perfect:
        shape = np.broadcast(np.asarray(xi), np.asarray(q)).shape
        return np.ones(shape), np.ones(shape)
    if spec.model is PlateModel.ISOTROPIC:
        return fresnel_products(xi, q, isotropic_susceptibility(spec, xi))
    resp = voigt_response(spec, xi)
    return voigt_products(xi, q, resp.chi_xx, resp.chi_V, resp.gyration)


def static_limit(spec: MaterialSpec, q):
    """Products in the limit xi -> 0 at fixed Q.

    The Drude permittivity diverges, so p waves reflect perfectly.  For
    s waves eps*xi**2 tends to 0 when damping is present and to eps_L in the
    dissipationless (plasma) case.  On the axis Q = 0 both products tend to 1.
    """
    q = np.asarray(q, dtype=float)
    rp = np.ones_like(q)
    if spec.is_perfect:
        return np.ones_like(q), rp
    if spec.gamma_hat > 0.0:
        rs = np.zeros_like(q)
    else:
        eL = spec.eps_L
        rs = (eL / (q + np.sqrt(q * q + eL)) ** 2) ** 2
    rs = np.where(q == 0.0, 1.0, rs)
    return rs, rp


def reflection_products(spec: MaterialSpec, node: WavevectorNode) -> ReflectionProduct:
    """Two-plate products r1s*r2s and r1p*r2p at one (xi, Q) node.

    Raises:
        ValueError: if ``node.xi_hat <= 0``.
        FloatingPointError: if the permittivity is not finite.
    """
    if not node.xi_hat > 0.0:
        raise ValueError("reflection_products needs xi_hat > 0; use static_limit at xi = 0")
    rs, rp = products_grid(spec, node.xi_hat, node.q_hat)
    rs, rp = float(rs), float(rp)
    if not (np.isfinite(rs) and np.isfinite(rp)):
        raise FloatingPointError(f"non-finite reflection product at {node}")
    return ReflectionProduct(rs, rp)


def _tangential_ratio(pol, kz, omega, q, eps_V, gyration):
    # s: H_y / E_x ; p: E_y / H_x  for a plane wave exp(i kz z), c = 1
    if pol == "s":
        return kz / omega
    return -(kz + gyration * q) / (omega * eps_V)


def _slab_reflection(pol, xi, q, eps_xx, eps_V, gyration, d, side):
    """Amplitude reflection of a finite slab in vacuum at omega = i*xi.

    ``side = +1``: slab fills -d < z < 0, light arrives from z > 0.
    ``side = -1``: slab fills 0 < z < d, light arrives from z < 0.
    Slab waves are referenced to the interface where they are largest, which
    keeps every matrix entry bounded by one.
    """
    omega = 1j * xi
    k0 = np.sqrt(q * q + xi * xi)
    eps = eps_xx if pol == "s" else eps_V
    g = 0.0 if pol == "s" else gyration
    km = np.sqrt(q * q + eps * xi * xi)
    decay = np.exp(-km * d)

    def vac(kz):
        return _tangential_ratio(pol, kz, omega, q, 1.0, 0.0)

    def med(kz):
        return _tangential_ratio(pol, kz, omega, q, eps, g)

    # exp(i kz z) = exp(-kappa z) for kz = +i kappa
    up, down = 1j * km, -1j * km  # exp(-km z), exp(+km z)
    if side == 1:
        inc, ref, trn = -1j * k0, 1j * k0, -1j * k0
        # unknowns: r, b_down (exp(km z)), b_up (exp(-km (z + d))), t
        a = np.array(
            [
                [-1.0, 1.0, decay, 0.0],
                [-vac(ref), med(down), med(up) * decay, 0.0],
                [0.0, decay, 1.0, -1.0],
                [0.0, med(down) * decay, med(up), -vac(trn)],
            ],
            dtype=complex,
        )
    else:
        inc, ref, trn = 1j * k0, -1j * k0, 1j * k0
        # unknowns: r, b_up (exp(-km z)), b_down (exp(km (z - d))), t
        a = np.array(
            [
                [-1.0, 1.0, decay, 0.0],
                [-vac(ref), med(up), med(down) * decay, 0.0],
                [0.0, decay, 1.0, -1.0],
                [0.0, med(up) * decay, med(down), -vac(trn)],
            ],
            dtype=complex,
        )
    rhs = np.array([1.0, vac(inc), 0.0, 0.0], dtype=complex)
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise PrecisionLossError(f"slab matching system has condition number {cond:.3g}")
    return np.linalg.solve(a, rhs)[0]


def transfer_matrix_oracle(
    spec: MaterialSpec, node: WavevectorNode, thickness_hat: float
) -> ReflectionProduct:
    """Reflection products of two facing finite slabs by direct field matching.

    Each plate is a slab of ``thickness_hat`` backed by vacuum; plate 1 faces
    up and plate 2 faces down, and the boundary-value problem is solved
    independently for each.  Converges to :func:`reflection_products` as the
    thickness grows.

    Raises:
        PrecisionLossError: if the matching system is ill-conditioned.
    """
    if not thickness_hat > 0.0:
        raise ValueError(f"thickness_hat must be > 0, got {thickness_hat}")
    if not node.xi_hat > 0.0:
        raise ValueError("transfer_matrix_oracle needs xi_hat > 0")
    if spec.is_perfect:
        return ReflectionProduct(1.0, 1.0)
    p = permittivity_at(spec, node.xi_hat)
    gyration = p.eps_yz / p.eps_yy
    args = (node.xi_hat, node.q_hat, p.eps_xx, p.eps_V, gyration, thickness_hat)
    out = []
    for pol in ("s", "p"):
        prod = _slab_reflection(pol, *args, side=1) * _slab_reflection(pol, *args, side=-1)
        if abs(prod.imag) > 1e-9 * max(1.0, abs(prod.real)):
            raise PrecisionLossError(f"{pol} product has imaginary part {prod.imag:.3g}")
        out.append(float(prod.real))
    return ReflectionProduct(*out)
