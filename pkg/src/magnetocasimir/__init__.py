"""Casimir-force reduction between magnetized semiconductor plates and the
pull-in stability of Casimir-actuated switches."""

from magnetocasimir.material import (
    MaterialSpec,
    PermittivitySample,
    isotropic_permittivity_at,
    permittivity_at,
)
from magnetocasimir.reflectivity import (
    ReflectionProduct,
    WavevectorNode,
    reflection_products,
    transfer_matrix_oracle,
)
from magnetocasimir.lifshitz import EtaPoint, QuadratureConfig, eta, eta_curve
from magnetocasimir.pullin import (
    BifurcationPoint,
    CantileverGeometry,
    PullInResult,
    bifurcation_curve,
    device_translate,
    field_sweep,
    find_pullin,
    solve_equilibria,
)

__version__ = "0.1.0"

__all__ = [
    "BifurcationPoint",
    "CantileverGeometry",
    "EtaPoint",
    "MaterialSpec",
    "PermittivitySample",
    "PullInResult",
    "QuadratureConfig",
    "ReflectionProduct",
    "WavevectorNode",
    "bifurcation_curve",
    "device_translate",
    "eta",
    "eta_curve",
    "field_sweep",
    "find_pullin",
    "isotropic_permittivity_at",
    "permittivity_at",
    "reflection_products",
    "solve_equilibria",
    "transfer_matrix_oracle",
]
