"""Workbench for theta quotients, spinor characters, and equivariant Dirac
indices of spin circle-manifolds with isolated fixed points.

Layering (each module only depends on the ones above it):

    ring        exact arithmetic: Q(i) and Q(i)(s)
    qseries     truncated series in p = q^{1/4} with lattice substitutions
    elliptic    the four theta quotients, exact and numeric, and their
                translation identities
    spinchar    rotation data, spinor (super)traces, chi, orientation signs
    witten      the four tensor-series characters
    zem         the invariant functions Z / EM and the identity suites
    fixedpoint  manifold data, equivariant indices, rigidity
    cli         command-line surface

All value types are immutable after construction and safe to share across
threads; the only caches are thread-safe memoizations of exact series.
"""

from .ring import (
    GaussianRational,
    PoleEvaluationError,
    RationalFunctionQi,
    rf_arith,
    rf_eval,
)
from .qseries import (
    PSeries,
    Substitution,
    SubstitutionError,
    ps_arith,
    ps_compose_power,
    ps_invert,
    ps_substitute_t,
)
from .elliptic import (
    EllipticParams,
    PoleError,
    phi,
    phi_exact,
    phi_numeric,
    phi_translate_check,
)
from .spinchar import (
    CyclicAction,
    RotationData,
    chi,
    epsilon_J,
    j_factor,
    os_sign,
    pfaffian,
    spinor_trace,
    v_sign,
)
from .witten import witten_char
from .zem import (
    IdentityReport,
    LatticeElement,
    adapted_k,
    degenerate_reduction_check,
    em_eps,
    em_fun,
    identity_check,
    z_fun,
)
from .fixedpoint import (
    FixedPointDatum,
    SpinCircleManifold,
    TwistSpec,
    consistency_check,
    equivariant_index,
    list_catalog,
    load_manifold,
    rigidity_check,
    simplify_character,
    special_orders,
)

__all__ = [
    "GaussianRational",
    "RationalFunctionQi",
    "PoleEvaluationError",
    "rf_arith",
    "rf_eval",
    "PSeries",
    "Substitution",
    "SubstitutionError",
    "ps_arith",
    "ps_compose_power",
    "ps_invert",
    "ps_substitute_t",
    "EllipticParams",
    "PoleError",
    "phi",
    "phi_exact",
    "phi_numeric",
    "phi_translate_check",
    "CyclicAction",
    "RotationData",
    "chi",
    "epsilon_J",
    "j_factor",
    "os_sign",
    "pfaffian",
    "spinor_trace",
    "v_sign",
    "witten_char",
    "IdentityReport",
    "LatticeElement",
    "adapted_k",
    "degenerate_reduction_check",
    "em_eps",
    "em_fun",
    "identity_check",
    "z_fun",
    "FixedPointDatum",
    "SpinCircleManifold",
    "TwistSpec",
    "consistency_check",
    "equivariant_index",
    "list_catalog",
    "load_manifold",
    "rigidity_check",
    "simplify_character",
    "special_orders",
]

__version__ = "0.1.0"
