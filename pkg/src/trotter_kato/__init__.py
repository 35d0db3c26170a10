"""Trotter and Trotter-Kato product formulas for finite-dimensional unitary groups."""
from .errors import *  # noqa: F401,F403
from .kato import (
    AtomicExp,
    Canonical,
    CanonicalKato,
    Exp,
    KatoMeasure,
    ResolventPower,
    SinglePair,
    ZeroSet,
    boundary_regularity,
    build_canonical,
    check_kato_axioms,
    evaluate,
    kato_from_json,
    log_resolvent_weight,
)
from .products import (
    ConvergenceReport,
    Metric,
    OperatorPair,
    ProductScheme,
    boundary_resolvent_l2_error,
    chernoff_resolvent_error,
    convergence_sweep,
    l2_time_error,
    make_pair,
    measure_error,
    product_operator,
    sup_time_error,
    symmetrization_identity_residual,
)
from .quadrature import QuadratureGrid, midpoint_grid, time_grid
from .spectral import HermitianOperator, apply_scalar_function, hermitian_eigendecompose

__version__ = "0.1.0"
