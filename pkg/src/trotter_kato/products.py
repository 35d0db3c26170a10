"""Product formulas for unitary groups and their convergence metrics.

Every scheme is a one-step factor ``F(z)`` of a complex step parameter ``z``
with ``Re z >= 0``; the ``n``-step product at time ``t`` is ``F(i t/n)^n``
for the unitary schemes and ``F(t/n)^n`` for the real-time (semigroup) ones.

===================== =====================================================
variant               one-step factor ``F(z)``
===================== =====================================================
trotter_plain         ``exp(-zA) exp(-zB)``
trotter_symmetrized   ``exp(-zA/2) exp(-zB) exp(-zA/2)``
kato_product          ``f(zA) g(zB)``
kato_symmetrized      ``f(zA/2) g(zB) f(zA/2)``
cachia_average        ``(f(2zA) + g(2zB)) / 2``
lapidus_resolvent     ``(I + zA/k)^-k (I + zB/k)^-k``
zeno                  ``P exp(-zB) P``
real_time_plain       as trotter_plain, evaluated at real ``z = t/n``
real_time_symmetrized as trotter_symmetrized, at real ``z = t/n``
===================== =====================================================
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kato
from .errors import (
    BadProjection,
    DimMismatch,
    FunctionUndefinedAtSpectrum,
    MissingProjection,
    NotHermitian,
    SchemeMismatch,
    SchemeRejected,
    SingularInverse,
    TrotterKatoError,
    ValidationError,
)
from .quadrature import QuadratureGrid
from .spectral import (
    HermitianOperator,
    apply_scalar_function,
    hermitian_eigendecompose,
    matrix_power,
    operator_norm,
    resolvent,
)

log = logging.getLogger(__name__)

PROJECTION_TOL = 1e-12
RECONSTRUCTION_RTOL = 1e-10


# --- operator pairs ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OperatorPair:
    """``(A, B)`` with spectral data for ``C = A + B`` and optional Zeno data.

    ``zeno_basis`` holds an orthonormal basis ``Q`` of ``ran P`` and
    ``zeno_generator`` the eigendecomposition of ``Q^H B Q``.
    """

    a: HermitianOperator
    b: HermitianOperator
    c: HermitianOperator
    zeno_projection: np.ndarray | None = None
    zeno_basis: np.ndarray | None = None
    zeno_generator: HermitianOperator | None = None

    @property
    def dim(self) -> int:
        return self.a.dim

    @property
    def commuting(self) -> bool:
        a, b = self.a.matrix, self.b.matrix
        return operator_norm(a @ b - b @ a) <= 1e-12 * max(1.0, operator_norm(a) * operator_norm(b))

    def zeno_matrix(self) -> np.ndarray:
        """``C_zeno`` embedded in the full space (zero on ``ker P``)."""
        self._require_zeno()
        q, g = self.zeno_basis, self.zeno_generator
        return q @ g.reconstruct() @ q.conj().T

    def _require_zeno(self):
        if self.zeno_projection is None:
            raise MissingProjection("the Zeno scheme needs an orthogonal projection P")


def _check_projection(p: np.ndarray, dim: int) -> np.ndarray:
    p = np.array(p, dtype=complex)
    if p.shape != (dim, dim):
        raise DimMismatch(f"projection has shape {p.shape}, expected {(dim, dim)}")
    if operator_norm(p @ p - p) > PROJECTION_TOL or operator_norm(p - p.conj().T) > PROJECTION_TOL:
        raise BadProjection("P must satisfy P^2 = P = P^H")
    return p


def make_pair(a_matrix, b_matrix, p_matrix=None) -> OperatorPair:
    """Validate ``A, B >= 0`` and precompute the spectral data of ``A + B``.

    With ``p_matrix`` the compression of ``B`` to ``ran P`` is diagonalised as
    well (the finite-dimensional form ``(sqrt(B) h, sqrt(B) k)`` on ``ran P``).
    """
    a_m = np.array(a_matrix, dtype=complex)
    b_m = np.array(b_matrix, dtype=complex)
    if a_m.ndim != 2 or b_m.ndim != 2:
        raise NotHermitian("operators must be square matrices")
    if a_m.shape != b_m.shape:
        raise DimMismatch(f"A has shape {a_m.shape}, B has shape {b_m.shape}")
    a = hermitian_eigendecompose(a_m)
    b = hermitian_eigendecompose(b_m)
    c_m = a.matrix + b.matrix
    c = hermitian_eigendecompose(c_m)
    err = operator_norm(c.reconstruct() - c_m)
    if err > RECONSTRUCTION_RTOL * (1.0 + operator_norm(c_m)):  # pragma: no cover
        raise TrotterKatoError(f"form-sum reconstruction error {err:.3e}")
    if p_matrix is None:
        return OperatorPair(a, b, c)
    p = _check_projection(p_matrix, a.dim)
    lam, vec = np.linalg.eigh(p)
    q = vec[:, lam > 0.5]
    if q.shape[1] == 0:
        raise BadProjection("P has rank 0")
    compressed = q.conj().T @ b.matrix @ q
    gen = hermitian_eigendecompose(0.5 * (compressed + compressed.conj().T))
    return OperatorPair(a, b, c, p, q, gen)


# --- schemes -----------------------------------------------------------------

UNITARY_VARIANTS = ("trotter_plain", "trotter_symmetrized", "kato_product",
                    "kato_symmetrized", "cachia_average", "lapidus_resolvent", "zeno")
REAL_TIME_VARIANTS = ("real_time_plain", "real_time_symmetrized")
VARIANTS = UNITARY_VARIANTS + REAL_TIME_VARIANTS
_KATO_VARIANTS = ("kato_product", "kato_symmetrized", "cachia_average")


@lru_cache(maxsize=128)
def _axiom_report(f: kato.KatoFunction) -> kato.AxiomReport:
    return kato.check_kato_axioms(f)


def require_kato(f: kato.KatoFunction) -> None:
    """Raise :class:`SchemeRejected` naming the first failed axiom."""
    report = _axiom_report(f)
    if not report.passed:
        bad = report.failures[0]
        raise SchemeRejected(
            f"{f.label()} fails Kato axiom ({bad.axiom}) {bad.message}: "
            f"value {bad.value!r} at {bad.witness!r}", axiom=bad.axiom)


@dataclass(frozen=True)
class ProductScheme:
    variant: str
    f: kato.KatoFunction | None = None
    g: kato.KatoFunction | None = None
    k: int | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValidationError(f"unknown scheme variant {self.variant!r}")
        if self.variant in _KATO_VARIANTS:
            if self.f is None or self.g is None:
                raise ValidationError(f"{self.variant} needs Kato functions f and g")
            require_kato(self.f)
            require_kato(self.g)
        if self.variant == "lapidus_resolvent":
            k = 1 if self.k is None else self.k
            if int(k) != k or k < 1:
                raise ValidationError(f"lapidus k must be a positive integer, got {k!r}")
            object.__setattr__(self, "k", int(k))

    @property
    def real_time(self) -> bool:
        return self.variant in REAL_TIME_VARIANTS

    @property
    def base_variant(self) -> str:
        return {"real_time_plain": "trotter_plain",
                "real_time_symmetrized": "trotter_symmetrized"}.get(self.variant, self.variant)

    def params(self) -> str:
        parts = []
        if self.f is not None:
            parts.append(f"f={self.f.label()}")
        if self.g is not None:
            parts.append(f"g={self.g.label()}")
        if self.k is not None:
            parts.append(f"k={self.k}")
        return " ".join(parts)

    def label(self) -> str:
        p = self.params()
        return f"{self.variant}[{p}]" if p else self.variant

    def to_json(self) -> dict:
        obj = {"variant": self.variant}
        if self.f is not None:
            obj["f"] = self.f.to_json()
        if self.g is not None:
            obj["g"] = self.g.to_json()
        if self.k is not None:
            obj["k"] = self.k
        return obj

    # convenience constructors
    @classmethod
    def trotter_plain(cls):
        return cls("trotter_plain")

    @classmethod
    def trotter_symmetrized(cls):
        return cls("trotter_symmetrized")

    @classmethod
    def kato_product(cls, f, g):
        return cls("kato_product", f, g)

    @classmethod
    def kato_symmetrized(cls, f, g):
        return cls("kato_symmetrized", f, g)

    @classmethod
    def cachia_average(cls, f, g):
        return cls("cachia_average", f, g)

    @classmethod
    def lapidus_resolvent(cls, k=1):
        return cls("lapidus_resolvent", k=k)

    @classmethod
    def zeno(cls):
        return cls("zeno")

    @classmethod
    def real_time_plain(cls):
        return cls("real_time_plain")

    @classmethod
    def real_time_symmetrized(cls):
        return cls("real_time_symmetrized")


def scheme_from_json(obj) -> ProductScheme:
    if not isinstance(obj, dict) or "variant" not in obj:
        raise ValidationError("scheme descriptor must be an object with a 'variant'")
    f = kato.kato_from_json(obj["f"]) if "f" in obj else None
    g = kato.kato_from_json(obj["g"]) if "g" in obj else None
    return ProductScheme(obj["variant"], f, g, obj.get("k"))


# --- one-step factors --------------------------------------------------------

def _exp_fn(z):
    return lambda lam: np.exp(-z * lam)


def _kato_fn(f, z):
    return lambda lam: f(z * lam)


def _resolvent_power_fn(k, z):
    return lambda lam: (1.0 + z * lam / k) ** (-k)


def _factor_plan(pair: OperatorPair, scheme: ProductScheme, z: complex):
    """List of ``(combine, [(op, fn), ...])`` describing ``F(z)``.

    ``combine`` is ``"product"`` (apply right to left) or ``"average"``.
    """
    v = scheme.base_variant
    a, b = pair.a, pair.b
    if v == "trotter_plain":
        return "product", [(a, _exp_fn(z)), (b, _exp_fn(z))]
    if v == "trotter_symmetrized":
        return "product", [(a, _exp_fn(z / 2)), (b, _exp_fn(z)), (a, _exp_fn(z / 2))]
    if v == "kato_product":
        return "product", [(a, _kato_fn(scheme.f, z)), (b, _kato_fn(scheme.g, z))]
    if v == "kato_symmetrized":
        return "product", [(a, _kato_fn(scheme.f, z / 2)), (b, _kato_fn(scheme.g, z)),
                           (a, _kato_fn(scheme.f, z / 2))]
    if v == "cachia_average":
        return "average", [(a, _kato_fn(scheme.f, 2 * z)), (b, _kato_fn(scheme.g, 2 * z))]
    if v == "lapidus_resolvent":
        k = scheme.k
        return "product", [(a, _resolvent_power_fn(k, z)), (b, _resolvent_power_fn(k, z))]
    if v == "zeno":
        pair._require_zeno()
        return "zeno", [(b, _exp_fn(z))]
    raise ValidationError(f"unknown variant {v!r}")  # pragma: no cover


def _tag(exc: FunctionUndefinedAtSpectrum, scheme: ProductScheme):
    return FunctionUndefinedAtSpectrum(exc.eigenvalue, str(exc.args[0]) if exc.args else "",
                                       scheme=scheme.label())


def step_factor(pair: OperatorPair, scheme: ProductScheme, z: complex) -> np.ndarray:
    """Matrix of the one-step factor ``F(z)`` through the spectral calculus."""
    combine, parts = _factor_plan(pair, scheme, complex(z))
    try:
        if scheme.base_variant == "lapidus_resolvent":
            k = scheme.k
            ra = matrix_power(resolvent(pair.a, z / k), k)
            rb = matrix_power(resolvent(pair.b, z / k), k)
            return ra @ rb
        mats = [apply_scalar_function(op, fn) for op, fn in parts]
    except FunctionUndefinedAtSpectrum as exc:
        raise _tag(exc, scheme) from exc
    if combine == "average":
        return 0.5 * (mats[0] + mats[1])
    if combine == "zeno":
        p = pair.zeno_projection
        return p @ mats[0] @ p
    out = mats[0]
    for m in mats[1:]:
        out = out @ m
    return out


def _check_time(scheme: ProductScheme, t: float):
    if scheme.real_time and t < 0:
        raise ValidationError("real-time schemes are semigroups: t must be >= 0")


def _step_parameter(scheme: ProductScheme, t: float, n: int) -> complex:
    return complex(t / n) if scheme.real_time else 1j * t / n


def _check_n(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    return int(n)


def product_operator(pair: OperatorPair, scheme: ProductScheme, t: float, n: int) -> np.ndarray:
    """``Pi_n(t) = F(i t/n)^n`` (or ``F(t/n)^n`` for real-time schemes)."""
    n = _check_n(n)
    _check_time(scheme, t)
    return matrix_power(step_factor(pair, scheme, _step_parameter(scheme, t, n)), n)


def exact_propagator(pair: OperatorPair, scheme: ProductScheme, t: float) -> np.ndarray:
    """The limit object: ``exp(-itC)``, ``exp(-tC)``, or ``exp(-itC_zeno) + 0``."""
    if scheme.variant == "zeno":
        pair._require_zeno()
        g = pair.zeno_generator
        inner = apply_scalar_function(g, _exp_fn(1j * t))
        q = pair.zeno_basis
        return q @ inner @ q.conj().T
    z = complex(t) if scheme.real_time else 1j * t
    return apply_scalar_function(pair.c, _exp_fn(z))


# --- batched vector route ----------------------------------------------------

def _spectral_values(op: HermitianOperator, fn, z_scale: np.ndarray, scheme) -> np.ndarray:
    """``fn`` evaluated on ``z_j * lam_i`` for every node, shape (N, dim).

    ``fn`` was built for a unit step parameter; here the parameter varies per
    node so the plan's closures are re-evaluated on the outer product.
    """
    lam = op.eigenvalues
    try:
        with np.errstate(all="raise", under="ignore"):
            vals = np.asarray(fn(z_scale[:, None], lam[None, :]), dtype=complex)
        if np.all(np.isfinite(vals)):
            return vals
    except (TrotterKatoError, ArithmeticError, FloatingPointError):
        pass
    for zj in z_scale:
        for x in lam:
            try:
                with np.errstate(all="raise", under="ignore"):
                    val = complex(np.asarray(fn(np.array([[zj]]), np.array([x]))).ravel()[0])
            except (TrotterKatoError, ArithmeticError, FloatingPointError) as exc:
                raise FunctionUndefinedAtSpectrum(float(x), str(exc), scheme.label()) from exc
            if not np.isfinite(val):
                raise FunctionUndefinedAtSpectrum(float(x), "non-finite value", scheme.label())
    raise FunctionUndefinedAtSpectrum(float("nan"), "evaluation failed", scheme.label())  # pragma: no cover


def _batched_plan(pair: OperatorPair, scheme: ProductScheme):
    """Like :func:`_factor_plan` but with functions of ``(z, lam)``."""
    v = scheme.base_variant
    a, b = pair.a, pair.b

    def ex(c):
        return lambda z, lam: np.exp(-c * z * lam)

    def kf(f, c):
        return lambda z, lam: f(c * z * lam)

    if v == "trotter_plain":
        return "product", [(a, ex(1.0)), (b, ex(1.0))]
    if v == "trotter_symmetrized":
        return "product", [(a, ex(0.5)), (b, ex(1.0)), (a, ex(0.5))]
    if v == "kato_product":
        return "product", [(a, kf(scheme.f, 1.0)), (b, kf(scheme.g, 1.0))]
    if v == "kato_symmetrized":
        return "product", [(a, kf(scheme.f, 0.5)), (b, kf(scheme.g, 1.0)), (a, kf(scheme.f, 0.5))]
    if v == "cachia_average":
        return "average", [(a, kf(scheme.f, 2.0)), (b, kf(scheme.g, 2.0))]
    if v == "lapidus_resolvent":
        k = scheme.k
        rp = lambda z, lam: (1.0 + z * lam / k) ** (-k)  # noqa: E731
        return "product", [(a, rp), (b, rp)]
    if v == "zeno":
        pair._require_zeno()
        return "zeno", [(b, ex(1.0))]
    raise ValidationError(f"unknown variant {v!r}")  # pragma: no cover


def _apply_diag(op: HermitianOperator, vals: np.ndarray, v: np.ndarray) -> np.ndarray:
    # rows of v are vectors: V diag(vals) V^H v, batched over rows
    basis = op.eigenbasis
    return ((v @ basis.conj()) * vals) @ basis.T


class _BatchedStep:
    """``F(z_j)`` applied to a stack of vectors, one step parameter per row."""

    def __init__(self, pair, scheme, z):
        self.combine, plan = _batched_plan(pair, scheme)
        self.parts = [(op, _spectral_values(op, fn, z, scheme)) for op, fn in plan]
        self.p = pair.zeno_projection

    def __call__(self, v: np.ndarray) -> np.ndarray:
        if self.combine == "average":
            (oa, fa), (ob, gb) = self.parts
            return 0.5 * (_apply_diag(oa, fa, v) + _apply_diag(ob, gb, v))
        if self.combine == "zeno":
            op, vals = self.parts[0]
            pt = self.p.T
            return _apply_diag(op, vals, v @ pt) @ pt
        for op, vals in reversed(self.parts):
            v = _apply_diag(op, vals, v)
        return v


def prepare_vector(pair: OperatorPair, scheme: ProductScheme, h) -> np.ndarray:
    h = np.asarray(h, dtype=complex).reshape(-1)
    if h.shape != (pair.dim,):
        raise DimMismatch(f"vector has length {h.size}, expected {pair.dim}")
    if not np.all(np.isfinite(h)) or np.linalg.norm(h) > 1e6:
        raise ValidationError("h must be finite with ||h|| <= 1e6")
    if scheme.variant == "zeno":
        pair._require_zeno()
        p = pair.zeno_projection
        leak = np.linalg.norm(h - p @ h)
        if leak > 1e-12:
            log.warning("projecting h into ran P for the Zeno scheme (||(I-P)h|| = %.3e)", leak)
            h = p @ h
    return h


def _exact_trajectory(pair, scheme, h, times):
    if scheme.variant == "zeno":
        g, q = pair.zeno_generator, pair.zeno_basis
        coeff = (h @ q.conj()) @ g.eigenbasis.conj()  # g-eigencoordinates, as a row
        phase = np.exp(-1j * times[:, None] * g.eigenvalues[None, :])
        return ((coeff[None, :] * phase) @ g.eigenbasis.T) @ q.T
    c = pair.c
    z = times if scheme.real_time else 1j * times
    coeff = h @ c.eigenbasis.conj()
    return (coeff[None, :] * np.exp(-z[:, None] * c.eigenvalues[None, :])) @ c.eigenbasis.T


def trajectory_errors(pair: OperatorPair, scheme: ProductScheme, n, h, times) -> np.ndarray:
    """``||Pi_n(t_j) h - U(t_j) h||`` for every ``t_j`` in ``times``.

    ``n=None`` stands for the limit itself (the spectrally exact comparator),
    which returns zeros.
    """
    times = np.asarray(times, dtype=float)
    for t in times:
        _check_time(scheme, t)
    h = prepare_vector(pair, scheme, h)
    if n is None:
        return np.zeros(times.shape)
    n = _check_n(n)
    z = (times / n).astype(complex) if scheme.real_time else 1j * times / n
    step = _BatchedStep(pair, scheme, z)
    v = np.broadcast_to(h, (times.size, pair.dim)).copy()
    for _ in range(n):
        v = step(v)
    exact = _exact_trajectory(pair, scheme, h, times)
    return np.linalg.norm(v - exact, axis=1)


# --- metrics -----------------------------------------------------------------

def l2_time_error(pair, scheme, n, h, grid: QuadratureGrid) -> float:
    """``int_0^T ||Pi_n(t) h - U(t) h||^2 dt`` by the quadrature ``grid``."""
    err = trajectory_errors(pair, scheme, n, h, grid.nodes)
    return float(np.dot(grid.weights, err ** 2))


def measure_error(pair, scheme, n, h, grid: QuadratureGrid, eta: float) -> float:
    """Quadrature estimate of ``|{t in [0, T]: ||Pi_n(t) h - U(t) h|| >= eta}|``."""
    if not eta > 0:
        raise ValidationError(f"eta must be > 0, got {eta!r}")
    err = trajectory_errors(pair, scheme, n, h, grid.nodes)
    return float(np.sum(grid.weights[err >= eta]))


def sup_time_error(pair, scheme, n, h, grid: QuadratureGrid) -> float:
    """Maximum real-time error over the grid nodes."""
    if not scheme.real_time:
        raise SchemeMismatch(f"sup-in-time metric applies to real-time schemes, not {scheme.variant}")
    return float(np.max(trajectory_errors(pair, scheme, n, h, grid.nodes)))


def operator_l2_time_error(pair, scheme, n, grid: QuadratureGrid) -> float:
    """``int_0^T ||Pi_n(t) - U(t)||_op^2 dt``."""
    total = 0.0
    for t, w in zip(grid.nodes, grid.weights):
        diff = product_operator(pair, scheme, t, n) - exact_propagator(pair, scheme, t)
        total += w * operator_norm(diff) ** 2
    return float(total)


def symmetrization_identity_residual(pair: OperatorPair, t: float, n: int) -> float:
    """``||Sym_n(t) - exp(itA/2n) Plain_n(t) exp(-itA/2n)||_op``."""
    n = _check_n(n)
    sym = product_operator(pair, ProductScheme.trotter_symmetrized(), t, n)
    plain = product_operator(pair, ProductScheme.trotter_plain(), t, n)
    half = apply_scalar_function(pair.a, _exp_fn(1j * t / (2 * n)))
    return operator_norm(sym - half.conj().T @ plain @ half)


def _limit_resolvent(pair, scheme, z) -> np.ndarray:
    if scheme.variant == "zeno":
        pair._require_zeno()
        q = pair.zeno_basis
        return q @ resolvent(pair.zeno_generator, z) @ q.conj().T
    return resolvent(pair.c, z)


def _solve_identity_plus(s: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    m = np.eye(s.shape[-1]) + s
    cond = np.linalg.cond(m)
    if not np.all(np.isfinite(cond)) or np.any(cond > 1e14):
        raise SingularInverse(f"I + S_tau is numerically singular (cond = {np.max(cond):.3e})")
    return np.linalg.solve(m, rhs)


def chernoff_resolvent_error(pair, scheme, tau: float, t: float) -> float:
    """``||(I + S_tau(t))^-1 - (I + tC)^-1||_op`` with ``S_tau = (I - F(tau t)) / tau``.

    ``F`` is the scheme's one-step factor at the real parameter ``tau t``.
    """
    if not tau > 0:
        raise ValidationError(f"tau must be > 0, got {tau!r}")
    if t < 0:
        raise ValidationError("t must be >= 0")
    dim = pair.dim
    f = step_factor(pair, scheme, complex(tau * t))
    s = (np.eye(dim) - f) / tau
    r_tau = _solve_identity_plus(s, np.eye(dim))
    return operator_norm(r_tau - _limit_resolvent(pair, scheme, complex(t)))


def boundary_resolvent_errors(pair, scheme, tau: float, h, times) -> np.ndarray:
    """``||(I + S_tau(it))^-1 h - (I + itC)^-1 h||`` at each time."""
    if not tau > 0:
        raise ValidationError(f"tau must be > 0, got {tau!r}")
    times = np.asarray(times, dtype=float)
    h = prepare_vector(pair, scheme, h)
    dim = pair.dim
    out = np.empty(times.shape)
    for j, t in enumerate(times):
        f = step_factor(pair, scheme, 1j * tau * t)
        s = (np.eye(dim) - f) / tau
        lhs = _solve_identity_plus(s, h)
        rhs = _limit_resolvent(pair, scheme, 1j * t) @ h
        out[j] = np.linalg.norm(lhs - rhs)
    return out


def boundary_resolvent_l2_error(pair, scheme, tau: float, h, grid: QuadratureGrid) -> float:
    """Quadrature of ``||R_tau(it) h - (I + itC)^-1 h||^2`` over ``[0, T]``."""
    err = boundary_resolvent_errors(pair, scheme, tau, h, grid.nodes)
    return float(np.dot(grid.weights, err ** 2))


# --- reports -----------------------------------------------------------------

CSV_COLUMNS = ("scheme", "variant_params", "metric", "n", "T", "dim", "seed",
               "error", "error_normalized")


def format_float(x: float) -> str:
    """Round-trip representation with 17 significant digits."""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class Metric:
    """``l2``, ``measure`` (with ``eta``), ``sup``, ``operator_l2`` or ``chernoff``.

    The ``chernoff`` metric integrates the boundary resolvent error over the
    time grid at ``tau = 1/n``, so it reuses the ``n`` column of a report.
    """

    kind: str
    eta: float | None = None

    KINDS = ("l2", "measure", "sup", "operator_l2", "chernoff")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValidationError(f"unknown metric {self.kind!r}")
        if self.kind == "measure" and not (self.eta is not None and self.eta > 0):
            raise ValidationError("measure metric needs eta > 0")

    def name(self) -> str:
        return f"measure(eta={format_float(self.eta)})" if self.kind == "measure" else self.kind

    def to_json(self) -> dict:
        return {"kind": self.kind, "eta": self.eta} if self.kind == "measure" else {"kind": self.kind}


def evaluate_metric(pair, scheme, metric: Metric, n: int, h, grid: QuadratureGrid) -> float:
    if metric.kind == "l2":
        return l2_time_error(pair, scheme, n, h, grid)
    if metric.kind == "measure":
        return measure_error(pair, scheme, n, h, grid, metric.eta)
    if metric.kind == "sup":
        return sup_time_error(pair, scheme, n, h, grid)
    if metric.kind == "operator_l2":
        return operator_l2_time_error(pair, scheme, n, grid)
    return boundary_resolvent_l2_error(pair, scheme, 1.0 / n, h, grid)


def normalize(metric: Metric, error: float, h_norm: float, T: float) -> float:
    """Scale-free error: squared metrics / ||h||^2, sup / ||h||, measures / T."""
    if metric.kind in ("l2", "chernoff"):
        return error / h_norm ** 2 if h_norm else 0.0
    if metric.kind == "sup":
        return error / h_norm if h_norm else 0.0
    return error / T


@dataclass
class ConvergenceReport:
    scheme: str
    variant_params: str
    metric: str
    T: float
    dim: int
    seed: int | None
    grid: dict
    h: str
    entries: list = field(default_factory=list)  # (n, error, error_normalized)
    label: str = "verification"

    def add(self, n: int, error: float, normalized: float):
        if self.entries and n <= self.entries[-1][0]:
            raise ValidationError("report entries must have strictly increasing n")
        if not (math.isfinite(error) and error >= 0):
            raise ValidationError(f"error value {error!r} must be finite and >= 0")
        self.entries.append((int(n), float(error), float(normalized)))

    @property
    def ns(self):
        return [e[0] for e in self.entries]

    @property
    def errors(self):
        return [e[1] for e in self.entries]

    def rows(self):
        seed = "" if self.seed is None else str(self.seed)
        for n, err, nerr in self.entries:
            yield (self.scheme, self.variant_params, self.metric, str(n), format_float(self.T),
                   str(self.dim), seed, format_float(err), format_float(nerr))

    def to_json(self) -> dict:
        return {"scheme": self.scheme, "variant_params": self.variant_params,
                "metric": self.metric, "T": self.T, "dim": self.dim, "seed": self.seed,
                "grid": self.grid, "h": self.h, "label": self.label,
                "entries": [{"n": n, "error": e, "error_normalized": ne}
                            for n, e, ne in self.entries]}


def reports_to_csv(reports) -> str:
    """CSV text sorted by (scheme, variant_params, metric, n)."""
    rows = [r for rep in reports for r in rep.rows()]
    rows.sort(key=lambda r: (r[0], r[1], r[2], int(r[3])))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(rows)
    return buf.getvalue()


def convergence_sweep(pair, scheme, n_values, h, grid: QuadratureGrid, metric: Metric,
                      *, seed=None, h_label="custom") -> ConvergenceReport:
    """Evaluate ``metric`` for every ``n`` in ``n_values``."""
    h_vec = prepare_vector(pair, scheme, h)
    h_norm = float(np.linalg.norm(h_vec))
    report = ConvergenceReport(scheme.variant, scheme.params(), metric.name(), grid.T,
                               pair.dim, seed, grid.describe(), h_label)
    if scheme.variant == "zeno":
        report.label = "demonstration"
    for n in n_values:
        err = evaluate_metric(pair, scheme, metric, n, h_vec, grid)
        report.add(n, err, normalize(metric, err, h_norm, grid.T))
    return report
