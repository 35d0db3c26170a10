"""Dense Hermitian spectral calculus.

Every matrix function used by the product formulas is evaluated through the
eigendecomposition ``A = V diag(lam) V^H``, so boundary values ``f(i t lam)``
of arbitrary Kato functions can be applied exactly like ``exp``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    EigensolverFailure,
    FunctionUndefinedAtSpectrum,
    NotHermitian,
    NotPSD,
    SingularResolvent,
    TrotterKatoError,
)

log = logging.getLogger(__name__)

HERMITIAN_RTOL = 1e-10
PSD_RTOL = 1e-10
RESOLVENT_FLOOR = 1e-14


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value of ``m``."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    if m.ndim == 1:
        return float(np.linalg.norm(m))
    return float(np.linalg.norm(m, 2))


def vector_norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(v))


def matvec(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.asarray(m) @ np.asarray(v)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Non-negative Hermitian matrix held as spectral data.

    Attributes
    ----------
    eigenvalues : ndarray, shape (dim,)
        Real, ascending, non-negative (round-off negatives are clamped).
    eigenbasis : ndarray, shape (dim, dim)
        Unitary matrix whose columns are the eigenvectors.
    """

    eigenvalues: np.ndarray
    eigenbasis: np.ndarray
    _matrix: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix
        return self.reconstruct()

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues))) if self.dim else 0.0

    def reconstruct(self) -> np.ndarray:
        v = self.eigenbasis
        return (v * self.eigenvalues) @ v.conj().T


def _psd_tolerance(eigenvalues: np.ndarray) -> float:
    radius = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    return PSD_RTOL * max(1.0, radius)


def hermitian_eigendecompose(m, *, require_psd: bool = True) -> HermitianOperator:
    """Eigendecompose a Hermitian (by default non-negative) matrix.

    Eigenvalues in ``[-tol_psd, 0)`` with ``tol_psd = 1e-10 * max(1, rho)``
    are clamped to zero with a warning; anything more negative raises
    :class:`NotPSD`.
    """
    m = np.array(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise NotHermitian(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NotHermitian("matrix has non-finite entries")
    norm = operator_norm(m)
    asym = operator_norm(m - m.conj().T)
    if asym > HERMITIAN_RTOL * (1.0 + norm):
        raise NotHermitian(f"||m - m^H|| = {asym:.3e} exceeds tolerance")
    herm = 0.5 * (m + m.conj().T)
    try:
        lam, v = np.linalg.eigh(herm)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigensolverFailure(str(exc)) from exc
    if require_psd:
        tol = _psd_tolerance(lam)
        if lam[0] < -tol:
            raise NotPSD(f"minimum eigenvalue {lam[0]:.6e} below -{tol:.1e}")
        if lam[0] < 0:
            log.warning("clamping %d round-off negative eigenvalue(s) to 0",
                        int(np.sum(lam < 0)))
            lam = np.where(lam < 0, 0.0, lam)
    return HermitianOperator(lam, v, herm)


def diagonal_operator(values) -> HermitianOperator:
    """Operator ``diag(values)`` with the identity as eigenbasis (no solver)."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    basis = np.eye(values.size, dtype=complex)[:, order]
    return HermitianOperator(values[order], basis, np.diag(values).astype(complex))


def _evaluate_on_spectrum(phi: Callable, lam: np.ndarray) -> np.ndarray:
    try:
        with np.errstate(all="raise", under="ignore"):
            vals = np.asarray(phi(lam), dtype=complex)
        if vals.shape != lam.shape:
            vals = np.broadcast_to(vals, lam.shape).astype(complex)
        if np.all(np.isfinite(vals)):
            return vals
    except (TrotterKatoError, ArithmeticError, FloatingPointError):
        pass
    # locate the first offending eigenvalue
    out = np.empty(lam.shape, dtype=complex)
    for j, x in enumerate(lam):
        try:
            with np.errstate(all="raise", under="ignore"):
                val = complex(np.asarray(phi(np.array([x]))).reshape(-1)[0])
        except (TrotterKatoError, ArithmeticError, FloatingPointError) as exc:
            raise FunctionUndefinedAtSpectrum(float(x), str(exc)) from exc
        if not np.isfinite(val):
            raise FunctionUndefinedAtSpectrum(float(x), "non-finite value")
        out[j] = val
    return out


def apply_scalar_function(op: HermitianOperator, phi: Callable) -> np.ndarray:
    """Return ``V diag(phi(lam)) V^H``.

    ``phi`` receives the whole eigenvalue array and must return an array of
    the same shape. Errors or non-finite values raise
    :class:`FunctionUndefinedAtSpectrum` naming the offending eigenvalue.
    """
    vals = _evaluate_on_spectrum(phi, op.eigenvalues)
    v = op.eigenbasis
    return (v * vals) @ v.conj().T


def unitary_group(op: HermitianOperator, t: float) -> np.ndarray:
    """``exp(-i t A)``."""
    return apply_scalar_function(op, lambda lam: np.exp(-1j * t * lam))


def semigroup(op: HermitianOperator, t: float) -> np.ndarray:
    """``exp(-t A)`` for ``t >= 0``."""
    return apply_scalar_function(op, lambda lam: np.exp(-t * lam))


def resolvent(op: HermitianOperator, z: complex) -> np.ndarray:
    """``(I + z A)^{-1}``."""
    denom = 1.0 + complex(z) * op.eigenvalues
    bad = np.abs(denom) < RESOLVENT_FLOOR
    if np.any(bad):
        lam = float(op.eigenvalues[np.argmax(bad)])
        raise SingularResolvent(f"|1 + z*lam| < {RESOLVENT_FLOOR} at lam = {lam!r}, z = {z!r}")
    v = op.eigenbasis
    return (v / denom) @ v.conj().T


def matrix_power(m: np.ndarray, n: int) -> np.ndarray:
    """``m**n`` by binary exponentiation, ``n >= 1``."""
    if int(n) != n or n < 1:
        raise ValueError(f"power must be a positive integer, got {n!r}")
    n = int(n)
    result = None
    base = np.asarray(m)
    while True:
        if n & 1:
            result = base if result is None else result @ base
        n >>= 1
        if not n:
            return result
        base = base @ base
