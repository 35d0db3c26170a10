"""Deterministic random fixtures.

All random matrices and vectors come from numpy's counter-based Philox
generator keyed by a 64-bit seed and a small integer *stream* label, so the
A and B of a pair (or the Zeno projection) never share random draws.
"""
from __future__ import annotations

import numpy as np

STREAM_A = 0
STREAM_B = 1
STREAM_PROJECTION = 2
STREAM_VECTOR = 3


def generator(seed: int, stream: int = 0) -> np.random.Generator:
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    return np.random.Generator(np.random.Philox(key=[seed, int(stream)]))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_psd(dim: int, seed: int, spectral_scale: float = 1.0, stream: int = 0) -> np.ndarray:
    """Hermitian PSD matrix ``G G^H`` rescaled to spectral radius ``spectral_scale``."""
    g = complex_gaussian(generator(seed, stream), (dim, dim))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    rho = float(np.linalg.eigvalsh(m)[-1])
    return m * (spectral_scale / rho)


def random_pair(dim: int, seed: int, spectral_scale: float = 1.0):
    return (random_psd(dim, seed, spectral_scale, STREAM_A),
            random_psd(dim, seed, spectral_scale, STREAM_B))


def random_projection(dim: int, rank: int, seed: int) -> np.ndarray:
    """Orthogonal projection onto a random ``rank``-dimensional subspace."""
    g = complex_gaussian(generator(seed, STREAM_PROJECTION), (dim, rank))
    q, _ = np.linalg.qr(g)
    p = q @ q.conj().T
    return 0.5 * (p + p.conj().T)


def random_unit_vector(dim: int, seed: int) -> np.ndarray:
    v = complex_gaussian(generator(seed, STREAM_VECTOR), dim)
    return v / np.linalg.norm(v)
