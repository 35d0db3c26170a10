import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from trotter_kato import seeding


def test_same_seed_same_matrix():
    np.testing.assert_array_equal(seeding.random_psd(8, 42), seeding.random_psd(8, 42))
    assert not np.allclose(seeding.random_psd(8, 42), seeding.random_psd(8, 43))


def test_streams_are_independent():
    a, b = seeding.random_pair(8, 42)
    assert not np.allclose(a, b)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**63), st.floats(0.1, 100))
def test_random_psd_properties(dim, seed, scale):
    m = seeding.random_psd(dim, seed, scale)
    np.testing.assert_array_equal(m, m.conj().T)
    lam = np.linalg.eigvalsh(m)
    assert lam[0] >= -1e-12 * scale
    assert abs(lam[-1] - scale) <= 1e-10 * scale


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 10).flatmap(lambda d: st.tuples(st.just(d), st.integers(1, d))),
       st.integers(0, 2**32))
def test_random_projection(dims, seed):
    dim, rank = dims
    p = seeding.random_projection(dim, rank, seed)
    assert np.linalg.norm(p @ p - p, 2) <= 1e-12
    assert np.linalg.norm(p - p.conj().T, 2) == 0.0
    assert round(np.trace(p).real) == rank


def test_unit_vector():
    v = seeding.random_unit_vector(8, 3)
    assert abs(np.linalg.norm(v) - 1) <= 1e-15
