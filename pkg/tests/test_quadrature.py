import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trotter_kato.errors import ValidationError
from trotter_kato.quadrature import QuadratureGrid, half_line_rule, midpoint_grid, time_grid


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-3, 1e3), st.integers(1, 12), st.integers(1, 32))
def test_time_grid_invariants(T, panels, points):
    g = time_grid(T, panels, points)
    assert g.nodes.size == panels * points
    assert abs(g.weights.sum() - T) <= 1e-12 * max(1.0, T)
    assert 0 < g.nodes[0] and g.nodes[-1] < T and np.all(np.diff(g.nodes) > 0)


def test_time_grid_is_exact_for_polynomials():
    g = time_grid(2.0)
    assert np.dot(g.weights, g.nodes ** 7) == pytest.approx(2.0 ** 8 / 8, rel=1e-14)
    assert g.describe() == {"kind": "gauss-legendre", "T": 2.0, "panels": 8, "points": 16,
                            "nodes": 128}


def test_midpoint_grid():
    g = midpoint_grid(1.0, 1024)
    assert np.dot(g.weights, np.sin(np.pi * g.nodes)) == pytest.approx(2 / np.pi, rel=1e-6)


def test_grid_validation():
    with pytest.raises(ValidationError):
        time_grid(0.0)
    with pytest.raises(ValidationError):
        QuadratureGrid(1.0, np.array([0.0, 0.5]), np.array([0.5, 0.5]))
    with pytest.raises(ValidationError):
        QuadratureGrid(1.0, np.array([0.2, 0.5]), np.array([0.5, 0.6]))
    with pytest.raises(ValidationError):
        time_grid(1.0, 0, 4)


@pytest.mark.parametrize("fn, exact, rel", [
    (lambda t: 1 / (1 + t * t), math.pi / 2, 1e-12),
    (lambda t: np.exp(-t), 1.0, 1e-12),
    (lambda t: np.log1p(t * t) / (1 + t * t), math.pi * math.log(2), 1e-12),
    # integrable endpoint singularity: limited by the innermost graded panel
    (lambda t: 1 / np.sqrt(t) / (1 + t), math.pi, 1e-5),
])
def test_half_line_rule(fn, exact, rel):
    t, w = half_line_rule()
    assert np.all(t > 0) and np.all(w > 0)
    assert np.dot(w, fn(t)) == pytest.approx(exact, rel=rel)


@pytest.mark.parametrize("eps, y", [(1e-2, 3.0), (1e-4, 0.5), (1e-6, 20.0)])
def test_half_line_near_pole(eps, y):
    # int_0^inf dt / (t^2 + (eps + iy)^2) = pi / (2 (eps + iy))
    z = complex(eps, y)
    t, w = half_line_rule([y], [eps])
    got = np.dot(w, 1 / (t * t + z * z))
    assert abs(got - math.pi / (2 * z)) <= 1e-9 * abs(math.pi / (2 * z))
