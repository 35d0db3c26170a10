"""Gauss-Legendre rules on [0, T] and on the half line (0, inf)."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError


@lru_cache(maxsize=None)
def _leggauss(points: int):
    x, w = np.polynomial.legendre.leggauss(points)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_legendre_panels(edges, points: int):
    """Composite Gauss-Legendre nodes/weights on consecutive ``edges``."""
    edges = np.asarray(edges, dtype=float)
    return _panel_rule(edges[:-1], edges[1:], points)


def _panel_rule(lo, hi, points: int):
    x, w = _leggauss(points)
    a, b = np.asarray(lo, dtype=float)[:, None], np.asarray(hi, dtype=float)[:, None]
    half = 0.5 * (b - a)
    nodes = (a + half * (x + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Nodes in (0, T) and positive weights summing to T."""

    T: float
    nodes: np.ndarray
    weights: np.ndarray
    kind: str = "gauss-legendre"
    panels: int = 0
    points: int = 0

    def __post_init__(self):
        if not self.T > 0:
            raise ValidationError(f"T must be positive, got {self.T!r}")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValidationError("quadrature nodes must be strictly increasing")
        if self.nodes[0] <= 0 or self.nodes[-1] >= self.T:
            raise ValidationError("quadrature nodes must lie in (0, T)")
        if np.any(self.weights <= 0) or abs(self.weights.sum() - self.T) > 1e-12 * max(1.0, self.T):
            raise ValidationError("quadrature weights must be positive and sum to T")

    def describe(self) -> dict:
        return {"kind": self.kind, "T": self.T, "panels": self.panels,
                "points": self.points, "nodes": int(self.nodes.size)}


def time_grid(T: float = 1.0, panels: int = 8, points: int = 16) -> QuadratureGrid:
    """Composite Gauss-Legendre grid on [0, T] (default 8 x 16 nodes)."""
    if panels < 1 or points < 1:
        raise ValidationError("panels and points must be positive")
    if not (T > 0 and np.isfinite(T)):
        raise ValidationError(f"T must be positive and finite, got {T!r}")
    nodes, weights = gauss_legendre_panels(np.linspace(0.0, T, panels + 1), points)
    # renormalise round-off so the weights sum to T
    weights = weights * (T / weights.sum())
    return QuadratureGrid(float(T), nodes, weights, "gauss-legendre", panels, points)


def midpoint_grid(T: float = 1.0, nodes: int = 1024) -> QuadratureGrid:
    """Dense uniform cross-check rule; nodes at cell midpoints stay inside (0, T)."""
    h = T / nodes
    x = (np.arange(nodes) + 0.5) * h
    return QuadratureGrid(float(T), x, np.full(nodes, h), "midpoint", nodes, 1)


# --- half line ---------------------------------------------------------------

HALF_LINE_PANELS = 8
HALF_LINE_POINTS = 64
_GRADING_LEVELS = 14
_GRADING_POINTS = 24


def _graded_edges(feature_theta, feature_width):
    """Panel edges on [0, pi/2]: 8 uniform panels, geometric grading toward
    both endpoints, and toward each (theta, width) feature."""
    top = 0.5 * np.pi
    edges = [np.linspace(0.0, top, HALF_LINE_PANELS + 1)]
    base = top / HALF_LINE_PANELS
    graded = base * 4.0 ** -np.arange(1, _GRADING_LEVELS + 1)
    edges.append(graded)
    edges.append(top - graded)
    for theta, width in zip(feature_theta, feature_width):
        d = base * 4.0 ** -np.arange(1, _GRADING_LEVELS + 1)
        d = d[d > 0.25 * width]
        edges.append(theta - d)
        edges.append(theta + d)
        edges.append([theta])
    e = np.concatenate([np.ravel(x) for x in edges])
    e = np.unique(np.clip(e, 0.0, top))
    return e


def half_line_rule(feature_t=(), feature_width=()):
    """Nodes ``t`` and weights for integrals over (0, inf).

    Uses ``t = tan(theta)`` and composite Gauss-Legendre in ``theta``.
    ``feature_t``/``feature_width`` mark near-singular points of the
    integrand (location and width in ``t``) around which panels are graded.
    """
    ft = np.asarray(feature_t, dtype=float).ravel()
    fw = np.asarray(feature_width, dtype=float).ravel()
    theta = np.arctan(ft)
    width = fw * np.cos(theta) ** 2
    edges = _graded_edges(theta, width)
    uniform = np.linspace(0.0, 0.5 * np.pi, HALF_LINE_PANELS + 1)
    # coarse panels get the full rule, graded ones a shorter one
    coarse = np.diff(edges) > 0.5 * (uniform[1] - uniform[0])
    lo, hi = edges[:-1], edges[1:]
    n1, w1 = _panel_rule(lo[coarse], hi[coarse], HALF_LINE_POINTS)
    n2, w2 = _panel_rule(lo[~coarse], hi[~coarse], _GRADING_POINTS)
    th = np.concatenate([n1, n2])
    wt = np.concatenate([w1, w2])
    t = np.tan(th)
    jac = 1.0 / np.cos(th) ** 2
    return t, wt * jac
