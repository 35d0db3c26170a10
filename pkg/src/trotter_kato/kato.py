"""Holomorphic Kato functions.

A holomorphic Kato function is a map ``f`` on the closed right half-plane with
``|f| <= 1``, real values in [0, 1] on the positive axis, ``f(0) = 1`` and
``f'(0) = -1``.  Every such function factors as::

    f(z) = D(z) * exp(-E(z)) * exp(-alpha z)

with a Blaschke-type product ``D`` over zeros ``xi_k`` (one quadratic factor
per conjugate pair), a measure exponent
``E(z) = (2z/pi) * int dnu(t) / (z^2 + t^2)`` and a linear exponent.  The
slopes at the origin add up: ``kappa + beta + alpha = 1``.

Builtin closed forms (:class:`Exp`, :class:`ResolventPower`,
:class:`SinglePair`, :class:`AtomicExp`) and the general
:class:`Canonical` handle share the :class:`KatoFunction` interface.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    BetaDiverges,
    BoundaryACUnsupported,
    BudgetExceeded,
    ConfigParse,
    KappaExceedsOne,
    PoleAtBoundary,
    ValidationError,
)
from .quadrature import half_line_rule

KAPPA_TOL = 1e-12
BUDGET_TOL = 1e-8
POLE_RADIUS = 1e-12
MOMENT_GUARD = 1e12


def _as_complex_array(z):
    arr = np.asarray(z, dtype=complex)
    if np.any(arr.real < 0):
        raise ValidationError("Kato functions are evaluated on Re z >= 0 only")
    return arr


def _restore_shape(value, z):
    return complex(value) if np.ndim(z) == 0 else value


# --- zeros -------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroSet:
    """Zeros of ``f`` in the right half-plane.

    Each entry ``(xi, mult)`` has ``Re xi > 0`` and ``Im xi >= 0`` and stands
    for the quadratic factor of the conjugate pair ``xi, conj(xi)``; a real
    entry stands for a double real zero.
    """

    entries: tuple = ()

    def __post_init__(self):
        cleaned = []
        for entry in self.entries:
            if isinstance(entry, (complex, float, int)):
                xi, mult = complex(entry), 1
            else:
                xi, mult = complex(entry[0]), entry[1]
            if int(mult) != mult or mult < 1:
                raise ValidationError(f"multiplicity must be a positive integer, got {mult!r}")
            if not (np.isfinite(xi.real) and np.isfinite(xi.imag)):
                raise ValidationError(f"zero {xi!r} is not finite")
            if xi.real <= 0:
                raise ValidationError(f"zero {xi!r} must satisfy Re xi > 0")
            if xi.imag < 0:
                xi = xi.conjugate()
            cleaned.append((xi, int(mult)))
        object.__setattr__(self, "entries", tuple(cleaned))

    def __len__(self):
        return len(self.entries)

    @property
    def xi(self) -> np.ndarray:
        return np.array([e[0] for e in self.entries], dtype=complex)

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([e[1] for e in self.entries], dtype=int)

    def zeros_of_f(self):
        """All zeros of ``f`` with multiplicities (conjugates included)."""
        pts, mults = [], []
        for xi, m in self.entries:
            if xi.imag > 0:
                pts += [xi, xi.conjugate()]
                mults += [m, m]
            else:
                pts.append(xi)
                mults.append(2 * m)
        return np.array(pts, dtype=complex), np.array(mults, dtype=int)


def kappa(zeros: ZeroSet, *, check: bool = True) -> float:
    """Slope contribution ``4 * sum_k mult_k Re(xi_k) / |xi_k|^2`` of the zeros."""
    if not len(zeros):
        return 0.0
    xi = zeros.xi
    value = float(4.0 * np.sum(zeros.multiplicities * xi.real / np.abs(xi) ** 2))
    if check and value > 1.0 + KAPPA_TOL:
        raise KappaExceedsOne(f"kappa = {value:.12g} > 1: not a Kato function")
    return value


def blaschke_D(zeros: ZeroSet, z):
    """Blaschke-type product over the quadratic factors of ``zeros``."""
    zz = _as_complex_array(z)
    out = np.ones(zz.shape, dtype=complex)
    for xi, m in zeros.entries:
        r, a2 = xi.real, abs(xi) ** 2
        z2 = zz * zz
        out = out * ((z2 - 2 * r * zz + a2) / (z2 + 2 * r * zz + a2)) ** m
    return _restore_shape(out, z)


# --- measure -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ACWeight:
    """Density ``h(t)`` of the absolutely continuous part of the measure.

    ``boundary_exponent`` (if given) returns the closed-form exponent
    ``E(iy)`` on the imaginary axis; without it boundary evaluation is refused.
    """

    id: str
    params: tuple
    density: Callable[[np.ndarray], np.ndarray]
    boundary_exponent: Callable | None = None
    beta_exact: float | None = None

    def to_json(self) -> dict:
        return {"id": self.id, **dict(self.params)}

    def __eq__(self, other):
        return isinstance(other, ACWeight) and (self.id, self.params) == (other.id, other.params)

    def __hash__(self):
        return hash((self.id, self.params))


def log_resolvent_weight(k: float = 1.0, scale: float = 1.0) -> ACWeight:
    """``h(t) = scale * (k/2) * log(1 + t^2/k^2)``.

    With ``scale = 1`` and ``alpha = 0`` the canonical function is
    ``(1 + z/k)^-k``, whose exponent ``k * Log(1 + z/k)`` also gives the
    boundary values.
    """
    k, scale = float(k), float(scale)
    if not (k > 0 and scale > 0 and math.isfinite(k) and math.isfinite(scale)):
        raise ValidationError("log_resolvent weight needs k > 0 and scale > 0")

    def density(t):
        return scale * 0.5 * k * np.log1p((np.asarray(t) / k) ** 2)

    def boundary(z):
        return scale * k * np.log1p(np.asarray(z) / k)

    params = (("k", k),) if scale == 1.0 else (("k", k), ("scale", scale))
    return ACWeight("log_resolvent", params, density, boundary, beta_exact=scale)


WEIGHT_REGISTRY = {"log_resolvent": log_resolvent_weight}


def weight_from_json(obj) -> ACWeight:
    if not isinstance(obj, dict) or "id" not in obj:
        raise ConfigParse("ac_weight must be an object with an 'id'", "ac_weight")
    params = {k: v for k, v in obj.items() if k != "id"}
    try:
        factory = WEIGHT_REGISTRY[obj["id"]]
    except KeyError:
        raise ConfigParse(f"unknown weight id {obj['id']!r}", "ac_weight.id") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigParse(str(exc), "ac_weight") from exc


def _ac_integral(weight: ACWeight, z: complex) -> complex:
    """``int_0^inf h(t) / (z^2 + t^2) dt`` for ``Re z > 0`` (or real z > 0)."""
    t, w = half_line_rule([abs(z.imag)], [abs(z.real)])
    return complex(np.sum(w * weight.density(t) / (z * z + t * t)))


@dataclass(frozen=True)
class KatoMeasure:
    """Atoms ``(s_l, w_l)`` on (0, inf) plus an optional AC density."""

    atoms: tuple = ()
    ac_weight: ACWeight | None = None
    total_moment: float = field(default=0.0, init=False)

    def __post_init__(self):
        atoms = []
        for s, w in self.atoms:
            s, w = float(s), float(w)
            if not (math.isfinite(s) and math.isfinite(w)):
                raise ValidationError("atoms must be finite")
            if s <= 0:
                raise ValidationError(f"atom location {s!r} must be > 0 (no mass at 0)")
            if w <= 0:
                raise ValidationError(f"atom weight {w!r} must be > 0")
            atoms.append((s, w))
        object.__setattr__(self, "atoms", tuple(atoms))
        moment = sum(w / (1 + s * s) for s, w in atoms)
        if self.ac_weight is not None:
            t, wt = half_line_rule()
            moment += float(np.sum(wt * self.ac_weight.density(t) / (1 + t * t)))
        if not (math.isfinite(moment) and moment <= MOMENT_GUARD):
            raise ValidationError(f"measure moment int dnu/(1+t^2) = {moment!r} is not finite")
        object.__setattr__(self, "total_moment", moment)

    @property
    def empty(self) -> bool:
        return not self.atoms and self.ac_weight is None


def measure_exponent(measure: KatoMeasure, z):
    """``E(z) = (2z/pi) * (sum_l w_l / (z^2 + s_l^2) + int h(t) / (z^2 + t^2) dt)``."""
    zz = _as_complex_array(z)
    out = np.zeros(zz.shape, dtype=complex)
    if measure.empty:
        return _restore_shape(out, z)
    flat = zz.ravel()
    res = np.zeros(flat.shape, dtype=complex)
    for s, w in measure.atoms:
        near = (np.abs(flat - 1j * s) < POLE_RADIUS) | (np.abs(flat + 1j * s) < POLE_RADIUS)
        if np.any(near):
            raise PoleAtBoundary(complex(flat[np.argmax(near)]))
        res += w / (flat * flat + s * s)
    weight = measure.ac_weight
    exponent = 2.0 * flat / np.pi * res
    if weight is not None:
        for j, zj in enumerate(flat):
            if zj == 0:
                continue
            if zj.real > 0:
                exponent[j] += 2.0 * zj / np.pi * _ac_integral(weight, zj)
            elif weight.boundary_exponent is not None:
                exponent[j] += weight.boundary_exponent(zj)
            else:
                raise BoundaryACUnsupported(
                    f"no closed-form boundary value registered for weight {weight.id!r}")
    return _restore_shape(exponent.reshape(zz.shape), z)


def _neville_at_zero(x, y) -> float:
    """Value at 0 of the polynomial through ``(x, y)`` (Richardson tableau)."""
    x = list(map(float, x))
    p = list(map(float, y))
    n = len(x)
    for level in range(1, n):
        for i in range(n - level):
            p[i] = (x[i + level] * p[i] - x[i] * p[i + 1]) / (x[i + level] - x[i])
    return p[0]


BETA_LEVELS = 41
BETA_DIFF_TOL = 1e-10
BETA_BLOWUP = 10.0


def _p_of_x(measure: KatoMeasure, x: float) -> float:
    val = sum(w / (x * x + s * s) for s, w in measure.atoms)
    if measure.ac_weight is not None:
        val += _ac_integral(measure.ac_weight, complex(x)).real
    return 2.0 / np.pi * val


def beta_sequence(measure: KatoMeasure):
    xs = 2.0 ** -np.arange(BETA_LEVELS)
    return xs, np.array([_p_of_x(measure, x) for x in xs])


def beta(measure: KatoMeasure) -> float:
    """``lim_{x->0} (2/pi) int dnu(t) / (x^2 + t^2)``.

    Evaluated on ``x_j = 2^-j`` (j = 0..40); once successive values differ by
    less than 1e-10 the last five are extrapolated to ``x = 0``.
    """
    if measure.empty:
        return 0.0
    xs, ps = beta_sequence(measure)
    if ps[-1] > BETA_BLOWUP:
        raise BetaDiverges(f"p(2^-40) = {ps[-1]:.6g} > {BETA_BLOWUP}")
    diffs = np.abs(np.diff(ps))
    for j in range(4, len(ps)):
        if diffs[j - 1] < BETA_DIFF_TOL:
            return _neville_at_zero(xs[j - 4:j + 1], ps[j - 4:j + 1])
    raise BetaDiverges("p(x) did not settle as x -> 0")


# --- canonical representation ------------------------------------------------

@dataclass(frozen=True)
class CanonicalKato:
    """``(zeros, measure, alpha)`` with cached ``kappa`` and ``beta``."""

    zeros: ZeroSet
    measure: KatoMeasure
    alpha: float
    kappa: float
    beta: float
    checked: bool = True

    def __post_init__(self):
        if not self.checked:
            return
        if self.alpha < 0:
            raise ValidationError(f"alpha = {self.alpha!r} must be >= 0")
        if abs(self.alpha + self.kappa + self.beta - 1.0) > BUDGET_TOL:
            raise BudgetExceeded(
                f"alpha + kappa + beta = {self.alpha + self.kappa + self.beta:.12g} != 1")
        if self.beta > 1.0 - self.kappa + KAPPA_TOL:
            raise BudgetExceeded(f"beta = {self.beta!r} exceeds 1 - kappa")

    @classmethod
    def unchecked(cls, zeros: ZeroSet, measure: KatoMeasure, alpha: float) -> "CanonicalKato":
        """Instance with a forced ``alpha``; the budget may be violated."""
        return cls(zeros, measure, float(alpha), kappa(zeros, check=False),
                   beta(measure), checked=False)


def build_canonical(zeros: ZeroSet, measure: KatoMeasure) -> CanonicalKato:
    """Complete ``(zeros, measure)`` to a Kato function with ``alpha = 1 - kappa - beta``."""
    k = kappa(zeros)
    b = beta(measure)
    if k + b > 1.0 + BUDGET_TOL:
        raise BudgetExceeded(f"kappa + beta = {k + b:.12g} > 1")
    alpha = min(max(1.0 - k - b, 0.0), 1.0)
    return CanonicalKato(zeros, measure, alpha, k, b)


# --- handles -----------------------------------------------------------------

class KatoFunction:
    """Common interface: ``f(z)`` for scalar or array ``z`` with ``Re z >= 0``."""

    variant = "abstract"

    def __call__(self, z):
        zz = _as_complex_array(z)
        return _restore_shape(self._eval(zz), z)

    def _eval(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def label(self) -> str:
        params = {k: v for k, v in self.to_json().items() if k != "variant"}
        if not params:
            return self.variant
        inner = ";".join(f"{k}={v}" for k, v in params.items() if not isinstance(v, (list, dict)))
        return f"{self.variant}({inner})" if inner else self.variant


def evaluate(f: KatoFunction, z):
    """Evaluate a Kato function handle."""
    return f(z)


@dataclass(frozen=True)
class Exp(KatoFunction):
    variant = "exp"

    def _eval(self, z):
        return np.exp(-z)

    def to_json(self):
        return {"variant": self.variant}


@dataclass(frozen=True)
class ResolventPower(KatoFunction):
    """``(1 + z/k)^-k``."""

    k: int = 1
    variant = "resolvent_power"

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValidationError(f"k must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))

    def _eval(self, z):
        return (1.0 + z / self.k) ** (-self.k)

    def to_json(self):
        return {"variant": self.variant, "k": self.k}


@dataclass(frozen=True)
class SinglePair(KatoFunction):
    """One conjugate zero pair ``xi = eta + i tau`` with ``4 Re xi / |xi|^2 = 1 - alpha``."""

    eta: float
    alpha: float = 0.0
    variant = "single_pair"

    def __post_init__(self):
        eta, alpha = float(self.eta), float(self.alpha)
        if not 0.0 <= alpha <= 1.0:
            raise ValidationError(f"alpha must lie in [0, 1], got {alpha!r}")
        if not eta > 0:
            raise ValidationError(f"eta must be > 0, got {eta!r}")
        if alpha < 1.0 and eta > 4.0 / (1.0 - alpha) * (1 + 1e-12):
            raise ValidationError(f"eta must be <= 4/(1-alpha) = {4.0 / (1.0 - alpha)!r}")

    @property
    def xi(self) -> complex | None:
        if self.alpha >= 1.0:
            return None
        c = 2.0 / (1.0 - self.alpha)
        tau = math.sqrt(max(c * c - (self.eta - c) ** 2, 0.0))
        return complex(self.eta, tau)

    @property
    def zeros(self) -> ZeroSet:
        return ZeroSet(()) if self.xi is None else ZeroSet(((self.xi, 1),))

    def _eval(self, z):
        return blaschke_D(self.zeros, z) * np.exp(-self.alpha * z)

    def to_json(self):
        return {"variant": self.variant, "eta": self.eta, "alpha": self.alpha}


@dataclass(frozen=True)
class AtomicExp(KatoFunction):
    """``exp(-z (1-alpha) s^2 / (z^2 + s^2)) exp(-alpha z)``: a single atom at ``s``."""

    s: float
    alpha: float = 0.0
    variant = "atomic_exp"

    def __post_init__(self):
        if not float(self.s) > 0:
            raise ValidationError(f"s must be > 0, got {self.s!r}")
        if not 0.0 <= float(self.alpha) <= 1.0:
            raise ValidationError(f"alpha must lie in [0, 1], got {self.alpha!r}")

    @property
    def atom_weight(self) -> float:
        return 0.5 * (1.0 - self.alpha) * math.pi * self.s ** 2

    def _eval(self, z):
        s = float(self.s)
        near = (np.abs(z - 1j * s) < POLE_RADIUS) | (np.abs(z + 1j * s) < POLE_RADIUS)
        if np.any(near):
            raise PoleAtBoundary(complex(z.ravel()[np.argmax(near.ravel())]))
        return np.exp(-z * (1.0 - self.alpha) * s * s / (z * z + s * s) - self.alpha * z)

    def to_json(self):
        return {"variant": self.variant, "s": self.s, "alpha": self.alpha}


@dataclass(frozen=True)
class Canonical(KatoFunction):
    """``D(z) exp(-E(z)) exp(-alpha z)`` built from a :class:`CanonicalKato`."""

    data: CanonicalKato
    variant = "canonical"

    def _eval(self, z):
        d = self.data
        out = blaschke_D(d.zeros, z)
        if not d.measure.empty:
            out = out * np.exp(-measure_exponent(d.measure, z))
        return out * np.exp(-d.alpha * z)

    def to_json(self):
        d = self.data
        obj = {
            "variant": self.variant,
            "zeros": [[xi.real, xi.imag, m] for xi, m in d.zeros.entries],
            "atoms": [[s, w] for s, w in d.measure.atoms],
        }
        if d.measure.ac_weight is not None:
            obj["ac_weight"] = d.measure.ac_weight.to_json()
        if not d.checked:
            obj["alpha"] = d.alpha
        return obj


def canonical_parts_from_json(obj: dict):
    try:
        zeros = ZeroSet(tuple((complex(re, im), int(m)) for re, im, m in obj.get("zeros", [])))
        atoms = tuple((float(s), float(w)) for s, w in obj.get("atoms", []))
    except (TypeError, ValueError) as exc:
        raise ConfigParse(f"malformed zeros/atoms: {exc}", "zeros/atoms") from exc
    weight = weight_from_json(obj["ac_weight"]) if obj.get("ac_weight") is not None else None
    return zeros, KatoMeasure(atoms, weight)


def kato_from_json(obj) -> KatoFunction:
    """Inverse of ``KatoFunction.to_json``.

    A canonical descriptor may carry an explicit ``alpha``; if it disagrees
    with ``1 - kappa - beta`` the handle is built unchecked so that
    :func:`check_kato_axioms` can report the broken budget.
    """
    if not isinstance(obj, dict) or "variant" not in obj:
        raise ConfigParse("Kato descriptor must be an object with a 'variant'", "variant")
    variant = obj["variant"]
    params = {k: v for k, v in obj.items() if k != "variant"}
    try:
        if variant == "exp":
            return Exp()
        if variant == "resolvent_power":
            return ResolventPower(int(params.get("k", 1)))
        if variant == "single_pair":
            return SinglePair(float(params["eta"]), float(params.get("alpha", 0.0)))
        if variant == "atomic_exp":
            return AtomicExp(float(params["s"]), float(params.get("alpha", 0.0)))
    except KeyError as exc:
        raise ConfigParse(f"missing parameter {exc}", variant) from None
    if variant == "canonical":
        zeros, measure = canonical_parts_from_json(obj)
        if "alpha" in obj:
            forced = float(obj["alpha"])
            k, b = kappa(zeros, check=False), beta(measure)
            if abs(forced + k + b - 1.0) > BUDGET_TOL:
                return Canonical(CanonicalKato.unchecked(zeros, measure, forced))
        return Canonical(build_canonical(zeros, measure))
    raise ConfigParse(f"unknown Kato variant {variant!r}", "variant")


# --- axioms ------------------------------------------------------------------

@dataclass
class AxiomResult:
    axiom: str
    passed: bool
    value: float
    witness: complex | float | None = None
    message: str = ""


@dataclass
class AxiomReport:
    function: str
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list:
        return [r for r in self.results if not r.passed]

    def __getitem__(self, axiom: str) -> AxiomResult:
        for r in self.results:
            if r.axiom == axiom:
                return r
        raise KeyError(axiom)

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, complex):
                return [v.real, v.imag]
            return v
        return {"function": self.function, "passed": self.passed,
                "results": [{"axiom": r.axiom, "passed": r.passed, "value": r.value,
                             "witness": enc(r.witness), "message": r.message}
                            for r in self.results]}


SLOPE_LEVELS = range(12, 17)


def origin_slope(f: KatoFunction) -> float:
    """Extrapolated ``lim_{x->0} (f(x) - 1) / x``."""
    xs = 2.0 ** -np.array(SLOPE_LEVELS, dtype=float)
    q = (np.real(f(xs)) - 1.0) / xs
    return _neville_at_zero(xs, q)


def check_kato_axioms(f: KatoFunction) -> AxiomReport:
    """Numerically check the Kato axioms.

    (a) ``f(2^-j) -> 1``; (b) slope at 0 equal to -1; (c) ``0 <= f <= 1`` on a
    log grid of [1e-4, 1e4]; (d) ``|f| <= 1`` on a 40 x 40 half-plane grid.
    Failures are report entries naming the axiom and a witness point.
    """
    results = []

    xs = 2.0 ** -np.arange(41, dtype=float)
    fx = f(xs)
    dev = np.abs(fx - 1.0)
    results.append(AxiomResult("a", bool(dev[-1] <= 1e-8), float(fx[-1].real), float(xs[-1]),
                               "f(x) -> 1 as x -> 0"))

    slope = origin_slope(f)
    results.append(AxiomResult("b", abs(slope + 1.0) <= 1e-6, slope, 0.0,
                               "f'(0) = -1"))

    grid = np.logspace(-4, 4, 200)
    vals = f(grid)
    lo = np.minimum(vals.real, 0.0)
    hi = np.maximum(vals.real - 1.0, 0.0)
    im = np.abs(vals.imag)
    worst = np.maximum.reduce([-lo, hi, im])
    j = int(np.argmax(worst))
    ok_c = bool(np.all(vals.real >= -1e-12) and np.all(vals.real <= 1 + 1e-12)
                and np.all(im <= 1e-12))
    results.append(AxiomResult("c", ok_c, float(vals[j].real), float(grid[j]),
                               "0 <= f(x) <= 1 on the positive axis"))

    re = np.linspace(1e-3, 10.0, 40)
    imag = np.linspace(-10.0, 10.0, 40)
    zz = re[:, None] + 1j * imag[None, :]
    mod = np.abs(f(zz))
    j = np.unravel_index(int(np.argmax(mod)), mod.shape)
    results.append(AxiomResult("d", bool(mod.max() <= 1 + 1e-10), float(mod.max()),
                               complex(zz[j]), "|f(z)| <= 1 on the right half-plane"))
    return AxiomReport(f.label(), results)


# --- boundary diagnostics ----------------------------------------------------

@dataclass
class RegularityDiagnostic:
    y: float
    probe_ts: np.ndarray
    ratios: np.ndarray
    verdict: str
    accumulation: bool
    min_distance: float


def tau_mass(zeros: ZeroSet, y: float, t: float) -> float:
    """Sum of ``Re xi`` over zeros of ``f`` within distance ``t`` of ``iy``."""
    pts, mults = zeros.zeros_of_f()
    if pts.size == 0:
        return 0.0
    inside = np.abs(1j * y - pts) <= t
    return float(np.sum(mults[inside] * pts[inside].real))


def boundary_regularity(zeros: ZeroSet, y: float, probe_ts: Sequence[float]) -> RegularityDiagnostic:
    """Trend of ``tau(iy, t) / t`` as ``t`` decreases along ``probe_ts``.

    Verdicts: ``VanishingRatio`` when the ratio reaches 0 (or drops by six
    orders of magnitude while nonincreasing), ``NonVanishing`` when the tail
    stays within a factor two of its maximum, ``Inconclusive`` otherwise.
    """
    ts = np.asarray(probe_ts, dtype=float)
    if ts.ndim != 1 or ts.size == 0 or np.any(~np.isfinite(ts)) or np.any(ts <= 0):
        raise ValidationError("probe_ts must be finite positive reals")
    if np.any(np.diff(ts) >= 0):
        raise ValidationError("probe_ts must be strictly decreasing")
    ratios = np.array([tau_mass(zeros, y, t) / t for t in ts])
    pts, _ = zeros.zeros_of_f()
    dist = float(np.min(np.abs(1j * y - pts))) if pts.size else math.inf
    accumulation = dist < ts[-1]

    tail = ratios[len(ratios) // 2:]
    peak = float(np.max(ratios))
    if ratios[-1] == 0.0:
        verdict = "VanishingRatio"
    elif np.all(np.diff(tail) <= 0) and ratios[-1] <= 1e-6 * peak:
        verdict = "VanishingRatio"
    elif tail.min() >= 0.5 * tail.max():
        verdict = "NonVanishing"
    else:
        verdict = "Inconclusive"
    return RegularityDiagnostic(float(y), ts, ratios, verdict, bool(accumulation), dist)
