import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trotter_kato import kato
from trotter_kato.errors import (
    BetaDiverges,
    BoundaryACUnsupported,
    BudgetExceeded,
    ConfigParse,
    KappaExceedsOne,
    PoleAtBoundary,
    ValidationError,
)
from trotter_kato.kato import (
    ACWeight,
    AtomicExp,
    Canonical,
    CanonicalKato,
    Exp,
    KatoMeasure,
    ResolventPower,
    SinglePair,
    ZeroSet,
    beta,
    blaschke_D,
    boundary_regularity,
    build_canonical,
    check_kato_axioms,
    kappa,
    kato_from_json,
    log_resolvent_weight,
    measure_exponent,
    tau_mass,
)

EMPTY = KatoMeasure()
BUILTINS = [Exp(), ResolventPower(1), ResolventPower(3), SinglePair(1.0, 0.2),
            SinglePair(0.05), AtomicExp(1.0, 0.3), AtomicExp(0.05)]
HALF_PLANE = (np.linspace(1e-3, 10, 15)[:, None] + 1j * np.linspace(-10, 10, 17)[None, :]).ravel()


def resolvent_canonical(k):
    return Canonical(build_canonical(ZeroSet(), KatoMeasure((), log_resolvent_weight(k))))


# --- kappa / D ---------------------------------------------------------------

def test_kappa_examples():
    assert kappa(ZeroSet()) == 0.0
    assert kappa(SinglePair(1.0, 0.3).zeros) == pytest.approx(0.7, abs=1e-14)
    with pytest.raises(KappaExceedsOne):
        kappa(ZeroSet(((2.0, 1),)))
    assert kappa(ZeroSet(((2.0, 1),)), check=False) == pytest.approx(2.0)


def test_zeroset_validation():
    with pytest.raises(ValidationError):
        ZeroSet(((-1 + 1j, 1),))
    with pytest.raises(ValidationError):
        ZeroSet(((1 + 1j, 0),))
    assert ZeroSet(((1 - 2j, 1),)).xi[0] == 1 + 2j
    pts, mults = ZeroSet(((3 + 1j, 1), (4.0, 2))).zeros_of_f()
    assert sorted(pts.tolist(), key=lambda c: (c.real, c.imag)) == [3 - 1j, 3 + 1j, 4]
    assert sorted(mults.tolist()) == [1, 1, 4]


def test_blaschke_examples():
    assert blaschke_D(ZeroSet(), 0.7 + 3j) == 1.0
    zs = ZeroSet(((1 + 1j, 1),))
    assert blaschke_D(zs, 1.0) == pytest.approx(0.2)
    assert abs(blaschke_D(zs, 1 + 1j)) < 1e-15
    assert abs(blaschke_D(zs, 1 - 1j)) < 1e-15
    assert np.all(np.abs(blaschke_D(zs, HALF_PLANE)) <= 1 + 1e-12)
    np.testing.assert_allclose(np.abs(blaschke_D(zs, 1j * np.linspace(-5, 5, 11))), 1.0)


# --- measure / beta ----------------------------------------------------------

def test_measure_exponent_examples():
    assert measure_exponent(EMPTY, 1.3 + 2j) == 0
    s, alpha = 2.0, 0.25
    c = 0.5 * (1 - alpha) * math.pi * s * s
    m = KatoMeasure(((s, c),))
    x = 0.7
    assert measure_exponent(m, x) == pytest.approx(2 * x / math.pi * c / (x * x + s * s))
    small = 1e-7
    assert measure_exponent(m, small).real / small == pytest.approx(1 - alpha, rel=1e-10)
    lr = KatoMeasure((), log_resolvent_weight(1.0))
    assert measure_exponent(lr, 1e-6).real / 1e-6 == pytest.approx(1.0, abs=1e-5)


@pytest.mark.parametrize("z", [0.01, 0.5 + 0.5j, 3 - 7j, 0.02 + 4j, 200.0])
def test_ac_exponent_matches_mpmath(z):
    k = 2.0
    m = KatoMeasure((), log_resolvent_weight(k))
    mpmath.mp.dps = 30
    zz = mpmath.mpc(z)
    integral = mpmath.quad(lambda t: (k / 2) * mpmath.log(1 + t * t / k ** 2) / (zz * zz + t * t),
                           [0, abs(z.imag) if isinstance(z, complex) else 1, mpmath.inf])
    expected = complex(2 * zz / mpmath.pi * integral)
    got = measure_exponent(m, z)
    assert abs(got - expected) <= 1e-10 * max(1.0, abs(expected))


def test_boundary_poles_and_refusal():
    m = KatoMeasure(((2.0, 1.0),))
    with pytest.raises(PoleAtBoundary):
        measure_exponent(m, 2j)
    with pytest.raises(PoleAtBoundary):
        measure_exponent(m, -2j)
    bare = ACWeight("flat_bump", (), lambda t: np.exp(-np.asarray(t) ** 2))
    with pytest.raises(BoundaryACUnsupported):
        measure_exponent(KatoMeasure((), bare), 1j)
    assert np.isfinite(measure_exponent(KatoMeasure((), bare), 0.1 + 1j))


def test_measure_validation():
    with pytest.raises(ValidationError):
        KatoMeasure(((0.0, 1.0),))
    with pytest.raises(ValidationError):
        KatoMeasure(((1.0, -1.0),))
    with pytest.raises(ValidationError):
        KatoMeasure(((1.0, 1e15),))


def test_beta_examples():
    assert beta(EMPTY) == 0.0
    for s, alpha in [(1.0, 0.0), (0.3, 0.6), (5.0, 0.9)]:
        c = AtomicExp(s, alpha).atom_weight
        assert beta(KatoMeasure(((s, c),))) == pytest.approx(1 - alpha, abs=1e-12)
    for k in (1, 3):
        assert abs(beta(KatoMeasure((), log_resolvent_weight(k))) - 1.0) <= 1e-6


def test_beta_diverges():
    with pytest.raises(BetaDiverges):
        beta(KatoMeasure(((0.1, 1.0),)))
    flat = ACWeight("flat", (), lambda t: np.ones_like(np.asarray(t, dtype=float)) * 1e-3)
    with pytest.raises(BetaDiverges):
        beta(KatoMeasure((), flat))


# --- canonical ---------------------------------------------------------------

def test_build_canonical_examples():
    exp_like = build_canonical(ZeroSet(), EMPTY)
    assert (exp_like.alpha, exp_like.kappa, exp_like.beta) == (1.0, 0.0, 0.0)
    f = Canonical(exp_like)
    np.testing.assert_allclose(f(HALF_PLANE), np.exp(-HALF_PLANE), rtol=1e-14)

    lr = build_canonical(ZeroSet(), KatoMeasure((), log_resolvent_weight(1)))
    assert lr.kappa == 0.0
    assert lr.beta == pytest.approx(1.0, abs=1e-6)
    assert lr.alpha == pytest.approx(0.0, abs=1e-6)

    sp = build_canonical(SinglePair(2.0).zeros, EMPTY)
    assert sp.alpha == pytest.approx(0.0, abs=1e-12)


def test_budget_exceeded():
    zs = SinglePair(2.0, 0.5).zeros  # kappa = 0.5
    atoms = ((1.0, AtomicExp(1.0, 0.2).atom_weight),)  # beta = 0.8
    with pytest.raises(BudgetExceeded):
        build_canonical(zs, KatoMeasure(atoms))
    with pytest.raises(BudgetExceeded):
        CanonicalKato(ZeroSet(), EMPTY, 0.5, 0.0, 0.0)


@pytest.mark.parametrize("k", [1, 3])
def test_representation_round_trip(k):
    f = resolvent_canonical(k)
    x = np.logspace(-2, 2, 40)
    rel = np.abs(f(x) - (1 + x / k) ** (-k)) / (1 + x / k) ** (-k)
    assert rel.max() <= 1e-5
    z = np.array([0.3 + 2j, 5 - 1j, 1e-3 + 40j])
    np.testing.assert_allclose(f(z), (1 + z / k) ** (-k), rtol=1e-8)


def test_canonical_boundary_uses_closed_form():
    f = resolvent_canonical(2)
    y = np.linspace(-6, 6, 13)
    np.testing.assert_allclose(f(1j * y), (1 + 1j * y / 2) ** -2, atol=1e-10)


def test_atomic_exp_equals_canonical_atom():
    for s, alpha in [(1.0, 0.3), (0.4, 0.0)]:
        f = AtomicExp(s, alpha)
        g = Canonical(build_canonical(ZeroSet(), KatoMeasure(((s, f.atom_weight),))))
        assert g.data.alpha == pytest.approx(alpha, abs=1e-10)
        np.testing.assert_allclose(g(HALF_PLANE), f(HALF_PLANE), rtol=1e-9, atol=1e-12)


def test_zero_placement():
    zs = ZeroSet(((0.5 + 3j, 1), (8.0, 1)))
    f = Canonical(build_canonical(zs, KatoMeasure(((1.0, 0.1),))))
    for xi in (0.5 + 3j, 0.5 - 3j, 8.0):
        assert abs(f(xi)) <= 1e-8


# --- closed forms ------------------------------------------------------------

def test_eval_examples():
    assert Exp()(1.0) == pytest.approx(math.exp(-1))
    for k in (1, 2, 5):
        t = np.linspace(-20, 20, 41)
        val = ResolventPower(k)(1j * t)
        np.testing.assert_allclose(val, (1 + 1j * t / k) ** (-k), rtol=1e-14)
        np.testing.assert_allclose(np.abs(val), (1 + t * t / k ** 2) ** (-k / 2), rtol=1e-12)


def test_atomic_boundary_modulus():
    f = AtomicExp(1.5, 0.2)
    y = np.linspace(-10, 10, 401)
    y = y[np.abs(np.abs(y) - 1.5) > 1e-6]
    assert np.max(np.abs(np.abs(f(1j * y)) - 1)) <= 1e-12
    with pytest.raises(PoleAtBoundary):
        f(1.5j)


def test_single_pair_parameters():
    for eta, alpha in [(1.0, 0.2), (5.0, 0.2), (0.05, 0.0), (4.0, 0.0)]:
        f = SinglePair(eta, alpha)
        xi = f.xi
        assert abs(xi) ** 2 == pytest.approx(4 * eta / (1 - alpha))
        assert alpha + kappa(f.zeros) == pytest.approx(1.0, abs=1e-12)
        assert abs(f(xi)) < 1e-12
    assert SinglePair(1.0, 1.0).xi is None
    with pytest.raises(ValidationError):
        SinglePair(5.0, 0.0)


def test_evaluation_off_half_plane_rejected():
    with pytest.raises(ValidationError):
        Exp()(-1.0)


# --- axioms ------------------------------------------------------------------

@pytest.mark.parametrize("f", BUILTINS + [resolvent_canonical(3)], ids=lambda f: f.label())
def test_builtins_pass_axioms(f):
    report = check_kato_axioms(f)
    assert report.passed, report.to_json()


def test_budget_broken_canonical_fails_slope():
    data = CanonicalKato.unchecked(ZeroSet(), EMPTY, 0.5)
    report = check_kato_axioms(Canonical(data))
    assert not report.passed
    assert [r.axiom for r in report.failures] == ["b"]
    assert report["b"].value == pytest.approx(-0.5, abs=1e-6)


def test_non_contraction_fails_half_plane_axiom():
    class Bad(kato.KatoFunction):
        variant = "bad"

        def _eval(self, z):
            return np.exp(-z) * (1 + 0.5 * np.sin(z.imag) ** 2)

        def to_json(self):
            return {"variant": self.variant}

    report = check_kato_axioms(Bad())
    assert [r.axiom for r in report.failures] == ["d"]
    assert report["d"].witness is not None


# --- properties --------------------------------------------------------------

pair_params = st.tuples(st.floats(0.0, 0.99), st.floats(0.01, 1.0)).map(
    lambda p: SinglePair(p[1] * 4 / (1 - p[0]), p[0]))
atomic_params = st.builds(AtomicExp, st.floats(0.01, 50), st.floats(0.0, 1.0))
handles = st.one_of(st.just(Exp()), st.integers(1, 8).map(ResolventPower), pair_params, atomic_params)


@settings(max_examples=40, deadline=None)
@given(handles)
def test_half_plane_contraction_and_symmetry(f):
    vals = f(HALF_PLANE)
    assert np.all(np.abs(vals) <= 1 + 1e-10)
    np.testing.assert_allclose(f(HALF_PLANE.conj()), vals.conj(), atol=1e-10)
    x = np.concatenate([[0.0], np.logspace(-4, 4, 50)])
    assert np.all(np.abs(f(x).imag) <= 1e-12)


@st.composite
def canonical_inputs(draw):
    n = draw(st.integers(0, 2))
    share = draw(st.floats(0.05, 0.9))
    entries = []
    for _ in range(n):
        xi = complex(draw(st.floats(0.2, 5)), draw(st.floats(0, 5)))
        entries.append((xi, 1))
    zs = ZeroSet(tuple(entries))
    if kappa(zs, check=False) > share:
        # kappa scales like 1/|xi|: push the zeros out until it fits
        scale = kappa(zs, check=False) / share
        zs = ZeroSet(tuple((xi * scale, 1) for xi, _ in entries))
    atoms = ()
    if draw(st.booleans()):
        s = draw(st.floats(0.1, 5))
        left = 1 - kappa(zs)
        atoms = ((s, draw(st.floats(0.01, 1.0)) * left * math.pi * s * s / 2),)
    return zs, KatoMeasure(atoms)


@settings(max_examples=15, deadline=None)
@given(canonical_inputs())
def test_budget_identity(inputs):
    data = build_canonical(*inputs)
    assert abs(data.alpha + data.kappa + data.beta - 1) <= 1e-8
    f = Canonical(data)
    assert np.all(np.abs(f(HALF_PLANE)) <= 1 + 1e-10)


# --- serialisation -----------------------------------------------------------

@pytest.mark.parametrize("f", BUILTINS + [resolvent_canonical(2)], ids=lambda f: f.label())
def test_json_round_trip(f):
    g = kato_from_json(f.to_json())
    assert g.to_json() == f.to_json()
    np.testing.assert_allclose(g(HALF_PLANE[:10]), f(HALF_PLANE[:10]))


def test_json_errors():
    with pytest.raises(ConfigParse):
        kato_from_json({"variant": "nope"})
    with pytest.raises(ConfigParse):
        kato_from_json({"variant": "single_pair"})
    with pytest.raises(ConfigParse):
        kato_from_json({"variant": "canonical", "ac_weight": {"id": "unknown"}})


def test_forced_alpha_builds_unchecked_handle():
    f = kato_from_json({"variant": "canonical", "alpha": 0.5})
    assert not f.data.checked
    assert f.to_json()["alpha"] == 0.5
    consistent = kato_from_json({"variant": "canonical", "alpha": 1.0})
    assert consistent.data.checked


# --- boundary regularity -----------------------------------------------------

PROBES = 2.0 ** -np.arange(1, 31)


def test_regularity_finite_and_empty():
    d = boundary_regularity(ZeroSet(), 1.0, PROBES)
    assert d.verdict == "VanishingRatio" and not d.accumulation
    assert np.all(d.ratios == 0)
    d = boundary_regularity(ZeroSet(((0.5 + 1j, 1), (1.0, 1))), 1.0, PROBES)
    assert d.verdict == "VanishingRatio" and not d.accumulation


def test_regularity_accumulating_sequence():
    y = 3.0
    zs = ZeroSet(tuple((2.0 ** -k + 1j * y, 1) for k in range(1, 41)))
    d = boundary_regularity(zs, y, PROBES)
    for t, r in zip(PROBES, d.ratios):
        direct = sum(2.0 ** -k for k in range(1, 41) if 2.0 ** -k <= t) / t
        assert r == pytest.approx(direct, rel=1e-12)
        assert r >= 0.5
    assert d.verdict == "NonVanishing"
    assert d.accumulation


def test_tau_mass_counts_conjugates():
    zs = ZeroSet(((0.1 + 0.0j, 1),))
    assert tau_mass(zs, 0.0, 0.2) == pytest.approx(0.2)
    assert tau_mass(ZeroSet(((0.1 + 1j, 1),)), -1.0, 0.2) == pytest.approx(0.1)


def test_regularity_validation():
    with pytest.raises(ValidationError):
        boundary_regularity(ZeroSet(), 0.0, [0.1, 0.2])
    with pytest.raises(ValidationError):
        boundary_regularity(ZeroSet(), 0.0, [0.1, -0.2])
