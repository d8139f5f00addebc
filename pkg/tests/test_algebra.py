import numpy as np
import pytest
from hypothesis import given, strategies as st

from qgaudin import algebra, spin
from qgaudin.algebra import Realization
from qgaudin.couplings import CouplingFamily
from qgaudin.errors import PoleError, UnsupportedFamilyError
from qgaudin.magnet import build_magnets
from qgaudin.spin import MINUS, PLUS, ZERO

# mpmath reference: -(coth(1) + 1) / 2
W_COTH_REF = -1.156517642749665651818


def realizations(system):
    return [Realization.rational(system), Realization.coth(system, 0.8), Realization.tanh(system, 0.8)]


def off_axis(rng):
    return complex(rng.uniform(-2, 2), rng.choice([-1, 1]) * rng.uniform(0.2, 0.9))


def test_single_site_rational_generator():
    real = Realization.rational(spin.SpinSystem((0.5,), (0.0,)))
    t0 = spin.single_spin_generators(0.5)[0]
    np.testing.assert_allclose(algebra.generator(real, ZERO, 1j), 1j * t0, atol=1e-15)


def test_pole_hit():
    real = Realization.rational(spin.SpinSystem((0.5, 0.5), (0.0, 1.0)))
    with pytest.raises(PoleError):
        algebra.generator(real, PLUS, 1.0)


@pytest.mark.parametrize("kind", ["rational", "coth", "tanh"])
def test_six_relations(kind, half3, rng):
    real = {"rational": Realization.rational, "coth": lambda s: Realization.coth(s, 0.8),
            "tanh": lambda s: Realization.tanh(s, 0.8)}[kind](half3)
    for _ in range(5):
        lam, mu = off_axis(rng), off_axis(rng)
        res = algebra.algebra_residuals(real, lam, mu)
        assert len(res) == 6
        assert max(res.values()) < 1e-10 * half3.dim, res


@pytest.mark.parametrize("make", [Realization.rational, lambda s: Realization.coth(s, 0.5), lambda s: Realization.tanh(s, 0.5)])
def test_coincident_points_use_derivative_limit(make, mixed3):
    real = make(mixed3)
    lam = 0.3 + 0.4j
    res = algebra.algebra_residuals(real, lam, lam)
    assert max(res.values()) < 1e-10 * mixed3.dim
    # and the limit agrees with nearby distinct points
    near = algebra.algebra_residuals(real, lam, lam + 1e-7)
    assert max(near.values()) < 1e-6


def test_wrong_kernel_breaks_relation(half3):
    # negative control: feeding coth generators through the rational relations
    real = Realization.coth(half3, 0.8)
    rat_like = Realization.rational(half3)
    lam, mu = 0.2 + 0.5j, -0.7 + 0.3j
    a = algebra.generators(real, lam)
    b = algebra.generators(real, mu)
    lhs = a[PLUS] @ b[MINUS] - b[MINUS] @ a[PLUS]
    rhs = 2 * rat_like.structure_kernel(lam - mu) * (a[ZERO] - b[ZERO])
    assert np.linalg.norm(lhs - rhs) > 1e-3


@pytest.mark.parametrize("make", [Realization.rational, lambda s: Realization.coth(s, 0.7), lambda s: Realization.tanh(s, 0.7)])
def test_adjoint_relation(make, mixed3):
    real = make(mixed3)
    for lam in (0.3 + 0.5j, -1.2 - 0.2j):
        jp = algebra.generator(real, PLUS, lam)
        jm = algebra.generator(real, MINUS, np.conj(lam))
        assert np.linalg.norm(jp.conj().T - jm) < 1e-12


def test_rational_weight_function_values():
    real = Realization.rational(spin.SpinSystem((0.5, 0.5), (0.0, 1.0)))
    assert abs(algebra.weight_function(real, 0.5)) < 1e-15
    assert abs(algebra.weight_function(real, 0.3)) == pytest.approx(0.5 / 0.3 - 0.5 / 0.7, rel=1e-14)


def test_coth_weight_function_value():
    real = Realization.coth(spin.SpinSystem((0.5,), (0.0,)), 1.0)
    assert abs(algebra.weight_function(real, -1.0) - W_COTH_REF) < 1e-13


@pytest.mark.parametrize("make", [Realization.rational, lambda s: Realization.coth(s, 0.9), lambda s: Realization.tanh(s, 0.9)])
def test_lowest_weight(make, mixed3):
    real = make(mixed3)
    for lam in (0.25 + 0.3j, -1.5 + 0.7j):
        checks = algebra.lowest_weight_check(real, lam)
        assert max(checks.values()) < 1e-10


@pytest.mark.parametrize("make", [Realization.rational, lambda s: Realization.coth(s, 0.9), lambda s: Realization.tanh(s, 0.9)])
def test_weight_derivative_matches_finite_difference(make, mixed3):
    real = make(mixed3)
    lam, h = 0.25 + 0.3j, 1e-5
    fd = (algebra.weight_function(real, lam + h) - algebra.weight_function(real, lam - h)) / (2 * h)
    assert abs(fd - algebra.weight_function_derivative(real, lam)) < 1e-6
    gfd = (algebra.generator(real, PLUS, lam + h) - algebra.generator(real, PLUS, lam - h)) / (2 * h)
    assert np.linalg.norm(gfd - algebra.generator_derivative(real, PLUS, lam)) < 1e-6


@pytest.mark.parametrize("make", [Realization.rational, lambda s: Realization.coth(s, 0.6), lambda s: Realization.tanh(s, 0.6)])
def test_spectral_family_commutes(make, mixed3, rng):
    real = make(mixed3)
    for _ in range(5):
        a = algebra.spectral_operator(real, off_axis(rng))
        b = algebra.spectral_operator(real, off_axis(rng))
        assert np.linalg.norm(a @ b - b @ a) < 1e-10 * mixed3.dim


def test_spectral_operator_pair_form(mixed3):
    for real in realizations(mixed3):
        lam = 0.1 + 0.6j
        diff = algebra.spectral_operator(real, lam) - algebra.spectral_operator_pairs(real, lam)
        assert np.linalg.norm(diff) < 1e-11 * mixed3.dim


def test_rational_residue_is_magnet(mixed3):
    real = Realization.rational(mixed3)
    mags = build_magnets(mixed3, CouplingFamily.rational())
    for i in range(3):
        assert np.linalg.norm(algebra.residue_at(real, i) - mags.hamiltonians[i]) < 1e-11


def test_coth_residue_is_shifted_magnet(mixed3):
    q = 0.6
    real = Realization.coth(mixed3, q)
    mags = build_magnets(mixed3, CouplingFamily.q_deformed(q))
    for i, s in enumerate(mixed3.spins):
        target = mags.hamiltonians[i] - q * s * (s + 1) * np.eye(mixed3.dim)
        assert np.linalg.norm(algebra.residue_at(real, i) - target) < 1e-11


@pytest.mark.parametrize("make", [Realization.rational, lambda s: Realization.coth(s, 0.6)])
def test_residue_against_contour_integral(make, half3):
    # independent oracle: (1/2 pi i) contour integral of H(λ) around u_i
    real = make(half3)
    i = 1
    u = half3.u[i]
    radius, m = 0.2, 256
    theta = 2 * np.pi * np.arange(m) / m
    acc = np.zeros((half3.dim, half3.dim), dtype=complex)
    for t in theta:
        z = u + radius * np.exp(1j * t)
        acc += algebra.spectral_operator(real, z) * radius * np.exp(1j * t)
    contour = acc / m
    assert np.linalg.norm(contour - algebra.residue(real, i)) < 1e-10
    np.testing.assert_allclose(algebra.residue(real, i), 2 * algebra.residue_at(real, i))


def test_tanh_has_no_residue(half3):
    with pytest.raises(UnsupportedFamilyError):
        algebra.residue_at(Realization.tanh(half3, 0.5), 0)


def test_q_limits_of_realizations(mixed3):
    lam = 0.4 + 0.5j
    rat = algebra.generators(Realization.rational(mixed3), lam)
    qs = [1e-2, 1e-3, 1e-4]
    coth_err, tanh_norm = [], []
    for q in qs:
        c = algebra.generators(Realization.coth(mixed3, q), lam)
        t = algebra.generators(Realization.tanh(mixed3, q), lam)
        coth_err.append(max(np.linalg.norm(c[k] - rat[k]) for k in rat))
        tanh_norm.append(max(np.linalg.norm(t[k]) for k in t))
    for errs in (coth_err, tanh_norm):
        slope = np.polyfit(np.log10(qs), np.log10(errs), 1)[0]
        assert slope == pytest.approx(1.0, abs=0.05)


def test_for_family_mapping(half3):
    assert Realization.for_family(half3, CouplingFamily.rational()).kind.value == "rational"
    real = Realization.for_family(half3, CouplingFamily.q_deformed(0.3))
    assert real.kind.value == "coth" and real.q == 0.3
    assert real.magnet_family() == CouplingFamily.q_deformed(0.3)


@given(st.floats(0.05, 2.0), st.floats(-2.0, 2.0), st.floats(0.1, 1.0))
def test_structure_kernel_q_relation(q, re, im):
    # coth kernel minus q is the Bethe kernel, and both are odd up to the shift
    real = Realization.coth(spin.SpinSystem((0.5,), (0.0,)), q)
    x = complex(re, im)
    assert real.bethe_kernel(x) == pytest.approx(real.structure_kernel(x) - q, abs=1e-12)
    assert real.bethe_kernel(x) + real.bethe_kernel(-x) == pytest.approx(-2 * q, abs=1e-10)
