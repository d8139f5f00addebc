import numpy as np
import pytest
from hypothesis import given, strategies as st

from qgaudin import algebra, spin
from qgaudin.algebra import Realization
from qgaudin.bethe import (
    off_shell_decomposition,
    bethe_eigenvalue,
    bethe_equations,
    bethe_jacobian,
    bethe_residual,
    bethe_vector,
    compare_with_oracle,
    magnet_eigenvalues_from_roots,
    newton,
    sector_coverage,
    solve_bethe,
)
from qgaudin.couplings import CouplingFamily
from qgaudin.errors import DegenerateStateError, PoleError, UnsupportedFamilyError
from qgaudin.magnet import build_magnets, simultaneous_spectrum

# mpmath reference: -(coth(1) + 1) / 4
E10_COTH_REF = -0.578258821374832825909

PAIR = spin.SpinSystem((0.5, 0.5), (0.0, 1.0))
TRIPLE = spin.SpinSystem((0.5, 0.5, 0.5), (0.0, 1.1, -0.6))


def joint_for(real):
    return simultaneous_spectrum(build_magnets(real.system, real.magnet_family()), include_total_sz=True)


def test_residual_examples():
    real = Realization.rational(PAIR)
    assert bethe_residual(real, [0.5]) < 1e-15
    assert bethe_residual(real, [0.3]) == pytest.approx(0.5 / 0.3 - 0.5 / 0.7, rel=1e-13)
    assert bethe_residual(real, []) == 0.0


def test_coincident_roots_rejected():
    with pytest.raises(PoleError):
        bethe_residual(Realization.rational(TRIPLE), [0.3, 0.3])
    with pytest.raises(PoleError):
        bethe_residual(Realization.rational(TRIPLE), [1.1])


def test_jacobian_matches_finite_difference():
    real = Realization.coth(TRIPLE, 0.5)
    x = np.array([0.2 + 0.3j, -0.9 + 0.1j])
    h = 1e-6
    fd = np.stack(
        [(bethe_equations(real, x + h * e) - bethe_equations(real, x - h * e)) / (2 * h) for e in np.eye(2)], axis=1
    )
    np.testing.assert_allclose(bethe_jacobian(real, x), fd, atol=1e-6)


def test_rational_pair_root():
    res = solve_bethe(Realization.rational(PAIR), 1)
    assert len(res) == 1
    assert abs(res[0].roots[0] - 0.5) < 1e-10
    assert res[0].residual < 1e-10


@given(st.floats(0.5, 2.0), st.floats(0.5, 2.0), st.floats(-2, 2), st.floats(0.2, 3))
def test_rational_pair_root_closed_form(k1, k2, u1, gap):
    s1, s2 = k1 // 0.5 * 0.5, k2 // 0.5 * 0.5
    real = Realization.rational(spin.SpinSystem((s1, s2), (u1, u1 + gap)))
    xi, res, _ = newton(real, [u1 + 0.4 * gap + 0.01j])
    assert res < 1e-12
    assert abs(xi[0] - (s1 * (u1 + gap) + s2 * u1) / (s1 + s2)) < 1e-10


def test_singlet_vector():
    real = Realization.rational(PAIR)
    v = bethe_vector(real, [0.5])
    v = v / np.linalg.norm(v)
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    assert abs(abs(np.vdot(singlet, v)) - 1) < 1e-12


def test_empty_roots_give_vacuum():
    np.testing.assert_array_equal(bethe_vector(Realization.rational(TRIPLE), []), spin.lowest_weight_vector(TRIPLE))


def test_vector_is_order_independent():
    real = Realization.coth(TRIPLE, 0.5)
    a = bethe_vector(real, [0.2 + 0.1j, -0.4 + 0.3j])
    b = bethe_vector(real, [-0.4 + 0.3j, 0.2 + 0.1j])
    assert np.linalg.norm(a - b) < 1e-10 * np.linalg.norm(a)


def test_degenerate_vector_flagged():
    # f1(a) f2(b) + f2(a) f1(b) vanishes when 2ab = a + b
    real = Realization.rational(PAIR)
    with pytest.raises(DegenerateStateError):
        bethe_vector(real, [2.0, 2.0 / 3.0])


def test_magnet_eigenvalue_examples():
    real = Realization.rational(PAIR)
    assert magnet_eigenvalues_from_roots(real, [])[0] == pytest.approx(-0.25, abs=1e-15)
    assert magnet_eigenvalues_from_roots(real, [0.5])[0] == pytest.approx(0.75, abs=1e-14)
    real_q = Realization.coth(PAIR, 1.0)
    assert magnet_eigenvalues_from_roots(real_q, [])[0] == pytest.approx(E10_COTH_REF, abs=1e-13)
    with pytest.raises(UnsupportedFamilyError):
        magnet_eigenvalues_from_roots(Realization.tanh(PAIR, 1.0), [])


@pytest.mark.parametrize("make", [Realization.rational, lambda s: Realization.coth(s, 0.5), lambda s: Realization.tanh(s, 0.5)])
def test_vacuum_energy(make):
    real = make(TRIPLE)
    lam = 0.35 + 0.45j
    assert bethe_eigenvalue(real, lam, []) == algebra.lowest_weight_energy(real, lam)


@pytest.mark.parametrize("make", [Realization.rational, lambda s: Realization.coth(s, 0.5), lambda s: Realization.tanh(s, 0.5)])
def test_bethe_states_are_eigenvectors_of_h_lambda(make):
    real = make(TRIPLE)
    res = solve_bethe(real, 1)
    assert len(res) >= 1
    for state in res:
        v = bethe_vector(real, state.roots)
        for lam in (0.35 + 0.45j, -1.3 + 0.2j):
            e = bethe_eigenvalue(real, lam, state.roots)
            h = algebra.spectral_operator(real, lam)
            assert np.linalg.norm(h @ v - e * v) < 1e-8 * np.linalg.norm(v)


@pytest.mark.parametrize("make", [Realization.rational, lambda s: Realization.coth(s, 0.5)])
def test_oracle_equivalence_n1(make):
    real = make(TRIPLE)
    joint = joint_for(real)
    res = solve_bethe(real, 1)
    for state in res:
        m = compare_with_oracle(real, state.roots, joint)
        assert m.matched
        assert m.max_energy_error < 1e-7
        assert m.overlap > 1 - 1e-6
    cov = sector_coverage(real, res.states, joint)
    assert cov["sector_rows"] == 3 and cov["matched_rows"] == 2


def test_bethe_vector_in_sector():
    real = Realization.coth(TRIPLE, 0.5)
    for state in solve_bethe(real, 1):
        v = bethe_vector(real, state.roots)
        t = spin.total_sz(TRIPLE)
        assert np.linalg.norm(t @ v - (-1.5 + 1) * v) < 1e-12 * np.linalg.norm(v)


def test_solver_is_deterministic_and_deduplicated():
    real = Realization.coth(TRIPLE, 0.5)
    a = solve_bethe(real, 1, seed=7)
    b = solve_bethe(real, 1, seed=7)
    assert [s.roots for s in a] == [s.roots for s in b]
    roots = [s.roots[0] for s in a]
    assert all(abs(x - y) > 1e-6 for i, x in enumerate(roots) for y in roots[i + 1:])


@pytest.mark.parametrize("make", [Realization.rational, lambda s: Realization.coth(s, 0.5)])
def test_no_finite_two_root_states_for_spin_half(make):
    # the magnets are SU(2) invariant, so finite-root states are lowest weight
    # vectors and need n <= sum(s); the solver must not report spurious ones
    for sysm in (PAIR, TRIPLE):
        res = solve_bethe(make(sysm), 2)
        assert len(res) == 0
        assert res.n_starts > 0


@pytest.mark.parametrize("make", [Realization.rational, lambda s: Realization.coth(s, 0.5)])
def test_two_excitation_states_are_descendants(make):
    # S+ applied to an n=1 Bethe state gives the remaining n=2 joint eigenvectors
    real = make(TRIPLE)
    joint = joint_for(real)
    splus = sum(spin.embed(TRIPLE, i, spin.PLUS) for i in range(3))
    for state in solve_bethe(real, 1):
        v = splus @ bethe_vector(real, state.roots)
        v = v / np.linalg.norm(v)
        e = magnet_eigenvalues_from_roots(real, state.roots)
        rows = joint.rows_matching(np.concatenate([e, [0.5]]), 1e-7)
        assert len(rows) == 1
        assert abs(np.vdot(joint.vectors[:, rows[0]], v)) > 1 - 1e-10


def test_spin_one_two_root_state():
    # with a spin-1 site the n=2 sector contains genuine lowest-weight states
    sysm = spin.SpinSystem((1.0, 0.5, 1.0), (0.0, 0.9, -0.8))
    for real in (Realization.rational(sysm), Realization.coth(sysm, 0.4)):
        joint = joint_for(real)
        res = solve_bethe(real, 2)
        assert len(res) >= 1
        for state in res:
            m = compare_with_oracle(real, state.roots, joint)
            assert m.max_energy_error < 1e-7
            assert m.overlap > 1 - 1e-6


def test_tanh_roots_are_shifted_coth_roots():
    q = 0.5
    coth = sorted(s.roots[0].real for s in solve_bethe(Realization.coth(TRIPLE, q), 1))
    tanh = solve_bethe(Realization.tanh(TRIPLE, q), 1)
    assert sorted(s.roots[0].real for s in tanh) == pytest.approx(coth, abs=1e-9)
    for state in tanh:
        assert abs(abs(state.roots[0].imag) - np.pi / (2 * q)) < 1e-9


def test_off_shell_decomposition():
    real = Realization.coth(TRIPLE, 0.7)
    out = off_shell_decomposition(real, 0.3 + 0.4j, -0.2 + 0.25j)
    assert out["fit_residual"] < 1e-8
    assert out["closed_form_residual"] < 1e-8
    np.testing.assert_allclose(out["coefficients"], out["closed_form"], atol=1e-8)


def test_off_shell_reduces_to_bethe_eigenvalue_on_shell():
    real = Realization.coth(PAIR, 0.5)
    xi = solve_bethe(real, 1)[0].roots[0]
    lam = 0.2 + 0.6j
    c_lam, c_xi = off_shell_decomposition(real, lam, xi)["closed_form"]
    assert abs(c_lam) < 1e-10
    assert c_xi == pytest.approx(bethe_eigenvalue(real, lam, [xi]), abs=1e-10)
