import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toeplitz_wkb.errors import NotAMinimumError, ShrinkDomainError
from toeplitz_wkb.hamilton_jacobi import (
    assemble_hj_solution,
    hessian_from_germ,
    modified_hamiltonian,
    stable_manifold_series,
    stable_slope_eig,
    symplectic_diagonalize,
    williamson_frequencies,
)
from toeplitz_wkb.kahler_models import make_model
from toeplitz_wkb.series_core import PowerSeries, compose
from toeplitz_wkb.symbols import make_symbol

J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def spd(a, b, c):
    return np.array([[a, c], [c, b]], dtype=float)


# -- quadratic normal form ----------------------------------------------------------


def test_identity_hessian():
    d = symplectic_diagonalize(np.eye(2))
    assert d.lam[0] == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(d.S, np.eye(2), atol=1e-14)
    assert abs(d.A) < 1e-15


def test_diagonal_hessian_closed_form():
    a, b = 3.0, 1.0
    d = symplectic_diagonalize(np.diag([a, b]))
    assert d.lam[0] == pytest.approx(np.sqrt(a * b), rel=1e-14)
    assert d.mu[0] == pytest.approx((a / b) ** 0.25, rel=1e-14)
    # with x = q + i p the admissible root of a(1+A)^2 = b(1-A)^2 is this one
    assert d.A == pytest.approx((np.sqrt(b) - np.sqrt(a)) / (np.sqrt(a) + np.sqrt(b)), abs=1e-14)
    mu = d.mu[0]
    assert abs(abs(d.A) - abs((mu - 1 / mu) / (mu + 1 / mu))) < 1e-14


@settings(max_examples=50)
@given(
    st.floats(0.1, 10), st.floats(0.1, 10), st.floats(-0.99, 0.99)
)
def test_random_spd_reconstruction(a, b, rho):
    Q = spd(a, b, rho * np.sqrt(a * b))
    d = symplectic_diagonalize(Q)
    assert np.max(np.abs(Q - d.lam[0] * d.S.T @ d.S)) < 1e-10 * np.abs(Q).max()
    assert np.max(np.abs(d.S - d.U1 @ d.D @ d.U2)) < 1e-10
    assert np.max(np.abs(d.S.T @ J @ d.S - J)) < 1e-10
    for U in (d.U1, d.U2):
        assert np.max(np.abs(U.T @ U - np.eye(2))) < 1e-12
        assert np.max(np.abs(U.T @ J @ U - J)) < 1e-12
    assert d.lam[0] == pytest.approx(williamson_frequencies(Q)[0], rel=1e-10)
    assert d.t < 1
    mu = d.mu[0]
    assert abs(d.t - abs((mu - 1 / mu) / (mu + 1 / mu))) < 1e-12


@settings(max_examples=30)
@given(st.floats(0.2, 5), st.floats(0.2, 5), st.floats(-0.9, 0.9))
def test_slope_matches_eigensolve(a, b, rho):
    Q = spd(a, b, rho * np.sqrt(a * b))
    f = PowerSeries.from_terms(
        {(2, 0): (Q[0, 0] - Q[1, 1]) / 8 - 1j * Q[0, 1] / 4, (1, 1): (Q[0, 0] + Q[1, 1]) / 4,
         (0, 2): (Q[0, 0] - Q[1, 1]) / 8 + 1j * Q[0, 1] / 4}, 2, 4)
    assert np.allclose(hessian_from_germ(f), Q, atol=1e-13)
    A_eig, w = stable_slope_eig(f)
    d = symplectic_diagonalize(Q)
    assert abs(A_eig - d.A) < 1e-8
    assert np.min(w.real) < 0 < np.max(w.real)


def test_rejects_indefinite():
    with pytest.raises(NotAMinimumError):
        symplectic_diagonalize(np.diag([1.0, -1.0]))
    with pytest.raises(NotAMinimumError):
        symplectic_diagonalize(np.diag([1.0, 0.0]))


# -- modified Hamiltonian and stable manifold -----------------------------------------------


def test_modified_hamiltonian_bargmann_is_identity():
    f = make_symbol("quartic-well", eps=0.1).germ(8)
    phi = make_model("bargmann").polarization(8)
    f1, gamma = modified_hamiltonian(f, phi)
    assert f1.allclose(f, 1e-15)
    assert gamma.allclose(PowerSeries.variable(1, 2, gamma.degree), 1e-15)


def test_modified_hamiltonian_cp1_leading_term():
    f = make_symbol("cp1-height-well").germ(10)  # 1 - Z = 2|x|^2 + ...
    phi = make_model("cp1").polarization(10)
    f1, _ = modified_hamiltonian(f, phi)
    assert abs(f1[(1, 1)] - f[(1, 1)]) < 1e-12
    assert abs(f1[(2, 0)]) < 1e-15 and abs(f1[(0, 2)]) < 1e-15
    # gamma is tangent to the identity: the quadratic part is unchanged
    assert abs(f1[(1, 1)] - 2.0) < 1e-12


def test_stable_manifold_toy_recursion():
    lam, D = 1.7, 10
    f1 = PowerSeries.from_terms({(1, 1): lam, (3, 0): 1.0}, 2, D + 1)
    zc = stable_manifold_series(f1, 0.0, D)
    x = PowerSeries.variable(0, 1, zc.degree)
    res = compose(f1.truncate(zc.degree), [x, zc])
    assert res.max_abs() < 1e-12
    assert abs(zc[(2,)] + 1 / lam) < 1e-15


def test_stable_manifold_quadratic_is_linear():
    a, b, c = 2.0, 0.7, 0.3
    f = make_symbol("anisotropic-quadratic", a=a, b=b, c=c).germ(12)
    d = symplectic_diagonalize(spd(a, b, c))
    zc = stable_manifold_series(f, d.A, 10)
    assert abs(zc[(1,)] - d.A) < 1e-15
    assert np.max(np.abs(zc.coeffs[2:])) < 1e-12


# -- full solution -------------------------------------------------------------------------


def test_isotropic_phase_vanishes():
    h = assemble_hj_solution(make_model("bargmann"), make_symbol("isotropic-quadratic").germ(12), 10)
    assert h.phi.is_zero() and h.ybar_c.is_zero()


def test_anisotropic_phase_closed_form():
    a, b, c = 3.0, 1.0, 0.5
    h = assemble_hj_solution(make_model("bargmann"), make_symbol("anisotropic-quadratic", a=a, b=b, c=c).germ(20), 16)
    A = symplectic_diagonalize(spd(a, b, c)).A
    want = PowerSeries.from_terms({(2,): A / 2}, 1, h.phi.degree)
    assert h.phi.allclose(want, 1e-13)
    assert h.ybar_c.allclose(PowerSeries.from_terms({(1,): A}, 1, h.ybar_c.degree), 1e-13)


CASES = [
    ("bargmann", "anisotropic-quadratic", {"a": 3.0, "b": 1.0, "c": 0.4}),
    ("bargmann", "quartic-well", {"eps": 0.2}),
    ("cp1", "cp1-height-well", {"chi": [1.0, 0.5]}),
    ("cp1", "cp1-spin-well", {"ex": 0.5, "chi": [1.0, 2.0]}),
    ("cp1", "cp1-asymmetric-double-well", {"delta": 0.25}),
]


@pytest.mark.parametrize("model,symbol,params", CASES)
def test_hj_and_gradient_residuals(model, symbol, params):
    m = make_model(model)
    sym = make_symbol(symbol, **params)
    for well in sym.wells:
        h = assemble_hj_solution(m, sym.germ(24, well), 17)
        assert h.residuals["degree"] >= 16
        assert h.residuals["hj"] < 1e-10
        assert h.residuals["gradient"] < 1e-10
        assert h.residuals["slope_eig"] < 1e-8
        assert h.t < 1
        assert h.phi[(0,)] == 0 and h.phi[(1,)] == 0


@pytest.mark.parametrize("s", [0.5, 3.0, 11.0])
def test_phase_invariant_under_scaling(s):
    m = make_model("cp1")
    f = make_symbol("cp1-spin-well", ex=0.5, chi=[1.0, 2.0]).germ(20)
    h1 = assemble_hj_solution(m, f, 14)
    h2 = assemble_hj_solution(m, s * f, 14)
    assert np.max(np.abs(h1.phi.coeffs - h2.phi.coeffs)) < 1e-12


def test_admissibility_converges_to_quadratic_margin():
    m = make_model("cp1")
    f = make_symbol("cp1-spin-well", ex=0.5).germ(24)
    ts = [assemble_hj_solution(m, f, 16, radius=r).t for r in (0.8, 0.4, 0.2, 0.1)]
    t0 = symplectic_diagonalize(hessian_from_germ(f)).t
    gaps = [abs(t - t0) for t in ts]
    assert all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.05


def test_shrink_domain_reports_radius():
    m = make_model("bargmann")
    f = make_symbol("quartic-well", eps=0.2).germ(24)
    with pytest.raises(ShrinkDomainError) as exc:
        assemble_hj_solution(m, f, 16, radius=3.0)
    r = exc.value.largest_radius
    assert 0 < r < 3
    assert assemble_hj_solution(m, f, 16, radius=r).t < 1


def test_not_a_minimum():
    m = make_model("bargmann")
    x = PowerSeries.variable(0, 2, 6)
    xb = PowerSeries.variable(1, 2, 6)
    with pytest.raises(NotAMinimumError):
        assemble_hj_solution(m, x + xb + x * xb, 4)
    with pytest.raises(NotAMinimumError):
        assemble_hj_solution(m, -(x * xb), 4)
