"""Quadratic normal form and the complex Hamilton-Jacobi phase.

At a non-degenerate minimum the quadratic part of ``f`` is put in Williamson
form, which fixes the slope ``A`` of the stable Lagrangian.  The full phase
comes from the holomorphic invariant manifold of the modified Hamiltonian
``f1(x, z) = f~(x, gamma_x(z))``, where ``gamma_x`` inverts
``wbar -> 2 d_x phi~(x, wbar)``.  Writing that manifold as ``z = F'(x)``,

    phi = F - 2 phi~(., 0),   ybar_c = gamma_x(F'(x)),   f~(x, ybar_c(x)) = 0.

Real coordinates are ``s = (q, p)`` with ``x = q + i p``; a quadratic form is
``f = s^T Q s / 2``.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import NotAMinimumError, ResonanceError, ShrinkDomainError
from .series_core import PowerSeries, compose, invert_map

__all__ = [
    "SymplecticDiagonalization",
    "HJSolution",
    "hessian_from_germ",
    "symplectic_diagonalize",
    "williamson_frequencies",
    "modified_hamiltonian",
    "stable_manifold_series",
    "stable_slope_eig",
    "assemble_hj_solution",
]


@dataclass
class SymplecticDiagonalization:
    Q: np.ndarray
    lam: np.ndarray
    S: np.ndarray
    U1: np.ndarray
    U2: np.ndarray
    D: np.ndarray
    mu: np.ndarray
    psi: float
    A: complex

    @property
    def t(self):
        return float(abs(self.A))


@dataclass
class HJSolution:
    phi: PowerSeries
    z_c: PowerSeries
    ybar_c: PowerSeries
    f1: PowerSeries
    gamma: PowerSeries
    diag: SymplecticDiagonalization
    radius: float
    t: float
    residuals: dict = field(default_factory=dict)

    @property
    def A(self):
        return self.diag.A


def hessian_from_germ(f):
    """Real Hessian ``Q`` of a germ given in ``(x, xbar)``, with ``f ~ s^T Q s/2``."""
    c20, c11 = f[(2, 0)], f[(1, 1)]
    a = 2 * c11.real + 4 * c20.real
    b = 2 * c11.real - 4 * c20.real
    c = -4 * c20.imag
    return np.array([[a, c], [c, b]])


def _check_minimum(f, tol=1e-12):
    scale = max(1.0, f.max_abs())
    if abs(f[(1, 0)]) > tol * scale or abs(f[(0, 1)]) > tol * scale:
        raise NotAMinimumError("the origin is not a critical point")
    Q = hessian_from_germ(f)
    ev = np.linalg.eigvalsh(Q)
    if ev[0] <= tol * max(1.0, abs(ev[-1])):
        raise NotAMinimumError(f"Hessian is not positive definite (eigenvalues {ev})")
    return Q


def williamson_frequencies(Q):
    """Symplectic eigenvalues: moduli of the eigenvalues of ``J Q``."""
    Q = np.asarray(Q, dtype=float)
    d = Q.shape[0] // 2
    J = np.block([[np.zeros((d, d)), np.eye(d)], [-np.eye(d), np.zeros((d, d))]])
    ev = np.linalg.eigvals(J @ Q)
    return np.sort(np.abs(ev.imag))[::2]


def symplectic_diagonalize(Q):
    """Williamson form ``Q = lam S^T S`` with ``S = U1 D U2`` (one degree of freedom).

    ``D = diag(mu, 1/mu)`` with ``mu >= 1`` and ``U1 = U2^T`` a rotation by
    ``psi``.  The stable slope is ``A = exp(-2 i psi) (1/mu - mu)/(mu + 1/mu)``;
    ``phi = A x^2 / 2`` solves the quadratic problem.
    """
    Q = np.asarray(Q, dtype=float)
    if Q.shape != (2, 2):
        raise NotImplementedError("only one degree of freedom is implemented")
    if not np.allclose(Q, Q.T, atol=1e-14 * max(1.0, np.abs(Q).max())):
        raise ValueError("Q must be symmetric")
    ev = np.linalg.eigvalsh(Q)
    if ev[0] <= 0:
        raise NotAMinimumError("Q is not positive definite")
    lam = float(np.sqrt(np.linalg.det(Q)))
    w, R = np.linalg.eigh(Q / lam)
    # order so that the first column carries the larger eigenvalue
    w, R = w[::-1], R[:, ::-1]
    if np.linalg.det(R) < 0:
        R[:, 1] *= -1
    mu = float(np.sqrt(w[0]))
    Dm = np.diag([mu, 1 / mu])
    S = R @ Dm @ R.T
    psi = float(np.arctan2(R[1, 0], R[0, 0]))
    A = np.exp(-2j * psi) * (1 / mu - mu) / (mu + 1 / mu)
    return SymplecticDiagonalization(Q, np.array([lam]), S, R, R.T, Dm, np.array([mu]), psi, complex(A))


def modified_hamiltonian(f_pol, phi_pol):
    """``f1(x, z) = f~(x, gamma_x(z))`` and the map ``gamma``.

    ``gamma`` is returned as a series in ``(x, z)``.
    """
    grad = 2 * phi_pol.derivative(0)
    D = min(f_pol.degree, grad.degree)
    x = PowerSeries.variable(0, 2, D)
    inv = invert_map([x, grad.truncate(D)])
    gamma = inv[1]
    f1 = compose(f_pol.truncate(D), [x, gamma])
    return f1, gamma


def stable_manifold_series(f1, A, degree):
    """Holomorphic ``z_c(x) = A x + O(x^2)`` with ``f1(x, z_c(x)) = 0``.

    Order ``m`` of the equation fixes the coefficient of ``x^(m-1)`` through
    ``kappa = d_x d_z f1(0) + A d_z^2 f1(0)``, which must not vanish.
    """
    bxz = f1[(1, 1)]
    gzz = 2 * f1[(0, 2)]
    axx = 2 * f1[(2, 0)]
    kappa = bxz + gzz * A
    scale = max(abs(bxz), abs(gzz), abs(axx), 1e-300)
    if abs(kappa) < 1e-10 * scale:
        raise ResonanceError("linearized stable-manifold equation is singular")
    quad = axx / 2 + bxz * A + gzz * A * A / 2
    if abs(quad) > 1e-9 * scale:
        raise ValueError(f"slope A does not solve the quadratic equation (defect {abs(quad):.2e})")
    deg = min(degree, f1.degree - 1)
    zc = np.zeros(deg + 2, dtype=np.complex128)
    zc[1] = A
    xs = PowerSeries.variable(0, 1, deg + 1)
    for m in range(3, deg + 2):
        cur = PowerSeries(zc, 1, deg + 1)
        r = compose(f1.truncate(deg + 1), [xs, cur])
        zc[m - 1] -= r.coeffs[m] / kappa
    return PowerSeries(zc[: deg + 1], 1, deg)


def stable_slope_eig(f1):
    """Slope of the admissible invariant line of the linearized flow.

    The flow is ``xdot = -d_z f1``, ``zdot = d_x f1``; the line through the
    eigenvector whose eigenvalue has negative real part is returned.
    """
    bxz = f1[(1, 1)]
    gzz = 2 * f1[(0, 2)]
    axx = 2 * f1[(2, 0)]
    H = -np.array([[bxz, gzz], [-axx, -bxz]])
    w, V = np.linalg.eig(H)
    k = int(np.argmin(w.real))
    v = V[:, k]
    return complex(v[1] / v[0]), w


def convergence_radius(series, frac=0.5):
    """Root-test estimate from the upper part of a univariate series."""
    c = np.abs(series.coeffs)
    n = np.arange(c.size)
    lo = max(2, int(frac * c.size))
    sel = (n >= lo) & (c > 1e-250)
    if not np.any(sel):
        return np.inf
    return float(1.0 / np.max(c[sel] ** (1.0 / n[sel])))


def admissibility_constant(model, phi, radius, nr=48, ntheta=96):
    """``max |phi| / phi_K`` over the punctured disk of the given radius."""
    r = radius * (np.arange(1, nr + 1) / nr)
    th = 2 * np.pi * np.arange(ntheta) / ntheta
    z = r[:, None] * np.exp(1j * th)[None, :]
    vals = np.abs(phi.evaluate(z)) / model.kahler_potential(z)
    return float(np.max(vals)), r, np.max(vals, axis=1)


def assemble_hj_solution(model, f_germ, degree, phi_degree=None, radius=None):
    """Solve the complex HJ problem at the origin.

    Parameters
    ----------
    model : KahlerModel
    f_germ : PowerSeries
        Symbol germ in ``(x, xbar)``, degree at least ``phi_degree + 1``.
    degree : int
        Degree through which the HJ identities are certified.
    phi_degree : int, optional
        Degree of the returned phase (defaults to ``degree``).
    radius : float, optional
        Working disk; defaults to half the estimated convergence radius,
        capped by the model.
    """
    Q = _check_minimum(f_germ)
    diag = symplectic_diagonalize(Q)
    pdeg = degree if phi_degree is None else max(degree, phi_degree)
    need = pdeg + 1
    if f_germ.degree < need:
        raise ValueError(f"symbol germ needs degree >= {need}")
    f_pol = f_germ.truncate(need)
    phi_pol = model.polarization(need + 1)
    f1, gamma = modified_hamiltonian(f_pol, phi_pol)
    A_eig, _ = stable_slope_eig(f1)
    zc = stable_manifold_series(f1, diag.A, pdeg - 1)
    F = zc.integrate(0)
    phi0 = 2 * phi_pol.truncate(pdeg).coefficient_series(1, 0)
    phi = F - phi0
    xs = PowerSeries.variable(0, 1, zc.degree)
    ybar = compose(gamma.truncate(zc.degree), [xs, zc])
    hj = compose(f_pol.truncate(ybar.degree), [xs.truncate(ybar.degree), ybar])
    grad = 2 * phi_pol.derivative(0)
    g_at = compose(grad.truncate(ybar.degree), [xs.truncate(ybar.degree), ybar])
    g_at0 = grad.coefficient_series(1, 0).truncate(ybar.degree)
    dphi = phi.derivative(0).truncate(ybar.degree)
    grad_res = g_at - g_at0 - dphi
    dcheck = min(degree, hj.degree)
    res = {
        "hj": float(np.max(np.abs(hj.coeffs[: dcheck + 1]))),
        "gradient": float(np.max(np.abs(grad_res.coeffs[: dcheck + 1]))),
        "slope_eig": float(abs(A_eig - diag.A)),
        "degree": int(dcheck),
    }
    if radius is None:
        rc = convergence_radius(phi)
        radius = float(min(model.max_working_radius, 0.5 * rc))
    t, rgrid, tprof = admissibility_constant(model, phi, radius)
    if t >= 1:
        bad = np.flatnonzero(tprof >= 1)
        largest = float(rgrid[bad[0] - 1]) if bad[0] > 0 else 0.0
        raise ShrinkDomainError(f"phase not admissible on radius {radius:.3g} (t = {t:.3f})", largest)
    return HJSolution(phi, zc, ybar, f1, gamma, diag, radius, t, res)
