"""Order-by-order WKB construction at a non-degenerate minimum.

Conjugating the Toeplitz operator by ``exp(N phi)`` gives, at a point ``x``,

    exp(-N phi) T_N(f) (exp(N phi) u)(x)
        = p_N (N/pi) \\int exp(N Phi(x; y, ybar)) f(y) rho(y) u(y) dL(y),
    Phi = 2 phi~(x, wbar) - 2 phi~(y, wbar) + phi(y) - phi(x).

Two ways of expanding this integral are implemented.

*Chart route* (used to build the expansion).  Put ``y = x + eta`` and

    theta = (2 phi~(x + eta, wbar) - 2 phi~(x, wbar)) / eta - phihat(x, eta),
    phihat = (phi(x + eta) - phi(x)) / eta,

so that ``Phi = -eta theta`` exactly.  In the holomorphic coordinates
``(eta, theta)`` the phase is the standard Gaussian one and the ``n``-th term
of the expansion is ``L_n a = n! [eta^n theta^n] a``, where the amplitude
``b = f~ rho~ dwbar/dtheta`` carries the Jacobian.  Taylor slices
``B[j][s][n](x) = [eta^s theta^n] b_j`` reduce every later step to
univariate series.

*Wick route* (used as an independent check).  Expand around the critical
point ``(y, wbar) = (x, ybar_c(x))`` in the original coordinates and apply
the contraction formula

    L_n a = sum_{nu - mu = n, 2 nu >= 3 mu} <(-H)^{-1} d, d>^nu (g^mu a) / (2^nu mu! nu!)

with ``H`` the Hessian and ``g`` the cubic remainder of ``Phi``, times
``(-det H)^{-1/2}``.

With ``u = sum N^-k u_k``, ``lambda(N) = N^-1 sum N^-k lambda_k`` and
``b = sum N^-j b_j`` (``b_j`` includes the Bergman symbol), order ``k + 1``
of the eigenvalue equation reads

    p1 u_k' - h u_k = lambda_k u_0 + sum_{0<i<k} lambda_i u_{k-i} - R_k,
    R_k = sum_{n+j+l = k+1, l < k} L_n(b_j u_l),  lambda_k = R_k(0),

with ``p1 = B[0][0][1]`` the transport field and
``h = lambda_0 - B[0][1][1]``, ``lambda_0 = B[0][1][1](0)``.
"""
from dataclasses import dataclass, field
from math import factorial

import numpy as np
from scipy.special import binom

from .errors import DegreeError, InsufficientDataError
from .hamilton_jacobi import assemble_hj_solution
from .series_core import PowerSeries, compose, invert_map
from .symbol_calculus import (
    AnalyticSymbol,
    cauchy_product,
    cj_norms,
    critical_c,
    fit_class_params,
    symbol_inverse,
    truncation_index,
)
from .transport import TransportProblem, solve_transport

__all__ = [
    "ChartData",
    "StationaryPhaseContext",
    "WKBExpansion",
    "Quasimode",
    "morse_chart",
    "build_b_symbol",
    "chart_slices",
    "chart_term",
    "stationary_phase_context",
    "stationary_phase_expand",
    "compute_lambda0",
    "build_wkb",
]


# -- univariate helpers -----------------------------------------------------


def _u(coeffs):
    return PowerSeries.from_univariate(coeffs)


def _shift_coeffs(u, t):
    """Taylor coefficients of ``u^(t) / t!``."""
    c = u.coeffs
    if t == 0:
        return c.copy()
    n = np.arange(t, c.size)
    return binom(n, t) * c[t:]


def _mul1(a, b, degree):
    return np.convolve(a[: degree + 1], b[: degree + 1])[: degree + 1]


# -- the chart ------------------------------------------------------------------


@dataclass
class ChartData:
    wbar: PowerSeries
    jac: PowerSeries
    degree: int


def morse_chart(model, phi, degree):
    """``wbar(x, eta, theta)`` and ``d wbar / d theta`` in chart coordinates.

    Variables are ``(x, eta, theta)``; the phase is ``-eta theta`` exactly.
    """
    Dp = degree + 2
    pol = model.polarization(Dp + 1)
    x = PowerSeries.variable(0, 3, Dp + 1)
    eta = PowerSeries.variable(1, 3, Dp + 1)
    wb = PowerSeries.variable(2, 3, Dp + 1)
    shifted = compose(pol, [x + eta, wb])
    base = compose(pol, [x, wb])
    theta = ((shifted - base) * 2).divide_by_variable(1)
    inv = invert_map([x.truncate(Dp), eta.truncate(Dp), theta])
    W = inv[2]
    if phi.degree < Dp + 1:
        raise DegreeError(f"phase needs degree >= {Dp + 1}")
    ph = phi.truncate(Dp + 1)
    x1 = PowerSeries.variable(0, 3, Dp + 1)
    phi_shift = compose(ph, [x1 + eta])
    phi_base = compose(ph, [x1])
    phihat = (phi_shift - phi_base).divide_by_variable(1)
    th = PowerSeries.variable(2, 3, Dp)
    arg = [x.truncate(Dp), eta.truncate(Dp), th + phihat]
    Wphi = compose(W, arg)
    Wtheta = compose(W.derivative(2), [a.truncate(Dp - 1) for a in arg])
    return ChartData(Wphi.truncate(degree), Wtheta.truncate(degree), degree)


def _compose_at_chart(germ2, chart, degree):
    # germ2(x + eta, wbar(x, eta, theta)) in chart variables
    x = PowerSeries.variable(0, 3, degree)
    eta = PowerSeries.variable(1, 3, degree)
    return compose(germ2.truncate(degree), [x + eta, chart.wbar.truncate(degree)])


def build_b_symbol(model, f_germ, phi, degree, K=2, chart=None):
    """Chart amplitude ``b_j(x, eta, theta)`` for ``j <= K``.

    ``b = f~ rho~ J * a(x, wbar) a(x, 0)^{-1} a(x + eta, 0)`` with ``a`` the
    Bergman symbol.  On the critical set ``eta = theta = 0`` every ``b_j``
    vanishes because ``f~(x, ybar_c(x)) = 0``.
    """
    if chart is None:
        chart = morse_chart(model, phi, degree)
    D = degree
    fx = _compose_at_chart(f_germ, chart, D)
    rho = _compose_at_chart(model.density(D + 1), chart, D)
    P = fx * rho * chart.jac.truncate(D)
    a = model.bergman_symbol(K, D + 1)
    x = PowerSeries.variable(0, 3, D)
    eta = PowerSeries.variable(1, 3, D)
    zero = PowerSeries.zeros(3, D)
    a1 = AnalyticSymbol([compose(t.truncate(D), [x, chart.wbar.truncate(D)]) for t in a.terms])
    a2 = AnalyticSymbol([compose(t.truncate(D), [x, zero]) for t in a.terms])
    a3 = AnalyticSymbol([compose(t.truncate(D), [x + eta, zero]) for t in a.terms])
    amp = cauchy_product(cauchy_product(a1, symbol_inverse(a2, check_radius=0)), a3)
    return AnalyticSymbol([t * P for t in amp.terms], meta={"chart": chart})


def chart_slices(b, nmax):
    """``B[j][s][n](x) = [eta^s theta^n] b_j`` for ``s, n <= nmax``."""
    out = []
    for t in b.terms:
        rows = []
        for s in range(nmax + 1):
            row = []
            for n in range(nmax + 1):
                if s + n > t.degree:
                    row.append(None)
                    continue
                row.append(t.coefficient_series(2, n).coefficient_series(1, s))
            rows.append(row)
        out.append(rows)
    return out


def chart_term(slices, j, n, u, degree):
    """``L_n(b_j u)`` as a coefficient array up to ``degree``."""
    acc = np.zeros(degree + 1, dtype=np.complex128)
    if j >= len(slices):
        return acc
    for t in range(n + 1):
        B = slices[j][n - t][n]
        if B is None or B.degree < degree:
            raise DegreeError(f"slice B[{j}][{n - t}][{n}] too short for degree {degree}")
        sh = _shift_coeffs(u, t)
        if sh.size < degree + 1:
            raise DegreeError(f"u too short for L_{n} at degree {degree}")
        acc += _mul1(B.coeffs, sh, degree)
    return acc * factorial(n)


# -- Wick contraction route -----------------------------------------------------


@dataclass
class StationaryPhaseContext:
    """Phase ``Phi(x; eta, zeta)`` around the critical point.

    ``y = x + eta`` and ``wbar = ybar_c(x) + zeta``.  ``M`` holds the
    entries of ``(-H)^{-1}`` and ``norm`` is ``(-det H)^{-1/2}``, all as
    series in ``x`` embedded in three variables.
    """

    phase: PowerSeries
    remainder: PowerSeries
    M: tuple
    norm: PowerSeries
    degree: int


def _slice2(s, a, b):
    # coefficient of eta^a zeta^b as a 3-variable series in x alone
    c = s.coefficient_series(2, b).coefficient_series(1, a)
    return c.embed(3, [0])


def stationary_phase_context(model, phi, ybar_c, degree):
    """Context for the Toeplitz phase conjugated by ``exp(N phi)``."""
    D = degree
    pol = model.polarization(D + 1).truncate(D)
    x = PowerSeries.variable(0, 3, D)
    eta = PowerSeries.variable(1, 3, D)
    zeta = PowerSeries.variable(2, 3, D)
    yb = ybar_c.truncate(D).embed(3, [0])
    wb = yb + zeta
    ph = phi.truncate(D)
    Phi = (compose(pol, [x, wb]) - compose(pol, [x + eta, wb])) * 2 + compose(ph, [x + eta]) - compose(ph, [x])
    hee = _slice2(Phi, 2, 0) * 2
    hez = _slice2(Phi, 1, 1)
    hzz = _slice2(Phi, 0, 2) * 2
    quad = hee.pad(D) * (eta * eta) * 0.5 + hez.pad(D) * (eta * zeta) + hzz.pad(D) * (zeta * zeta) * 0.5
    g = Phi - quad
    for a, b in [(0, 0), (1, 0), (0, 1)]:
        g = g - _slice2(Phi, a, b).pad(D) * (eta**a) * (zeta**b)
    det = hee * hzz - hez * hez
    inv_det = det.reciprocal()
    M = (-(hzz * inv_det), hez * inv_det, -(hee * inv_det))
    mdet = -det
    c0 = mdet.coeffs[0]
    tser = (mdet - c0) / c0
    K = D
    coef = binom(-0.5, np.arange(K + 1))
    from .series_core import univariate

    norm = univariate(coef, tser) * (c0 ** (-0.5))
    return StationaryPhaseContext(Phi, g, M, norm, D)


def _apply_Q(ctx, s):
    M11, M12, M22 = ctx.M
    dee = s.derivative(1).derivative(1)
    dez = s.derivative(1).derivative(2)
    dzz = s.derivative(2).derivative(2)
    D = dee.degree
    return M11.truncate(D) * dee + M12.truncate(D) * dez * 2 + M22.truncate(D) * dzz


def stationary_phase_expand(ctx, amplitude, n):
    """``L_0 .. L_n`` of ``(N/pi) \\int exp(N Phi) a dL`` as series in ``x``.

    ``amplitude`` is a series in ``(x, eta, zeta)``.  The normalization
    ``(-det H)^{-1/2}`` is included, so the integral is
    ``sum_k N^-k L_k + O(N^-(n+1))``.  Term ``k`` is exact through
    ``x``-degree ``degree - 6k``.
    """
    D = min(ctx.degree, amplitude.degree)
    a = amplitude.truncate(D)
    g = ctx.remainder.truncate(D)
    out = []
    gpow = [PowerSeries.constant(1.0, 3, D)]
    for k in range(n + 1):
        acc = None
        for mu in range(0, 2 * k + 1):
            nu = k + mu
            if 2 * nu < 3 * mu:
                continue
            while len(gpow) <= mu:
                gpow.append(gpow[-1] * g)
            s = gpow[mu] * a
            for _ in range(nu):
                s = _apply_Q(ctx, s)
            val = s.coefficient_series(2, 0).coefficient_series(1, 0)
            val = val * (1.0 / (2**nu * factorial(mu) * factorial(nu)))
            acc = val if acc is None else acc + val
        nx = ctx.norm.coefficient_series(2, 0).coefficient_series(1, 0)
        out.append(acc * nx)
    return out


# -- the expansion ----------------------------------------------------------


@dataclass
class Quasimode:
    N: int
    phi: PowerSeries
    amplitude: PowerSeries
    lam: float
    kmax: int
    radius: float


@dataclass
class WKBExpansion:
    """Result of :func:`build_wkb`.

    ``lambdas[k]`` and ``u[k]`` are the coefficients of ``N^-k`` in
    ``N lambda(N)`` and in the amplitude; ``u[k]`` is exact through degree
    ``D - 2k``.
    """

    model: object
    hj: object
    K: int
    D: int
    lambdas: np.ndarray
    u: list
    b: AnalyticSymbol
    slices: list
    params: object = None
    info: dict = field(default_factory=dict)

    @property
    def lambda0(self):
        return float(self.lambdas[0].real)

    @property
    def transport_frequency(self):
        return complex(self.slices[0][0][1].coeffs[1])

    def default_c(self):
        if self.params is not None and self.params.R_identified and self.params.R > 0:
            return critical_c(self.params.R)
        return np.inf

    def kmax(self, N, c=None, K=None):
        K = self.K if K is None else min(K, self.K)
        c = self.default_c() if c is None else c
        return truncation_index(N, K, c)

    def eigenvalue(self, N, c=None, K=None):
        """``lambda(N) = sum_{k <= kmax} lambda_k N^{-k-1}``."""
        km = self.kmax(N, c, K)
        k = np.arange(km + 1)
        return float(np.sum(self.lambdas[: km + 1].real * float(N) ** (-k - 1.0)))

    def amplitude(self, N, c=None, K=None):
        km = self.kmax(N, c, K)
        deg = self.u[0].degree
        acc = np.zeros(deg + 1, dtype=np.complex128)
        for k in range(km + 1):
            uk = self.u[k].coeffs
            acc[: uk.size] += uk * float(N) ** (-k)
        return _u(acc), km

    def quasimode(self, N, c=None, K=None, radius=None):
        amp, km = self.amplitude(N, c, K)
        r = self.hj.radius if radius is None else radius
        return Quasimode(int(N), self.hj.phi, amp, self.eigenvalue(N, c, K), km, r)

    def to_json(self):
        return {
            "K": self.K,
            "D": self.D,
            "lambda": self.lambdas.real.tolist(),
            "lambda_imag_max": self.info["lambda_imag_max"],
            "u": [uk.to_json() for uk in self.u],
            "phi": self.hj.phi.to_json(),
            "ybar_c": self.hj.ybar_c.to_json(),
            "A": [self.hj.A.real, self.hj.A.imag],
            "radius": self.hj.radius,
            "admissibility": self.hj.t,
            "hj_residuals": self.hj.residuals,
            "class_params": self.params.to_json() if self.params is not None else None,
            "c": self.default_c() if np.isfinite(self.default_c()) else None,
        }

    def eigen_equation_defect(self, k):
        """Coefficient of ``N^-(k+1)`` in the conjugated eigen-equation.

        Computed from the chart slices for every ``n`` including ``n = 0``
        through degree ``D - 2k - 1``, the last degree at which every term is
        determined by the stored ``u_l``.
        """
        deg = self.D - 2 * k - 1
        acc = np.zeros(deg + 1, dtype=np.complex128)
        for n in range(0, k + 2):
            for j in range(0, k + 2 - n):
                l = k + 1 - n - j
                if l > k or j >= len(self.slices):
                    continue
                acc += chart_term(self.slices, j, n, self.u[l], deg)
        for i in range(k + 1):
            acc[: deg + 1] -= self.lambdas[i] * self.u[k - i].coeffs[: deg + 1]
        return _u(acc)


def compute_lambda0(model, f_germ, hj=None, degree=6):
    """Leading eigenvalue coefficient ``lambda_0 = (d_eta d_theta b_0)(0)``."""
    if hj is None:
        hj = assemble_hj_solution(model, f_germ, degree + 4, phi_degree=degree + 4)
    b = build_b_symbol(model, f_germ, hj.phi, degree, K=0)
    return float(b.terms[0][(0, 1, 1)].real)


def build_wkb(model, f_germ, K=12, D=None, phi_degree=None, radius=None, m=4.0, fit_jmax=10):
    """WKB quasimode data up to order ``K``.

    Parameters
    ----------
    model : KahlerModel
    f_germ : PowerSeries
        Symbol germ in ``(x, xbar)`` at the well, of degree at least
        ``max(D + 6, phi_degree + 1)``.
    K : int
        Highest order ``u_K``, ``lambda_K``.
    D : int, optional
        ``u_k`` is exact through degree ``D - 2k``; defaults to ``2K + 4``.
    phi_degree : int, optional
        Degree of the phase used for quasimodes (default ``2 D + 8``).
    radius : float, optional
        Working disk radius.
    """
    D = 2 * K + 4 if D is None else int(D)
    if D - 2 * K < 2:
        raise DegreeError(f"degree {D} leaves u_{K} below degree 2; need D >= {2 * K + 2}")
    DP = D + 2
    pdeg = max(DP + 3, phi_degree if phi_degree is not None else 2 * D + 8)
    pdeg = min(pdeg, f_germ.degree - 1)
    if pdeg < DP + 3:
        raise DegreeError(f"symbol germ degree {f_germ.degree} too small for D = {D}")
    hj = assemble_hj_solution(model, f_germ, DP + 3, phi_degree=pdeg, radius=radius)
    nb = max(1, K + 1)
    b = build_b_symbol(model, f_germ, hj.phi, DP, K=nb)
    slices = chart_slices(b, K + 2)
    S0 = slices[0]
    lam0 = complex(S0[1][1].coeffs[0])
    p1 = S0[0][1]
    if abs(p1.coeffs[0]) > 1e-10:
        raise ValueError("transport field does not vanish at the well")
    lamX = p1.coeffs[1]
    field_a = p1.copy()
    field_a.coeffs[:2] = 0.0
    h = -S0[1][1]
    h.coeffs[0] = 0.0
    h = h + 0.0
    # h = lambda0 - B011 has h(0) = 0 by construction
    lambdas = [lam0]
    d0 = D
    prob = TransportProblem([lamX], [field_a.truncate(d0)], h.truncate(d0), h.truncate(d0))
    v0 = solve_transport(prob)
    u0 = v0.copy()
    u0.coeffs[0] = 1.0
    us = [u0]
    for k in range(1, K + 1):
        dk = D - 2 * k
        R = np.zeros(dk + 1, dtype=np.complex128)
        for n in range(1, k + 2):
            for j in range(0, k + 2 - n):
                l = k + 1 - n - j
                if l >= k or j >= len(slices):
                    continue
                R += chart_term(slices, j, n, us[l], dk)
        lamk = R[0]
        g = -R.copy()
        g += lamk * us[0].coeffs[: dk + 1]
        for i in range(1, k):
            g += lambdas[i] * us[k - i].coeffs[: dk + 1]
        g[0] = 0.0
        prob = TransportProblem([lamX], [field_a.truncate(dk)], h.truncate(dk), _u(g))
        uk = solve_transport(prob)
        lambdas.append(lamk)
        us.append(uk)
    lambdas = np.array(lambdas)
    data = [(0, k, abs(lk)) for k, lk in enumerate(lambdas)]
    for k, uk in enumerate(us):
        for j, v in enumerate(cj_norms(uk, min(fit_jmax, uk.degree))):
            data.append((j, k, v))
    try:
        params = fit_class_params(None, m=m, data=data)
    except InsufficientDataError:  # degenerate data, e.g. exactly solvable wells
        params = None
    info = {
        "lambda_imag_max": float(np.max(np.abs(lambdas.imag))),
        "transport_frequency": complex(lamX),
        "chart_degree": DP,
        "phi_degree": hj.phi.degree,
    }
    return WKBExpansion(model, hj, K, D, lambdas, us, b, slices, params, info)
