"""Formal solution of transport equations ``(X - h) u = g``.

``X = sum_i (lam_i x_i + a_i(x)) d_i`` is a holomorphic vector field with a
diagonal linear part and positive frequencies ``lam_i``; ``a_i`` vanish to
second order.  With ``h(0) = g(0) = 0`` there is a unique formal solution
with ``u(0) = 0``, obtained degree by degree from

    (lam . mu) u_mu = g_mu + (h u)_mu - sum_i (a_i d_i u)_mu,

whose right side only involves coefficients of lower degree.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ResonanceError
from .series_core import PowerSeries
from .symbol_calculus import cj_norms, fit_class_params

__all__ = ["TransportProblem", "solve_transport", "growth_check", "transport_defect"]


@dataclass
class TransportProblem:
    lam: np.ndarray
    a: list
    h: PowerSeries
    g: PowerSeries

    @property
    def d(self):
        return len(self.lam)

    @property
    def degree(self):
        degs = [self.h.degree, self.g.degree] + [ai.degree for ai in self.a]
        return min(degs)


def _apply_field(problem, u):
    # sum_i a_i d_i u, truncated to the degree of u
    acc = PowerSeries.zeros(u.nvars, u.degree)
    for i, ai in enumerate(problem.a):
        if ai.is_zero():
            continue
        du = u.derivative(i).pad(u.degree)
        acc = acc + ai.truncate(u.degree) * du
    return acc


def solve_transport(problem, degree=None):
    """Unique formal solution ``u`` with ``u(0) = 0``.

    Parameters
    ----------
    problem : TransportProblem
    degree : int, optional
        Output degree, at most the degree of the data.
    """
    lam = np.asarray(problem.lam, dtype=np.complex128)
    d = lam.size
    D = problem.degree if degree is None else min(degree, problem.degree)
    h = problem.h.truncate(D)
    g = problem.g.truncate(D)
    scale = max(1.0, h.max_abs(), g.max_abs())
    if abs(h.coeffs[0]) > 1e-12 * scale or abs(g.coeffs[0]) > 1e-12 * scale:
        raise ValueError("transport data must satisfy h(0) = g(0) = 0")
    if np.any(lam.real <= 0):
        raise ResonanceError(f"frequencies must have positive real part, got {lam}")
    for ai in problem.a:
        if ai.degree >= 1 and np.any(np.abs(ai.truncate(1).coeffs) > 1e-12 * max(1.0, ai.max_abs())):
            raise ValueError("nonlinear part of the field must vanish to second order")
    u = PowerSeries.zeros(d, D)
    tab = u.table
    for m in range(1, D + 1):
        lo, hi = tab.count_upto(m - 1), tab.count_upto(m)
        rhs = g + h * u - _apply_field(problem, u)
        denom = tab.exps[lo:hi] @ lam
        if np.any(np.abs(denom) < 1e-14):
            raise ResonanceError(f"resonant denominator at degree {m}")
        u.coeffs[lo:hi] = rhs.coeffs[lo:hi] / denom
    return u


def transport_defect(problem, u):
    """``(X - h) u - g`` as a series."""
    lam = np.asarray(problem.lam)
    D = min(u.degree, problem.degree)
    u = u.truncate(D)
    lin = PowerSeries.zeros(u.nvars, D)
    for i in range(u.nvars):
        if D >= 1:
            lin = lin + u.derivative(i).pad(D).multiply_by_variable(i).truncate(D) * lam[i]
    return lin + _apply_field(problem, u) - problem.h.truncate(D) * u - problem.g.truncate(D)


def growth_check(u, m=4.0, jmax=10, factorial=True):
    """Fit the derivative norms of ``u`` at the origin.

    With ``factorial`` the envelope is ``C r^j j!/(j+1)^m``; otherwise a
    plain geometric law ``C r^j``.  ``R`` is not identifiable from a single
    function and is reported as such.  The ``geometric`` flag of the result
    says whether the normalized norms grow at most geometrically.
    """
    norms = cj_norms(u, min(jmax, u.degree))
    data = [(j, 0, v) for j, v in enumerate(norms)]
    return fit_class_params(None, m=m, data=data, envelope=factorial)
