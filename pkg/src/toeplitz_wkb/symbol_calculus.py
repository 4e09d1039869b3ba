"""Formal symbols ``sum_k N^{-k} a_k`` and their analytic class.

A symbol is a finite list of power-series germs ``a_0, ..., a_K``.  Growth of
the coefficients is measured by

    |a_k|_{C^j} <= C r^j R^k (j + k)! / (j + k + 1)^m

where ``|a|_{C^j}`` is the sum of ``|d^mu a(0)|`` over ``|mu| = j``.
Summation keeps only ``k <= min(K, floor(c N))`` with ``c`` at most
``c_R = e / (3 R)``.
"""
from dataclasses import dataclass, field
from math import e, floor, lgamma, log

import numpy as np

from .errors import InsufficientDataError, NonInvertibleGermError
from .series_core import PowerSeries, index_table

__all__ = [
    "SymbolClassParams",
    "AnalyticSymbol",
    "cauchy_product",
    "symbol_inverse",
    "summate",
    "fit_class_params",
    "critical_c",
    "cj_norms",
    "truncation_index",
]


@dataclass
class SymbolClassParams:
    C: float
    r: float
    R: float
    m: float
    residual: float = 0.0
    r_identified: bool = True
    R_identified: bool = True
    npoints: int = 0
    covers: bool = True
    curvature: tuple = (0.0, 0.0)
    geometric: bool = True

    def to_json(self):
        return {
            "C": self.C,
            "r": self.r,
            "R": self.R,
            "m": self.m,
            "residual": self.residual,
            "r_identified": self.r_identified,
            "R_identified": self.R_identified,
            "npoints": self.npoints,
            "covers": self.covers,
            "curvature": list(self.curvature),
            "geometric": self.geometric,
        }


@dataclass
class AnalyticSymbol:
    """Formal symbol with terms ``a_k`` sharing variables and degree."""

    terms: list
    params: SymbolClassParams = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.terms:
            raise ValueError("symbol needs at least one term")
        nv = {t.nvars for t in self.terms}
        if len(nv) != 1:
            raise ValueError("symbol terms must share their variables")
        D = min(t.degree for t in self.terms)
        self.terms = [t.truncate(D) for t in self.terms]

    @property
    def order(self):
        return len(self.terms) - 1

    @property
    def nvars(self):
        return self.terms[0].nvars

    @property
    def degree(self):
        return self.terms[0].degree

    @classmethod
    def constant(cls, values, nvars, degree):
        return cls([PowerSeries.constant(v, nvars, degree) for v in values])

    def to_json(self):
        return {
            "terms": [t.to_json() for t in self.terms],
            "params": None if self.params is None else self.params.to_json(),
        }

    @classmethod
    def from_json(cls, obj):
        terms = [PowerSeries.from_json(t) for t in obj["terms"]]
        p = obj.get("params")
        params = None if p is None else SymbolClassParams(p["C"], p["r"], p["R"], p["m"])
        return cls(terms, params)


def critical_c(R):
    """Largest admissible summation constant ``e / (3 R)``."""
    return e / (3.0 * R)


def truncation_index(N, K, c):
    """``min(K, floor(c N))``, never negative."""
    if c is None or not np.isfinite(c):
        return K
    return max(0, min(K, int(floor(c * N + 1e-12))))


def cauchy_product(a, b):
    """Symbol product ``(a * b)_k = sum_{i+j=k} a_i b_j``.

    The order is ``min(K_a, K_b)``: higher terms would need data neither
    factor carries.
    """
    K = min(a.order, b.order)
    out = []
    for k in range(K + 1):
        acc = a.terms[0] * b.terms[k]
        for i in range(1, k + 1):
            acc = acc + a.terms[i] * b.terms[k - i]
        out.append(acc)
    return AnalyticSymbol(out)


def symbol_inverse(a, check_radius=0.5, samples=64):
    """Inverse for the Cauchy product.

    ``a_0`` must not vanish at the origin nor on a small sample polydisk of
    radius ``check_radius``.
    """
    a0 = a.terms[0]
    if abs(a0.coeffs[0]) < 1e-14:
        raise NonInvertibleGermError("a_0 vanishes at the origin")
    if check_radius > 0 and a0.degree > 0:
        th = np.linspace(0, 2 * np.pi, samples, endpoint=False)
        pts = check_radius * np.exp(1j * th)
        grid = np.stack([pts] * a0.nvars, axis=-1) if a0.nvars > 1 else pts
        vals = a0.evaluate(grid)
        if np.min(np.abs(vals)) < 1e-10 * abs(a0.coeffs[0]):
            raise NonInvertibleGermError("a_0 vanishes on the sample polydisk")
    b0 = a0.reciprocal()
    out = [b0]
    for k in range(1, a.order + 1):
        acc = a.terms[1] * out[k - 1]
        for i in range(2, k + 1):
            acc = acc + a.terms[i] * out[k - i]
        out.append(-(b0 * acc))
    return AnalyticSymbol(out)


def summate(a, N, c=None, K=None):
    """Truncated sum ``sum_{k <= min(K, cN)} N^{-k} a_k`` as a power series.

    ``c`` defaults to the critical constant from ``a.params`` when present,
    otherwise every available term is kept.
    """
    if K is None:
        K = a.order
    K = min(K, a.order)
    if c is not None and not c > 0:
        raise ValueError(f"truncation rate must be positive, got {c}")
    if N < 1:
        raise ValueError(f"level must be at least 1, got {N}")
    if c is None and a.params is not None and a.params.R_identified and a.params.R > 0:
        c = critical_c(a.params.R)
    kmax = truncation_index(N, K, c)
    acc = a.terms[0].copy()
    for k in range(1, kmax + 1):
        acc = acc + a.terms[k] * (float(N) ** (-k))
    return acc


def cj_norms(series, jmax=None):
    """``|s|_{C^j}`` at the origin for ``j = 0..jmax``.

    This is the sum over ``|mu| = j`` of ``mu! |c_mu|``.
    """
    if jmax is None:
        jmax = series.degree
    tab = index_table(series.nvars, series.degree)
    fact = np.exp(np.sum([[lgamma(v + 1) for v in row] for row in tab.exps], axis=1))
    weighted = fact * np.abs(series.coeffs)
    out = np.zeros(jmax + 1)
    for j in range(min(jmax, series.degree) + 1):
        lo, hi = tab.count_upto(j - 1), tab.count_upto(j)
        out[j] = weighted[lo:hi].sum()
    return out


def _log_envelope_norm(j, k, m):
    return lgamma(j + k + 1) - m * log(j + k + 1)


def fit_class_params(a, m=4.0, jmax=None, floor=1e-300, data=None, envelope=True, curvature_tol=0.1):
    """Least-squares fit of ``log C + j log r + k log R`` to the data.

    ``data`` may be passed directly as an iterable of ``(j, k, norm)``.
    Norms are divided by ``(j + k)!/(j + k + 1)^m`` first unless
    ``envelope`` is false, in which case a plain geometric fit is made.
    ``C`` is then raised to the smallest value whose envelope covers every
    point.  A direction in which the data carry no information (all points
    share ``j`` or ``k``) is reported through ``r_identified`` or
    ``R_identified`` with the neutral value 1.

    ``geometric`` is true when the normalized log-norms show no upward
    curvature beyond ``curvature_tol`` in either index, i.e. the data grow at
    most geometrically once the envelope is taken out.
    """
    if data is None:
        data = []
        for k, t in enumerate(a.terms):
            jm = t.degree if jmax is None else min(jmax, t.degree)
            for j, v in enumerate(cj_norms(t, jm)):
                data.append((j, k, v))
    pts = [(j, k, v) for j, k, v in data if v > floor]
    if len(pts) < 2:
        raise InsufficientDataError(f"need at least two nonzero norms, got {len(pts)}")
    J = np.array([p[0] for p in pts], dtype=float)
    Kk = np.array([p[1] for p in pts], dtype=float)
    if envelope:
        y = np.array([log(p[2]) - _log_envelope_norm(p[0], p[1], m) for p in pts])
    else:
        y = np.log(np.array([p[2] for p in pts]))
    cols = [np.ones_like(J)]
    r_id = np.ptp(J) > 0
    R_id = np.ptp(Kk) > 0
    if r_id:
        cols.append(J)
    if R_id:
        cols.append(Kk)
    A = np.stack(cols, axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    logr = coef[1] if r_id else 0.0
    logR = coef[1 + int(r_id)] if R_id else 0.0
    fitted = A @ coef
    resid = float(np.sqrt(np.mean((y - fitted) ** 2)))
    logC = float(np.max(y - J * logr - Kk * logR))
    covers = bool(np.all(y <= logC + J * logr + Kk * logR + 1e-9))
    curv = [0.0, 0.0]
    quad = list(cols)
    which = []
    if r_id and np.unique(J).size >= 3:
        quad.append(J**2)
        which.append(0)
    if R_id and np.unique(Kk).size >= 3:
        quad.append(Kk**2)
        which.append(1)
    if which:
        cq, *_ = np.linalg.lstsq(np.stack(quad, axis=1), y, rcond=None)
        for i, w in enumerate(which):
            curv[w] = float(cq[len(cols) + i])
    finite = all(np.isfinite(v) and v > 0 for v in (np.exp(logC), np.exp(logr), np.exp(logR)))
    return SymbolClassParams(
        C=float(np.exp(logC)),
        r=float(np.exp(logr)),
        R=float(np.exp(logR)),
        m=m,
        residual=resid,
        r_identified=bool(r_id),
        R_identified=bool(R_id),
        npoints=len(pts),
        covers=covers,
        curvature=tuple(curv),
        geometric=bool(finite and covers and max(curv) <= curvature_tol),
    )
