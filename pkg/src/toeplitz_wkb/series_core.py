"""Truncated multivariate power series.

A :class:`PowerSeries` stores the Taylor coefficients of a germ at the origin
up to a total degree ``D`` in a dense complex vector.  Monomials are listed in
graded-lexicographic order: by total degree, and inside one degree by
decreasing exponent of the first variable, then the second, and so on.  The
terms of degree at most ``m`` therefore form a prefix of the vector, which
makes truncation a slice.

Products and compositions are truncated to the smaller of the degrees
involved.  Nothing here ever invents coefficients beyond the degree that the
inputs determine.
"""
from functools import lru_cache
from math import comb, factorial

import numpy as np

from . import _kernels
from .errors import DegreeError, NonInvertibleGermError

__all__ = [
    "PowerSeries",
    "index_table",
    "mul",
    "compose",
    "invert_map",
    "polarize",
    "is_real_pairing",
    "univariate",
]

_LUT_LIMIT = 60_000_000


def n_terms(nvars, degree):
    return comb(degree + nvars, nvars)


def _compositions(total, parts):
    # all exponent tuples of length ``parts`` summing to ``total``,
    # first entry decreasing
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class _IndexTable:
    def __init__(self, nvars, degree):
        self.nvars = nvars
        self.degree = degree
        exps = [e for d in range(degree + 1) for e in _compositions(d, nvars)]
        self.exps = np.array(exps, dtype=np.int64).reshape(len(exps), nvars)
        self.deg = self.exps.sum(axis=1)
        self.prefix = np.cumsum(np.bincount(self.deg, minlength=degree + 1)).astype(np.int64)
        base = degree + 1
        self.weights = base ** np.arange(nvars, dtype=np.int64)
        self.enc = self.exps @ self.weights
        self.position = {e: i for i, e in enumerate(map(tuple, exps))}
        size = base**nvars
        if size <= _LUT_LIMIT:
            self.lut = np.full(size, -1, dtype=np.int64)
            self.lut[self.enc] = np.arange(len(exps), dtype=np.int64)
        else:
            self.lut = None

    def index(self, alpha):
        return self.position[tuple(int(a) for a in alpha)]

    def count_upto(self, m):
        if m < 0:
            return 0
        return int(self.prefix[min(m, self.degree)])


def _locate(tab, exps):
    if tab.lut is not None:
        return tab.lut[exps @ tab.weights]
    return np.array([tab.index(e) for e in exps], dtype=np.int64)


@lru_cache(maxsize=None)
def index_table(nvars, degree):
    """Cached monomial tables for ``nvars`` variables up to ``degree``."""
    if nvars < 1 or degree < 0:
        raise ValueError("need nvars >= 1 and degree >= 0")
    return _IndexTable(nvars, degree)


class PowerSeries:
    """Truncated Taylor series in ``nvars`` variables.

    Parameters
    ----------
    coeffs : array_like
        Coefficients in graded-lexicographic order, length
        ``binom(degree + nvars, nvars)``.
    nvars : int
        Number of variables.
    degree : int
        Truncation degree ``D``: all coefficients of total degree ``<= D``
        are known, nothing above.
    """

    __slots__ = ("coeffs", "nvars", "degree")

    def __init__(self, coeffs, nvars, degree):
        c = np.array(coeffs, dtype=np.complex128).ravel()
        if c.shape[0] != n_terms(nvars, degree):
            raise ValueError(
                f"expected {n_terms(nvars, degree)} coefficients for "
                f"nvars={nvars}, degree={degree}, got {c.shape[0]}"
            )
        self.coeffs = c
        self.nvars = int(nvars)
        self.degree = int(degree)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, nvars, degree):
        return cls(np.zeros(n_terms(nvars, degree), dtype=np.complex128), nvars, degree)

    @classmethod
    def constant(cls, value, nvars, degree):
        s = cls.zeros(nvars, degree)
        s.coeffs[0] = value
        return s

    @classmethod
    def variable(cls, i, nvars, degree):
        s = cls.zeros(nvars, degree)
        if degree >= 1:
            e = [0] * nvars
            e[i] = 1
            s.coeffs[index_table(nvars, degree).index(e)] = 1.0
        return s

    @classmethod
    def from_terms(cls, terms, nvars, degree):
        """Build from a mapping ``{exponent tuple: coefficient}``.

        Terms above ``degree`` are dropped.
        """
        s = cls.zeros(nvars, degree)
        tab = index_table(nvars, degree)
        for alpha, c in terms.items():
            alpha = (alpha,) if np.isscalar(alpha) else tuple(alpha)
            if len(alpha) != nvars:
                raise ValueError(f"exponent {alpha} has wrong length")
            if sum(alpha) <= degree:
                s.coeffs[tab.index(alpha)] += c
        return s

    @classmethod
    def from_dense(cls, arr, degree=None):
        """Inverse of :meth:`to_dense`; entries above ``degree`` are ignored."""
        arr = np.asarray(arr)
        nvars = arr.ndim
        if degree is None:
            degree = arr.shape[0] - 1
        tab = index_table(nvars, degree)
        ex = tab.exps
        ok = np.all(ex < np.array(arr.shape), axis=1)
        c = np.zeros(len(ex), dtype=np.complex128)
        c[ok] = arr[tuple(ex[ok].T)]
        return cls(c, nvars, degree)

    @classmethod
    def from_univariate(cls, coeffs):
        c = np.asarray(coeffs, dtype=np.complex128)
        return cls(c, 1, c.shape[0] - 1)

    # -- basic accessors ----------------------------------------------------

    @property
    def table(self):
        return index_table(self.nvars, self.degree)

    def __getitem__(self, alpha):
        alpha = (alpha,) if np.isscalar(alpha) else tuple(alpha)
        if sum(alpha) > self.degree:
            raise DegreeError(f"exponent {alpha} exceeds degree {self.degree}")
        return self.coeffs[self.table.index(alpha)]

    def copy(self):
        return PowerSeries(self.coeffs.copy(), self.nvars, self.degree)

    def terms(self, tol=0.0):
        """Iterate over ``(exponent tuple, coefficient)`` with ``|c| > tol``."""
        ex = self.table.exps
        for i in np.flatnonzero(np.abs(self.coeffs) > tol):
            yield tuple(int(v) for v in ex[i]), self.coeffs[i]

    def to_dense(self):
        D = self.degree
        arr = np.zeros((D + 1,) * self.nvars, dtype=np.complex128)
        arr[tuple(self.table.exps.T)] = self.coeffs
        return arr

    def is_zero(self, tol=0.0):
        return bool(np.all(np.abs(self.coeffs) <= tol))

    def as_variable(self):
        """Index ``i`` if this series is exactly the coordinate ``x_i``."""
        nz = np.flatnonzero(self.coeffs)
        if nz.size != 1 or self.coeffs[nz[0]] != 1.0:
            return None
        e = self.table.exps[nz[0]]
        if e.sum() != 1:
            return None
        return int(np.argmax(e))

    def max_abs(self):
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def allclose(self, other, atol=1e-12):
        D = min(self.degree, other.degree)
        a, b = self.truncate(D), other.truncate(D)
        return bool(np.max(np.abs(a.coeffs - b.coeffs)) <= atol)

    def __repr__(self):
        return f"PowerSeries(nvars={self.nvars}, degree={self.degree}, nnz={np.count_nonzero(self.coeffs)})"

    # -- degree manipulation ------------------------------------------------

    def truncate(self, degree):
        if degree > self.degree:
            raise DegreeError(f"cannot raise degree {self.degree} to {degree}")
        if degree == self.degree:
            return self
        return PowerSeries(self.coeffs[: n_terms(self.nvars, degree)].copy(), self.nvars, degree)

    def homogeneous_part(self, m):
        out = PowerSeries.zeros(self.nvars, self.degree)
        tab = self.table
        lo, hi = tab.count_upto(m - 1), tab.count_upto(m)
        out.coeffs[lo:hi] = self.coeffs[lo:hi]
        return out

    def pad(self, degree):
        """Same series with zero coefficients appended up to ``degree``.

        Only meaningful for polynomials that are exact at their degree.
        """
        if degree < self.degree:
            return self.truncate(degree)
        out = PowerSeries.zeros(self.nvars, degree)
        out.coeffs[: self.coeffs.shape[0]] = self.coeffs
        return out

    # -- arithmetic ---------------------------------------------------------

    def _align(self, other):
        if isinstance(other, PowerSeries):
            if other.nvars != self.nvars:
                raise ValueError("series have different numbers of variables")
            D = min(self.degree, other.degree)
            return self.truncate(D), other.truncate(D)
        return None

    def __add__(self, other):
        pair = self._align(other)
        if pair is None:
            out = self.copy()
            out.coeffs[0] += other
            return out
        a, b = pair
        return PowerSeries(a.coeffs + b.coeffs, a.nvars, a.degree)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(-self.coeffs, self.nvars, self.degree)

    def __sub__(self, other):
        pair = self._align(other)
        if pair is None:
            out = self.copy()
            out.coeffs[0] -= other
            return out
        a, b = pair
        return PowerSeries(a.coeffs - b.coeffs, a.nvars, a.degree)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            return mul(self, other)
        return PowerSeries(self.coeffs * other, self.nvars, self.degree)

    def __rmul__(self, other):
        return PowerSeries(self.coeffs * other, self.nvars, self.degree)

    def __truediv__(self, other):
        if isinstance(other, PowerSeries):
            return mul(self, other.reciprocal())
        return PowerSeries(self.coeffs / other, self.nvars, self.degree)

    def __pow__(self, k):
        if int(k) != k or k < 0:
            raise ValueError("only non-negative integer powers")
        out = PowerSeries.constant(1.0, self.nvars, self.degree)
        base = self
        k = int(k)
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def conj(self):
        """Complex conjugate of the coefficients (not of the variables)."""
        return PowerSeries(np.conj(self.coeffs), self.nvars, self.degree)

    def reciprocal(self):
        c0 = self.coeffs[0]
        if c0 == 0:
            raise NonInvertibleGermError("series has vanishing constant term")
        t = (self - c0) / c0
        geo = np.array([(-1.0) ** n for n in range(self.degree + 1)])
        return univariate(geo, t) / c0

    def exp(self):
        c0 = self.coeffs[0]
        t = self - c0
        ser = np.array([1.0 / factorial(n) for n in range(self.degree + 1)])
        return univariate(ser, t) * np.exp(c0)

    def log1p(self):
        """``log(1 + s)`` for a series with vanishing constant term."""
        ser = np.zeros(self.degree + 1)
        ser[1:] = [(-1.0) ** (n + 1) / n for n in range(1, self.degree + 1)]
        return univariate(ser, self)

    # -- calculus -----------------------------------------------------------

    def derivative(self, i=0):
        if self.degree == 0:
            raise DegreeError("derivative of a degree-0 series is undetermined")
        D = self.degree - 1
        out = PowerSeries.zeros(self.nvars, D)
        tab = self.table
        ex = tab.exps
        mask = ex[:, i] > 0
        shifted = ex[mask].copy()
        shifted[:, i] -= 1
        target = index_table(self.nvars, D)
        keep = shifted.sum(axis=1) <= D
        out.coeffs[_locate(target, shifted[keep])] = self.coeffs[mask][keep] * ex[mask][keep, i]
        return out

    def integrate(self, i=0):
        """Antiderivative in ``x_i`` vanishing on ``x_i = 0``; degree grows by 1."""
        D = self.degree + 1
        out = PowerSeries.zeros(self.nvars, D)
        ex = self.table.exps.copy()
        ex[:, i] += 1
        target = index_table(self.nvars, D)
        out.coeffs[_locate(target, ex)] = self.coeffs / ex[:, i]
        return out

    def divide_by_variable(self, i=0, tol=1e-12):
        """Exact quotient by ``x_i``; the series must vanish on ``x_i = 0``."""
        ex = self.table.exps
        rem = ex[:, i] == 0
        scale = max(1.0, self.max_abs())
        if np.any(np.abs(self.coeffs[rem]) > tol * scale):
            raise ValueError(f"series is not divisible by x_{i}")
        D = self.degree - 1
        out = PowerSeries.zeros(self.nvars, D)
        src = ~rem
        shifted = ex[src].copy()
        shifted[:, i] -= 1
        target = index_table(self.nvars, D)
        out.coeffs[_locate(target, shifted)] = self.coeffs[src]
        return out

    def multiply_by_variable(self, i=0):
        """Exact product with ``x_i``; degree grows by 1."""
        D = self.degree + 1
        out = PowerSeries.zeros(self.nvars, D)
        ex = self.table.exps.copy()
        ex[:, i] += 1
        target = index_table(self.nvars, D)
        out.coeffs[_locate(target, ex)] = self.coeffs
        return out

    def coefficient_series(self, i, k):
        """Coefficient of ``x_i**k`` as a series in the remaining variables."""
        if self.nvars == 1:
            return PowerSeries.constant(self.coeffs[k] if k <= self.degree else 0.0, 1, 0)
        D = self.degree - k
        if D < 0:
            raise DegreeError("power exceeds degree")
        ex = self.table.exps
        mask = ex[:, i] == k
        rest = np.delete(ex[mask], i, axis=1)
        out = PowerSeries.zeros(self.nvars - 1, D)
        target = out.table
        out.coeffs[_locate(target, rest)] = self.coeffs[mask]
        return out

    def embed(self, nvars, positions):
        """Same germ viewed in ``nvars`` variables, ``x_k -> y_{positions[k]}``."""
        out = PowerSeries.zeros(nvars, self.degree)
        ex = np.zeros((self.coeffs.shape[0], nvars), dtype=np.int64)
        for k, p in enumerate(positions):
            ex[:, p] += self.table.exps[:, k]
        target = out.table
        np.add.at(out.coeffs, _locate(target, ex), self.coeffs)
        return out

    def substitute_zero(self, i):
        """Restrict to the hyperplane ``x_i = 0`` (one fewer variable)."""
        return self.coefficient_series(i, 0)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, points):
        """Evaluate the truncated polynomial at points of shape ``(..., nvars)``.

        For one variable a scalar or array of points is also accepted.
        """
        pts = np.asarray(points, dtype=np.complex128)
        if self.nvars == 1:
            if pts.ndim >= 1 and pts.shape[-1] == 1 and pts.ndim > 1:
                pts = pts[..., 0]
            out = np.zeros(pts.shape, dtype=np.complex128)
            for c in self.coeffs[::-1]:
                out = out * pts + c
            return out
        if pts.shape[-1] != self.nvars:
            raise ValueError("last axis must have length nvars")
        shape = pts.shape[:-1]
        flat = pts.reshape(-1, self.nvars)
        ex = self.table.exps
        nz = np.flatnonzero(self.coeffs)
        out = np.zeros(flat.shape[0], dtype=np.complex128)
        if nz.size == 0:
            return out.reshape(shape)
        D = self.degree
        chunk = max(1, 4_000_000 // max(1, nz.size))
        for s in range(0, flat.shape[0], chunk):
            blk = flat[s : s + chunk]
            powers = blk[:, :, None] ** np.arange(D + 1)[None, None, :]
            mono = np.ones((blk.shape[0], nz.size), dtype=np.complex128)
            for v in range(self.nvars):
                mono *= powers[:, v, ex[nz, v]]
            out[s : s + chunk] = mono @ self.coeffs[nz]
        return out.reshape(shape)

    __call__ = evaluate

    # -- serialization ------------------------------------------------------

    def to_json(self):
        return {
            "nvars": self.nvars,
            "max_degree": self.degree,
            "coeffs": [[list(alpha), float(c.real), float(c.imag)] for alpha, c in self.terms()],
        }

    @classmethod
    def from_json(cls, obj):
        nvars, D = int(obj["nvars"]), int(obj["max_degree"])
        s = cls.zeros(nvars, D)
        tab = s.table
        for alpha, re, im in obj["coeffs"]:
            if len(alpha) != nvars or sum(alpha) > D or min(alpha) < 0:
                raise ValueError(f"bad exponent {alpha}")
            s.coeffs[tab.index(alpha)] = complex(re, im)
        return s


# -- free functions ---------------------------------------------------------


def mul(a, b, use_numba=None):
    """Truncated product; the result has degree ``min(a.degree, b.degree)``."""
    if a.nvars != b.nvars:
        raise ValueError("series have different numbers of variables")
    D = min(a.degree, b.degree)
    a, b = a.truncate(D), b.truncate(D)
    # fixed operand order keeps a*b and b*a bitwise identical
    if a.coeffs.tobytes() > b.coeffs.tobytes():
        a, b = b, a
    if a.nvars == 1:
        return PowerSeries(np.convolve(a.coeffs, b.coeffs)[: D + 1], 1, D)
    tab = a.table
    if tab.lut is None:
        raise MemoryError("monomial table too large for dense products")
    c = _kernels.series_mul(a.coeffs, b.coeffs, tab.enc, tab.lut, tab.deg, tab.prefix, D, use_numba)
    return PowerSeries(c, a.nvars, D)


def univariate(coeffs, g):
    """``sum_n coeffs[n] * g**n`` for a series ``g`` with zero constant term."""
    if g.coeffs[0] != 0:
        raise ValueError("inner series must vanish at the origin")
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    D = min(g.degree, coeffs.shape[0] - 1)
    g = g.truncate(D)
    acc = PowerSeries.constant(coeffs[D], g.nvars, D)
    for n in range(D - 1, -1, -1):
        acc = acc * g
        acc.coeffs[0] += coeffs[n]
    return acc


def _check_inner(gs, tol=1e-12):
    out = []
    for g in gs:
        c0 = g.coeffs[0]
        if abs(c0) > tol * max(1.0, g.max_abs()):
            raise ValueError("inner series must vanish at the origin")
        if c0 != 0:
            g = g.copy()
            g.coeffs[0] = 0.0
        out.append(g)
    return out


def compose(f, gs):
    """Taylor coefficients of ``f(g_1, ..., g_n)``.

    Every ``g_i`` must vanish at the origin.  The result has degree
    ``min(f.degree, min(g_i.degree))``.  Arguments that are plain coordinate
    functions are substituted directly; the remaining ones are handled by
    Horner's rule in the first and power tables in the others.
    """
    gs = list(gs)
    if len(gs) != f.nvars:
        raise ValueError("need one inner series per variable of f")
    m = gs[0].nvars
    if any(g.nvars != m for g in gs):
        raise ValueError("inner series must share their variables")
    D = min([f.degree] + [g.degree for g in gs])
    gs = _check_inner([g.truncate(D) for g in gs])
    f = f.truncate(D)
    if f.is_zero():
        return PowerSeries.zeros(m, D)
    passthrough = [g.as_variable() for g in gs]
    S = [i for i in range(f.nvars) if passthrough[i] is None]
    P = [i for i in range(f.nvars) if passthrough[i] is not None]
    dense = f.to_dense().transpose(S + P)
    target = index_table(m, D)

    def embed_pass(block):
        # block is dense over the P axes
        if not P:
            return PowerSeries.constant(complex(block), m, D)
        out = PowerSeries.zeros(m, D)
        nz = np.argwhere(block != 0)
        if nz.size == 0:
            return out
        ex = np.zeros((nz.shape[0], m), dtype=np.int64)
        for k, pi in enumerate(P):
            ex[:, passthrough[pi]] += nz[:, k]
        keep = ex.sum(axis=1) <= D
        np.add.at(out.coeffs, _locate(target, ex[keep]), block[tuple(nz[keep].T)])
        return out

    if not S:
        return embed_pass(dense)

    rest = S[1:]
    powers = {}

    def power(i, p):
        key = (i, p)
        if key not in powers:
            if p == 0:
                powers[key] = PowerSeries.constant(1.0, m, D)
            elif p == 1:
                powers[key] = gs[i]
            else:
                powers[key] = power(i, p // 2) * power(i, p - p // 2)
        return powers[key]

    monomials = {(): PowerSeries.constant(1.0, m, D)}

    def monomial(beta):
        if not any(beta):
            return monomials[()]
        if beta not in monomials:
            k = max(j for j in range(len(beta)) if beta[j] > 0)
            head = beta[:k] + (0,) * (len(beta) - k)
            monomials[beta] = monomial(head) * power(rest[k], beta[k]) if any(head) else power(rest[k], beta[k])
        return monomials[beta]

    def inner(block):
        # block is dense over rest + P axes
        if not rest:
            return embed_pass(block)
        acc = PowerSeries.zeros(m, D)
        nr = len(rest)
        for beta in map(tuple, np.argwhere(np.any(block.reshape(block.shape[:nr] + (-1,)) != 0, axis=-1))):
            if sum(beta) > D:
                continue
            sub = block[beta]
            if P:
                acc = acc + monomial(beta) * embed_pass(sub)
            else:
                acc = acc + monomial(beta) * complex(sub)
        return acc

    first = S[0]
    acc = PowerSeries.zeros(m, D)
    for b in range(D, -1, -1):
        if b < D:
            acc = acc * gs[first]
        block = dense[b]
        if np.any(block != 0):
            acc = acc + inner(block)
    return acc


def invert_map(gs):
    """Compositional inverse of a map germ ``g: (C^n, 0) -> (C^n, 0)``.

    Uses the fixed point ``h = L^{-1}(x - N(h))`` with ``g = L + N``; each
    sweep fixes one more degree.  Raises :class:`NonInvertibleGermError` if
    the linear part is singular.
    """
    gs = list(gs)
    n = len(gs)
    if any(g.nvars != n for g in gs):
        raise ValueError("map must go from C^n to C^n")
    D = min(g.degree for g in gs)
    gs = _check_inner([g.truncate(D) for g in gs])
    tab = index_table(n, D)
    lin_idx = [tab.index(tuple(int(k == j) for k in range(n))) for j in range(n)]
    L = np.array([[g.coeffs[lin_idx[j]] for j in range(n)] for g in gs])
    sv = np.linalg.svd(L, compute_uv=False)
    if sv[-1] <= 1e-12 * max(1.0, sv[0]):
        raise NonInvertibleGermError(f"linear part is singular (smallest singular value {sv[-1]:.3e})")
    Linv = np.linalg.inv(L)
    Linv[np.abs(Linv) < 1e-300] = 0.0
    nonlinear = []
    for g in gs:
        c = g.copy()
        c.coeffs[: tab.count_upto(1)] = 0.0
        nonlinear.append(c)
    coords = [PowerSeries.variable(j, n, D) for j in range(n)]

    def apply_linv(vec, degree):
        out = []
        for i in range(n):
            acc = PowerSeries.zeros(n, degree)
            for j in range(n):
                if Linv[i, j] == 1:
                    acc = acc + vec[j].truncate(degree)
                elif Linv[i, j] != 0:
                    acc = acc + vec[j].truncate(degree) * Linv[i, j]
            out.append(acc)
        return out

    h = apply_linv(coords, 1)
    for d in range(2, D + 1):
        # h is exact through degree d - 1, and N(h) at degree d only sees that
        hd = [x.pad(d) for x in h]
        rhs = []
        for j in range(n):
            if nonlinear[j].is_zero():
                rhs.append(coords[j].truncate(d))
            else:
                rhs.append(coords[j].truncate(d) - compose(nonlinear[j].truncate(d), hd))
        h = apply_linv(rhs, d)
    return [x.pad(D) for x in h]


def polarize(f):
    """Polarization of a real-analytic germ given in ``(x, xbar)``.

    With the coefficients of ``f`` indexed by ``(mu, nu)`` for
    ``x**mu * xbar**nu``, the polarization is the holomorphic germ
    ``sum c_{mu,nu} x**mu * wbar**nu`` in ``(x, wbar)``: the same coefficient
    vector read in new variables.
    """
    if f.nvars % 2:
        raise ValueError("need an even number of variables (x, xbar)")
    return f.copy()


def is_real_pairing(f, tol=1e-12):
    """True if ``c_{nu,mu} == conj(c_{mu,nu})``, i.e. ``f`` is real on the diagonal."""
    d = f.nvars // 2
    tab = f.table
    swapped = np.concatenate([tab.exps[:, d:], tab.exps[:, :d]], axis=1)
    perm = _locate(tab, swapped)
    return bool(np.max(np.abs(f.coeffs[perm] - np.conj(f.coeffs)), initial=0.0) <= tol * max(1.0, f.max_abs()))


def evaluate_real(f, x):
    """Evaluate a germ in ``(x, xbar)`` on the real slice ``wbar = conj(x)``."""
    x = np.asarray(x, dtype=np.complex128)
    if f.nvars == 2:
        pts = np.stack([x, np.conj(x)], axis=-1)
    else:
        pts = np.concatenate([x, np.conj(x)], axis=-1)
    return f.evaluate(pts)
