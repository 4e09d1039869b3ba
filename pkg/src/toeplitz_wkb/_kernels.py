"""Hot loops with a numba path and a pure numpy fallback.

Set ``TOEPLITZ_WKB_DISABLE_NUMBA=1`` before import to force the numpy
versions.  Both versions are always importable so that they can be compared.
"""
import os

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def _flag(name):
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = _HAVE_NUMBA and not _flag("TOEPLITZ_WKB_DISABLE_NUMBA")


# -- truncated multivariate product ---------------------------------------


@njit(cache=True)
def _series_mul_numba(a, b, enc, lut, deg, prefix, D):
    n = a.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        ai = a[i]
        if ai == 0:
            continue
        stop = prefix[D - deg[i]]
        ei = enc[i]
        for j in range(stop):
            bj = b[j]
            if bj == 0:
                continue
            out[lut[ei + enc[j]]] += ai * bj
    return out


def _series_mul_numpy(a, b, enc, lut, deg, prefix, D):
    n = a.shape[0]
    re = np.zeros(n)
    im = np.zeros(n)
    nz_b = np.flatnonzero(b)
    for d in range(D + 1):
        lo = prefix[d - 1] if d > 0 else 0
        hi = prefix[d]
        block = np.arange(lo, hi)
        block = block[a[block] != 0]
        if block.size == 0:
            continue
        js = nz_b[nz_b < prefix[D - d]]
        if js.size == 0:
            continue
        idx = lut[enc[block][:, None] + enc[js][None, :]].ravel()
        prod = (a[block][:, None] * b[js][None, :]).ravel()
        re += np.bincount(idx, weights=prod.real, minlength=n)
        im += np.bincount(idx, weights=prod.imag, minlength=n)
    return re + 1j * im


def series_mul(a, b, enc, lut, deg, prefix, D, use_numba=None):
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        return _series_mul_numba(a, b, enc, lut, deg, prefix, D)
    return _series_mul_numpy(a, b, enc, lut, deg, prefix, D)


# -- banded Toeplitz assembly ---------------------------------------------


@njit(cache=True)
def _band_assemble_numba(E, F, bands):
    dim = E.shape[0]
    nr = E.shape[1]
    M = np.zeros((dim, dim), dtype=np.complex128)
    for b in range(bands.shape[0]):
        m = bands[b]
        for k in range(dim - m):
            acc = 0.0 + 0.0j
            for r in range(nr):
                acc += E[k + m, r] * E[k, r] * F[b, r]
            M[k + m, k] = acc
            if m > 0:
                M[k, k + m] = np.conj(acc)
    return M


def _band_assemble_numpy(E, F, bands):
    dim = E.shape[0]
    M = np.zeros((dim, dim), dtype=np.complex128)
    for b, m in enumerate(bands):
        if m >= dim:
            continue
        vals = (E[m:] * E[: dim - m]) @ F[b]
        rows = np.arange(m, dim)
        cols = rows - m
        M[rows, cols] = vals
        if m > 0:
            M[cols, rows] = np.conj(vals)
    return M


def band_assemble(E, F, bands, use_numba=None):
    """Hermitian matrix with ``M[k+m, k] = sum_r E[k+m,r] E[k,r] F[b,r]``.

    ``bands`` holds the non-negative offsets ``m``; row ``b`` of ``F`` is the
    angular Fourier coefficient of the symbol for that offset.
    """
    E = np.ascontiguousarray(E, dtype=np.float64)
    F = np.ascontiguousarray(F, dtype=np.complex128)
    bands = np.ascontiguousarray(bands, dtype=np.int64)
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        return _band_assemble_numba(E, F, bands)
    return _band_assemble_numpy(E, F, bands)


# -- exponential of a univariate series ----------------------------------


@njit(cache=True)
def _exp_series_numba(p, n):
    # p[0] must be zero; returns the first n coefficients of exp(p)
    out = np.zeros(n, dtype=np.complex128)
    out[0] = 1.0
    dp = p.shape[0]
    for m in range(1, n):
        acc = 0.0 + 0.0j
        top = min(m, dp - 1)
        for j in range(1, top + 1):
            acc += j * p[j] * out[m - j]
        out[m] = acc / m
    return out


def _exp_series_numpy(p, n):
    out = np.zeros(n, dtype=np.complex128)
    out[0] = 1.0
    dp = p.shape[0]
    jp = np.arange(dp) * p
    for m in range(1, n):
        top = min(m, dp - 1)
        out[m] = np.dot(jp[1 : top + 1], out[m - 1 :: -1][:top]) / m
    return out


def exp_series(p, n, use_numba=None):
    p = np.ascontiguousarray(p, dtype=np.complex128)
    if p.shape[0] and p[0] != 0:
        raise ValueError("exp_series expects a vanishing constant term")
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        return _exp_series_numba(p, n)
    return _exp_series_numpy(p, n)
