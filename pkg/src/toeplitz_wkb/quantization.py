"""Exact Toeplitz matrices, their low spectrum, and quasimode residuals.

Matrices are taken in the orthonormal monomial basis ``e_k = z^k/|z^k|``.
Entries come from a tensor rule: Gauss-Legendre in the radial variable and
an equispaced trapezoid in the angle, evaluated through the angular Fourier
coefficients of the symbol so that each diagonal band is one radial sum.
"""
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.special
from scipy.special import betainc, betaln, gammainc, gammaln

from . import _kernels
from .errors import QuadratureAccuracyError

__all__ = [
    "ToeplitzMatrix",
    "SpectralResult",
    "EmbeddedQuasimode",
    "build_toeplitz_matrix",
    "gram_matrix",
    "diagonalize",
    "embed_quasimode",
    "residual_norm",
    "log_disk_mass",
]

log = logging.getLogger(__name__)


@dataclass
class ToeplitzMatrix:
    N: int
    kind: str
    matrix: np.ndarray
    radial_nodes: int
    angular_nodes: int
    refinement_change: float
    bands: np.ndarray = field(repr=False, default=None)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def hermiticity_defect(self):
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))


@dataclass
class SpectralResult:
    eigenvalues: np.ndarray
    vectors: np.ndarray

    @property
    def min(self):
        return float(self.eigenvalues[0])

    @property
    def gap(self):
        if self.eigenvalues.size < 2:
            return np.nan
        return float(self.eigenvalues[1] - self.eigenvalues[0])


@dataclass
class EmbeddedQuasimode:
    vector: np.ndarray
    radius: float
    boundary_weight: float
    tail_mass: float


def _symbol_fourier(model, f, N, rule, n_theta):
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    z = rule.r[:, None] * np.exp(1j * theta)[None, :]
    vals = np.asarray(f(z))
    if np.iscomplexobj(vals):
        if np.max(np.abs(vals.imag)) > 1e-12 * max(1.0, np.max(np.abs(vals.real))):
            raise ValueError("Toeplitz symbols must be real-valued")
        vals = vals.real
    return np.fft.rfft(vals, axis=1) / n_theta


def _assemble(model, f, N, nodes, n_theta, band_tol, use_numba):
    rule = model.radial_rule(N, nodes)
    E = np.exp(model.log_basis_on_rule(N, rule))
    F = _symbol_fourier(model, f, N, rule, n_theta)
    dim = model.dim(N)
    mmax = min(dim - 1, F.shape[1] - 1)
    amp = np.max(np.abs(F[:, : mmax + 1]), axis=0)
    scale = max(amp[0], np.max(amp)) if amp.size else 1.0
    bands = np.flatnonzero(amp > band_tol * scale)
    if bands.size == 0 or bands[0] != 0:
        bands = np.union1d([0], bands)
    Fb = F[:, bands].T.copy()
    M = _kernels.band_assemble(E, Fb, bands, use_numba)
    return M, bands


def build_toeplitz_matrix(model, f, N, radial_nodes=None, tol=1e-11, max_doublings=5, band_tol=1e-15, use_numba=None):
    """Matrix of ``T_N(f)`` in the orthonormal monomial basis.

    Radial nodes are doubled until the largest entry change, relative to the
    largest entry, drops below ``tol``.

    Parameters
    ----------
    model : KahlerModel
    f : callable
        Real symbol, vectorized over complex arrays.
    N : int
    radial_nodes : int, optional
        Starting node count; the model picks one from ``N`` otherwise.
    """
    N = int(N)
    n = radial_nodes or model.default_radial_nodes(N)
    n_theta = model.angular_nodes(N)
    prev, _ = _assemble(model, f, N, n, n_theta, band_tol, use_numba)
    change = np.inf
    for _ in range(max_doublings):
        n *= 2
        cur, bands = _assemble(model, f, N, n, n_theta, band_tol, use_numba)
        change = float(np.max(np.abs(cur - prev)) / max(np.max(np.abs(cur)), 1e-300))
        prev = cur
        if change < tol:
            break
    else:
        raise QuadratureAccuracyError(f"radial refinement stalled at relative change {change:.2e} (N={N})")
    return ToeplitzMatrix(N, model.kind, cur, n, n_theta, change, bands)


def gram_matrix(model, N, radial_nodes=None):
    """Gram matrix of the orthonormal basis under the quadrature rule."""
    return build_toeplitz_matrix(model, lambda z: np.ones(z.shape), N, radial_nodes).matrix


def diagonalize(T, k=2, check_tail=True):
    """Lowest ``k`` eigenpairs of a Hermitian Toeplitz matrix.

    For the Bargmann model the basis is truncated; a warning is emitted when
    an eigenvector carries more than ``1e-12`` of its mass in the top tenth of
    the basis.
    """
    M = T.matrix if isinstance(T, ToeplitzMatrix) else np.asarray(T)
    k = min(k, M.shape[0])
    w, V = scipy.linalg.eigh(M, subset_by_index=[0, k - 1], driver="evr")
    if check_tail and isinstance(T, ToeplitzMatrix) and T.kind == "bargmann":
        top = int(0.9 * M.shape[0])
        tail = np.sum(np.abs(V[top:, :]) ** 2, axis=0)
        if np.any(tail > 1e-12):
            warnings.warn(f"basis truncation: eigenvector tail mass {tail.max():.2e}", RuntimeWarning)
    return SpectralResult(w, V)


def _log_gammainc_lower(a, x):
    # log of the regularized lower incomplete gamma P(a, x), stable when tiny
    a = np.asarray(a, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.log(gammainc(a, x))
    bad = ~np.isfinite(out) | (out < -600)
    if np.any(bad):
        ab = a[bad]
        j = np.arange(4000)[None, :]
        logterms = np.cumsum(np.log(x) - np.log(ab[:, None] + 1 + j), axis=1)
        logterms = np.concatenate([np.zeros((ab.size, 1)), logterms[:, :-1]], axis=1)
        s = scipy.special.logsumexp(logterms, axis=1)
        out[bad] = ab * np.log(x) - x - gammaln(ab + 1) + s
    return out


def _log_betainc(a, b, t):
    # log I_t(a, b) with the hypergeometric series where the direct value underflows
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.log(betainc(a, b, t))
    bad = ~np.isfinite(out) | (out < -600)
    if np.any(bad):
        ab, bb = a[bad], b[bad]
        j = np.arange(4000)[None, :]
        logterms = np.cumsum(np.log(t) + np.log(ab[:, None] + bb[:, None] + j) - np.log(ab[:, None] + 1 + j), axis=1)
        logterms = np.concatenate([np.zeros((ab.size, 1)), logterms[:, :-1]], axis=1)
        s = scipy.special.logsumexp(logterms, axis=1)
        out[bad] = ab * np.log(t) + bb * np.log1p(-t) - np.log(ab) - betaln(ab, bb) + s
    return out


def log_disk_mass(model, N, radius):
    """``log`` of the fraction of ``|z^k|^2`` carried by the disk ``|z| < radius``."""
    k = np.arange(model.dim(N), dtype=float)
    if model.kind == "bargmann":
        return _log_gammainc_lower(k + 1, N * radius**2)
    t = radius**2 / (1 + radius**2)
    return _log_betainc(k + 1, N - k + 1, t)


def embed_quasimode(model, quasimode, radius=None, warn_tol=1e-5):
    """Coefficient vector of a quasimode cut off to a disk.

    The quasimode is ``exp(N phi) U`` times the coherent state at the well,
    which is the constant section in both models.  For a rotation-invariant
    cutoff the inner product with ``e_n`` only sees the ``n``-th Taylor
    coefficient, so ``v_n = F_n |z^n| P_n`` where ``P_n`` is the fraction of
    ``|z^n|^2`` inside the disk.  The computation runs in the rescaled
    variable ``s = z / radius``.
    """
    N = quasimode.N
    rho = float(radius if radius is not None else quasimode.radius)
    n = model.dim(N)
    phi = quasimode.phi.coeffs
    amp = quasimode.amplitude.coeffs
    scale_phi = rho ** np.arange(phi.size)
    scale_amp = rho ** np.arange(amp.size)
    p = N * phi * scale_phi
    p[0] = 0.0
    expo = _kernels.exp_series(p, n)
    G = np.convolve(expo, amp * scale_amp)[:n]
    logfac = 0.5 * model.log_norm_sq(N) - np.arange(n) * np.log(rho) + log_disk_mass(model, N, rho)
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        v = G * np.exp(logfac)
    v[~np.isfinite(v)] = 0.0
    # weighted amplitude on the boundary circle, relative to the value at the well
    theta = 2 * np.pi * np.arange(256) / 256
    s = np.exp(1j * theta)
    Gs = np.polynomial.polynomial.polyval(s, G)
    bw = float(np.max(np.abs(Gs)) * np.exp(-N * model.kahler_potential(rho)))
    k = np.arange(n)
    outside = -np.expm1(np.minimum(log_disk_mass(model, N, rho), 0.0))
    with np.errstate(over="ignore", invalid="ignore"):
        full = np.abs(G) ** 2 * np.exp(model.log_norm_sq(N) - 2 * k * np.log(rho))
    full[~np.isfinite(full)] = 0.0
    tail = float(np.sum(full * outside) / max(np.sum(full), 1e-300))
    if bw > warn_tol:
        warnings.warn(f"disk radius {rho:.3g} may be too small: boundary weight {bw:.2e}", RuntimeWarning)
    return EmbeddedQuasimode(v, rho, bw, tail)


def residual_norm(T, v, lam):
    """``|T v - lam v| / |v|`` and ``dist(lam, spectrum)`` when cheap.

    By the spectral theorem the distance never exceeds the residual.
    """
    M = T.matrix if isinstance(T, ToeplitzMatrix) else np.asarray(T)
    v = np.asarray(v)
    nv = np.linalg.norm(v)
    r = np.linalg.norm(M @ v - lam * v) / nv
    return float(r)
