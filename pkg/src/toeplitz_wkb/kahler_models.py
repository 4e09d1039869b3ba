"""The two Kähler models: the Bargmann plane and CP^1 in the affine chart.

Both use a measure normalized so that the constant section has norm one:

* Bargmann: ``dmu_N = (N/pi) exp(-N|z|^2) dL``, ``|z^k|^2 = k!/N^k``,
  Bergman kernel ``exp(N x conj(y))``.
* CP^1: ``dmu_N = (N+1) (1+|z|^2)^{-N} dL / (pi (1+|z|^2)^2)``,
  ``|z^k|^2 = 1/binom(N, k)``, Bergman kernel ``(1 + x conj(y))^N``.

In both cases the Toeplitz operator reads

    T_N(f) u(x) = p_N (N/pi) \\int exp(N(2 phi~(x, ybar) - 2 phi(y))) rho(y) f(y) u(y) dL(y)

with ``phi = |x|^2/2`` or ``log(1+|x|^2)/2``, density ``rho = 1`` or
``(1+|y|^2)^{-2}``, and prefactor ``p_N = 1`` or ``1 + 1/N``.  The prefactor is
the Bergman symbol ``(1)`` or ``(1, 1)``; the density enters the amplitude.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, roots_legendre

from .series_core import PowerSeries
from .symbol_calculus import AnalyticSymbol


@lru_cache(maxsize=64)
def _gauss_legendre(n):
    t, w = roots_legendre(n)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def _ladder(n):
    # round up to a power of two so node sets are shared between levels
    return int(2 ** max(7, int(np.ceil(np.log2(n)))))

__all__ = ["KahlerModel", "Bargmann", "CP1", "RadialRule", "make_model", "projector_defect"]


@dataclass
class RadialRule:
    """Radial nodes with log-weights for the rotation-averaged measure.

    ``sum_i exp(logw[i]) g(r[i])`` approximates ``\\int g(|z|) dmu_N(z)`` for
    radial ``g``.
    """

    r: np.ndarray
    logw: np.ndarray
    nodes: int


class KahlerModel:
    kind = None

    def __init__(self, germ_degree=64):
        self.germ_degree = germ_degree

    # -- germs --------------------------------------------------------------

    def potential(self, D=None):
        """Kähler potential as a germ in ``(x, xbar)``."""
        raise NotImplementedError

    def polarization(self, D=None):
        """Holomorphic extension ``phi~(x, wbar)`` of the potential."""
        from .series_core import polarize

        return polarize(self.potential(D))

    def density(self, D=None):
        """Polarized density ``rho~(x, wbar)`` of the measure against ``dL/pi``."""
        raise NotImplementedError

    def bergman_symbol(self, K=2, D=None):
        raise NotImplementedError

    def prefactor(self, N):
        raise NotImplementedError

    # -- Hilbert space data ---------------------------------------------------

    def dim(self, N):
        raise NotImplementedError

    def log_norm_sq(self, N, k=None):
        """``log |z^k|^2`` for ``k = 0..dim-1`` (or the given ``k``)."""
        raise NotImplementedError

    def basis_norms(self, N):
        return np.exp(0.5 * self.log_norm_sq(N))

    def kernel(self, N, x, y):
        """Bergman kernel ``S_N(x, y)`` (holomorphic in ``x``)."""
        raise NotImplementedError

    def kahler_potential(self, z):
        raise NotImplementedError

    def coherent_state(self, N, x0):
        """Coefficients of ``S_N(., x0)`` in the orthonormal monomial basis."""
        k = np.arange(self.dim(N))
        lognorm = 0.5 * self.log_norm_sq(N)
        x0 = complex(x0)
        if x0 == 0:
            out = np.zeros(k.size, dtype=np.complex128)
            out[0] = 1.0 / np.exp(lognorm[0])
            return out
        mag = np.exp(k * np.log(abs(x0)) - lognorm)
        return mag * np.exp(-1j * k * np.angle(x0))

    def polarized_potential_value(self, x, wbar):
        raise NotImplementedError

    def phase_phi1(self, x, y, wbar, zbar):
        """``2phi~(x,wbar) - 2phi~(y,wbar) + 2phi~(y,zbar) - 2phi~(x,zbar)``."""
        p = self.polarized_potential_value
        return 2 * (p(x, wbar) - p(y, wbar) + p(y, zbar) - p(x, zbar))

    # -- quadrature -----------------------------------------------------------

    def radial_rule(self, N, nodes):
        raise NotImplementedError

    def default_radial_nodes(self, N):
        raise NotImplementedError

    def angular_nodes(self, N):
        """Trapezoid size, exact for the trigonometric content of the basis."""
        return 2 * (N + self.dim(N) - 1) + 1

    def log_basis_on_rule(self, N, rule):
        """``log E_k(r_i)`` with ``E_k = r^k / |z^k| * sqrt(w_i)``."""
        k = np.arange(self.dim(N))[:, None]
        return k * np.log(rule.r)[None, :] - 0.5 * self.log_norm_sq(N)[:, None] + 0.5 * rule.logw[None, :]

    max_working_radius = 1.0


class Bargmann(KahlerModel):
    """Bargmann space on ``C`` with potential ``|x|^2/2``."""

    kind = "bargmann"
    max_working_radius = 3.0

    def __init__(self, germ_degree=64, basis_cap=None):
        super().__init__(germ_degree)
        # basis_cap(N) -> largest monomial degree kept
        self.basis_cap = basis_cap if basis_cap is not None else (lambda N: 8 * N + 64)

    def potential(self, D=None):
        D = self.germ_degree if D is None else D
        return PowerSeries.from_terms({(1, 1): 0.5}, 2, D)

    def density(self, D=None):
        D = self.germ_degree if D is None else D
        return PowerSeries.constant(1.0, 2, D)

    def bergman_symbol(self, K=2, D=None):
        D = self.germ_degree if D is None else D
        vals = [1.0] + [0.0] * K
        return AnalyticSymbol.constant(vals, 2, D)

    def prefactor(self, N):
        return 1.0

    def dim(self, N):
        return int(self.basis_cap(N)) + 1

    def log_norm_sq(self, N, k=None):
        k = np.arange(self.dim(N)) if k is None else np.asarray(k)
        return gammaln(k + 1) - k * np.log(N)

    def kernel(self, N, x, y):
        return np.exp(N * np.asarray(x) * np.conj(y))

    def kahler_potential(self, z):
        return 0.5 * np.abs(z) ** 2

    def polarized_potential_value(self, x, wbar):
        return 0.5 * np.asarray(x) * np.asarray(wbar)

    def radial_rule(self, N, nodes):
        cap = self.dim(N) - 1
        rmax = np.sqrt((cap + 1 + 12 * np.sqrt(cap + 1) + 60) / N)
        t, w = _gauss_legendre(int(nodes))
        r = 0.5 * rmax * (t + 1)
        w = 0.5 * rmax * w
        logw = np.log(2 * N * r * w) - N * r**2
        return RadialRule(r, logw, nodes)

    def default_radial_nodes(self, N):
        cap = self.dim(N) - 1
        rmax = np.sqrt((cap + 1 + 12 * np.sqrt(cap + 1) + 60) / N)
        return _ladder(6 * rmax * np.sqrt(2 * N))


class CP1(KahlerModel):
    """Projective line with the Fubini-Study potential ``log(1+|x|^2)/2``."""

    kind = "cp1"
    max_working_radius = 1.0

    def potential(self, D=None):
        D = self.germ_degree if D is None else D
        t = PowerSeries.from_terms({(1, 1): 1.0}, 2, D)
        return 0.5 * t.log1p()

    def density(self, D=None):
        D = self.germ_degree if D is None else D
        t = PowerSeries.from_terms({(1, 1): 1.0}, 2, D)
        return (1 + t).reciprocal() ** 2

    def bergman_symbol(self, K=2, D=None):
        D = self.germ_degree if D is None else D
        vals = [1.0, 1.0] + [0.0] * max(0, K - 1)
        return AnalyticSymbol.constant(vals[: K + 1], 2, D)

    def prefactor(self, N):
        return (N + 1.0) / N

    def dim(self, N):
        return int(N) + 1

    def log_norm_sq(self, N, k=None):
        k = np.arange(self.dim(N)) if k is None else np.asarray(k)
        return gammaln(k + 1) + gammaln(N - k + 1) - gammaln(N + 1)

    def kernel(self, N, x, y):
        return (1 + np.asarray(x) * np.conj(y)) ** N

    def kahler_potential(self, z):
        return 0.5 * np.log1p(np.abs(z) ** 2)

    def polarized_potential_value(self, x, wbar):
        return 0.5 * np.log(1 + np.asarray(x) * np.asarray(wbar))

    def radial_rule(self, N, nodes):
        # Gauss-Legendre in the polar angle beta, |z| = tan(beta/2)
        t, w = _gauss_legendre(int(nodes))
        beta = 0.5 * np.pi * (t + 1)
        w = 0.5 * np.pi * w
        r = np.tan(beta / 2)
        logw = np.log((N + 1) * w * np.sin(beta) / 2) + 2 * N * np.log(np.cos(beta / 2))
        return RadialRule(r, logw, nodes)

    def default_radial_nodes(self, N):
        return _ladder(10 * np.pi * np.sqrt(N + 1))


def make_model(kind, **kwargs):
    kind = kind.lower()
    if kind == "bargmann":
        return Bargmann(**kwargs)
    if kind in ("cp1", "cp^1", "sphere"):
        return CP1(**kwargs)
    raise ValueError(f"unknown model kind {kind!r}")


def projector_defect(gram):
    """``max |g (g - 1)|`` over the eigenvalues of a Gram matrix.

    For ``P = E E^*`` built from sampled basis vectors, the non-zero spectrum
    of ``P`` equals that of ``G = E^* E``; this is ``|P^2 - P|`` in operator
    norm, and ``trace P = trace G``.
    """
    g = np.linalg.eigvalsh(gram)
    return float(np.max(np.abs(g * (g - 1)))), float(np.real(np.trace(gram)))
