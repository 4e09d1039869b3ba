"""Registered symbol families.

Each family gives a real symbol on the model, vectorized over complex
arrays, and its Taylor germ in ``(x, xbar)`` at each of its wells.  Germs
are produced by running the same formula on power series, so the two views
cannot drift apart.

CP^1 symbols are written in the Cartesian coordinates ``(X, Y, Z)`` of the
unit sphere, with the affine chart centred at the north pole ``Z = 1``.  The
chart at the south pole is ``x' = 1/x``, in which ``(X, Y, Z)`` become
``(X, -Y, -Z)``.
"""
import numpy as np

from .series_core import PowerSeries

__all__ = ["SymbolFamily", "make_symbol", "FAMILIES", "bump"]


def bump(s):
    """Standard smooth bump ``e * exp(-1/(1 - s^2))`` on ``|s| < 1``, peak 1."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


def _cp1_numeric(z):
    t = np.abs(z) ** 2
    den = 1 + t
    return 2 * z.real / den, 2 * z.imag / den, (1 - t) / den


def _cp1_series(D, south=False):
    x = PowerSeries.variable(0, 2, D)
    xb = PowerSeries.variable(1, 2, D)
    t = x * xb
    inv = (1 + t).reciprocal()
    X = (x + xb) * inv
    Y = (x - xb) * inv * (-1j)
    Z = (1 - t) * inv
    if south:
        return X, -Y, -Z
    return X, Y, Z


def _poly(coeffs, u):
    # sum_i coeffs[i] * u**(i+1), valid for arrays and series
    acc = None
    p = u
    for c in coeffs:
        term = p * c
        acc = term if acc is None else acc + term
        p = p * u
    return acc


class SymbolFamily:
    """A named symbol with its model, wells and germ generator."""

    name = None
    model_kind = None

    def __init__(self, **params):
        self.params = params

    @property
    def wells(self):
        return ["origin"] if self.model_kind == "bargmann" else ["north"]

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        if self.model_kind == "bargmann":
            return np.real(self._formula(z, np.conj(z)))
        X, Y, Z = _cp1_numeric(z)
        return np.real(self._formula(X, Y, Z)) + self._extra(Z)

    def germ(self, D, well=None):
        well = self.wells[0] if well is None else well
        if self.model_kind == "bargmann":
            if well != "origin":
                raise ValueError("Bargmann symbols have their well at the origin")
            x = PowerSeries.variable(0, 2, D)
            xb = PowerSeries.variable(1, 2, D)
            out = self._formula(x, xb)
        else:
            if well not in ("north", "south"):
                raise ValueError(f"unknown well {well!r}")
            out = self._formula(*_cp1_series(D, south=(well == "south")))
        if not isinstance(out, PowerSeries):
            out = PowerSeries.constant(out, 2, D)
        return out

    def _extra(self, Z):
        return 0.0

    def _formula(self, *args):
        raise NotImplementedError

    def describe(self):
        return {"name": self.name, "model": self.model_kind, "params": self.params}


class IsotropicQuadratic(SymbolFamily):
    name = "isotropic-quadratic"
    model_kind = "bargmann"

    def _formula(self, x, xb):
        return x * xb


class AnisotropicQuadratic(SymbolFamily):
    """``(a q^2 + b p^2 + 2 c q p)/2`` with ``x = q + i p``."""

    name = "anisotropic-quadratic"
    model_kind = "bargmann"

    def __init__(self, a=3.0, b=1.0, c=0.0):
        super().__init__(a=a, b=b, c=c)

    def _formula(self, x, xb):
        a, b, c = self.params["a"], self.params["b"], self.params["c"]
        q = (x + xb) * 0.5
        p = (x - xb) * (-0.5j)
        return (q * q) * (0.5 * a) + (p * p) * (0.5 * b) + (q * p) * c

    def hessian(self):
        a, b, c = self.params["a"], self.params["b"], self.params["c"]
        return np.array([[a, c], [c, b]], dtype=float)


class QuarticWell(SymbolFamily):
    """``|x|^2 + beta |x|^4 + eps (x^4 + xbar^4)``; bounded below for ``|eps| <= beta/2``."""

    name = "quartic-well"
    model_kind = "bargmann"

    def __init__(self, eps=0.1, beta=1.0):
        super().__init__(eps=eps, beta=beta)

    def _formula(self, x, xb):
        eps, beta = self.params["eps"], self.params["beta"]
        t = x * xb
        x2, xb2 = x * x, xb * xb
        return t + (t * t) * beta + (x2 * x2 + xb2 * xb2) * eps


class CP1HeightWell(SymbolFamily):
    """Rotation-invariant well ``sum_i chi[i] (1 - Z)^(i+1)``."""

    name = "cp1-height-well"
    model_kind = "cp1"

    def __init__(self, chi=(1.0,)):
        super().__init__(chi=list(chi))

    def _formula(self, X, Y, Z):
        return _poly(self.params["chi"], 1 - Z)


class CP1SpinWell(SymbolFamily):
    """Anisotropic well ``chi(Z) + ex X^2 + ey Y^2``.

    ``chi(Z) = sum_i chi[i] (1 - Z)^(i+1)``; the minimum at the north pole is
    global when ``chi[0] > 0`` and ``ex, ey >= 0`` with ``chi`` increasing.
    """

    name = "cp1-spin-well"
    model_kind = "cp1"

    def __init__(self, ex=0.5, ey=0.0, chi=(1.0,)):
        super().__init__(ex=ex, ey=ey, chi=list(chi))

    def _formula(self, X, Y, Z):
        p = self.params
        return _poly(p["chi"], 1 - Z) + (X * X) * p["ex"] + (Y * Y) * p["ey"]


class CP1DoubleWell(SymbolFamily):
    """Even double well ``sum_i chi[i] (1 - Z^2)^(i+1)`` with minima at both poles."""

    name = "cp1-double-well"
    model_kind = "cp1"

    def __init__(self, chi=(1.0,)):
        super().__init__(chi=list(chi))

    @property
    def wells(self):
        return ["north", "south"]

    def _formula(self, X, Y, Z):
        return _poly(self.params["chi"], 1 - Z * Z)


class CP1DoubleWellPerturbed(CP1DoubleWell):
    """Even double well plus ``height * bump((Z - center)/width)``.

    The bump is smooth but not analytic; its support must stay away from
    both poles so the germs at the wells are unchanged.
    """

    name = "cp1-double-well-perturbed"

    def __init__(self, chi=(1.0,), center=0.25, width=0.2, height=0.1):
        SymbolFamily.__init__(self, chi=list(chi), center=center, width=width, height=height)
        if abs(center) + width >= 1:
            raise ValueError("bump support must avoid the poles")

    def _extra(self, Z):
        p = self.params
        return p["height"] * bump((Z - p["center"]) / p["width"])


class CP1AsymmetricDoubleWell(SymbolFamily):
    """``(1 - Z^2)(1 + delta Z)``: wells at both poles with different Hessians."""

    name = "cp1-asymmetric-double-well"
    model_kind = "cp1"

    def __init__(self, delta=0.25):
        super().__init__(delta=delta)
        if not 0 <= delta < 1:
            raise ValueError("delta must lie in [0, 1)")

    @property
    def wells(self):
        return ["north", "south"]

    def _formula(self, X, Y, Z):
        return (1 - Z * Z) * (1 + Z * self.params["delta"])


FAMILIES = {
    cls.name: cls
    for cls in (
        IsotropicQuadratic,
        AnisotropicQuadratic,
        QuarticWell,
        CP1HeightWell,
        CP1SpinWell,
        CP1DoubleWell,
        CP1DoubleWellPerturbed,
        CP1AsymmetricDoubleWell,
    )
}


def make_symbol(name, **params):
    try:
        cls = FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown symbol family {name!r}; known: {sorted(FAMILIES)}") from None
    return cls(**params)
