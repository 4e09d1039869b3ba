"""Sweeps over N comparing WKB data with exact Toeplitz spectra.

Each sweep takes an :class:`ExperimentConfig`, returns rows (one per ``N``)
plus fitted exponential rates, and never depends on wall-clock state, so
re-running a config reproduces its CSV byte for byte.

Rate fits drop floor-limited points (value below ``floor``) and, unless an
explicit window is given, the smallest ``skip_first`` levels.
"""
import csv
import hashlib
import io
import json
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, _kernels
from .errors import ConfigError, InsufficientDataError, ToeplitzWKBError
from .kahler_models import make_model
from .quantization import build_toeplitz_matrix, diagonalize, embed_quasimode, residual_norm
from .symbols import FAMILIES, make_symbol
from .wkb_engine import build_wkb, compute_lambda0

__all__ = [
    "ExperimentConfig",
    "RateFit",
    "SweepResult",
    "ExperimentError",
    "config_from_dict",
    "load_config",
    "fit_log_linear",
    "residual_sweep",
    "tunnelling_gap_sweep",
    "gap_family_sweep",
    "low_lying_count",
    "decay_profile",
    "write_csv",
    "thread_count",
]

FLOOR = 1e-13


class ExperimentError(ToeplitzWKBError):
    """A sweep produced data contradicting its own preconditions."""


@dataclass
class ExperimentConfig:
    model: str
    symbol: str
    params: dict = field(default_factory=dict)
    N: list = field(default_factory=list)
    K: int = 10
    D: int = None
    c: float = None
    radius: float = None
    well: str = None
    fit_window: list = None
    skip_first: int = 1
    floor: float = FLOOR
    eps: float = None
    germ_degree: int = 120
    variants: list = None
    rays: int = 8
    radii: int = 24
    seed: int = None

    def to_dict(self):
        return asdict(self)

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()


_TYPES = {
    "model": str,
    "symbol": str,
    "params": dict,
    "N": list,
    "K": int,
    "D": int,
    "c": float,
    "radius": float,
    "well": str,
    "fit_window": list,
    "skip_first": int,
    "floor": float,
    "eps": float,
    "germ_degree": int,
    "variants": list,
    "rays": int,
    "radii": int,
    "seed": int,
}


def _check_type(path, value, typ):
    if typ is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if typ is int and isinstance(value, bool):
        raise ConfigError(path, "expected an integer")
    if not isinstance(value, typ):
        raise ConfigError(path, f"expected {typ.__name__}, got {type(value).__name__}")
    return value


def _int_list(path, seq):
    out = []
    for i, v in enumerate(seq):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{path}[{i}]", "expected an integer")
        if v < 1:
            raise ConfigError(f"{path}[{i}]", "levels must be positive")
        out.append(v)
    return out


def config_from_dict(d):
    """Validate a mapping (parsed JSON or TOML) into an :class:`ExperimentConfig`."""
    if not isinstance(d, dict):
        raise ConfigError("<root>", "configuration must be a table")
    unknown = sorted(set(d) - set(_TYPES))
    if unknown:
        raise ConfigError(unknown[0], "unknown field")
    for req in ("model", "symbol", "N"):
        if req not in d:
            raise ConfigError(req, "missing required field")
    kw = {}
    for key, value in d.items():
        if value is None:
            continue
        kw[key] = _check_type(key, value, _TYPES[key])
    if kw["model"] not in ("bargmann", "cp1"):
        raise ConfigError("model", "must be 'bargmann' or 'cp1'")
    if kw["symbol"] not in FAMILIES:
        raise ConfigError("symbol", f"unknown family; known: {sorted(FAMILIES)}")
    fam = FAMILIES[kw["symbol"]]
    if fam.model_kind != kw["model"]:
        raise ConfigError("symbol", f"family {fam.name!r} lives on {fam.model_kind!r}")
    Ns = _int_list("N", kw["N"])
    if not Ns:
        raise ConfigError("N", "need at least one level")
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ConfigError("N", "levels must be strictly increasing")
    kw["N"] = Ns
    if "fit_window" in kw:
        fw = _int_list("fit_window", kw["fit_window"])
        for i, v in enumerate(fw):
            if v not in Ns:
                raise ConfigError(f"fit_window[{i}]", f"level {v} is not in N")
        kw["fit_window"] = fw
    if kw.get("K", 10) < 0:
        raise ConfigError("K", "must be non-negative")
    if "c" in kw and kw["c"] <= 0:
        raise ConfigError("c", "must be positive")
    if "radius" in kw and kw["radius"] <= 0:
        raise ConfigError("radius", "must be positive")
    if "variants" in kw:
        for i, v in enumerate(kw["variants"]):
            if not isinstance(v, dict):
                raise ConfigError(f"variants[{i}]", "expected a table of parameters")
    try:
        sym = make_symbol(kw["symbol"], **kw.get("params", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError("params", str(exc)) from None
    if "well" in kw and kw["well"] not in sym.wells:
        raise ConfigError("well", f"must be one of {sym.wells}")
    return ExperimentConfig(**kw)


def load_config(path):
    """Read a JSON or TOML config file."""
    path = os.fspath(path)
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        if path.endswith(".toml"):
            try:
                import tomllib
            except ModuleNotFoundError:  # Python < 3.11
                import tomli as tomllib
            data = tomllib.loads(raw.decode())
        else:
            data = json.loads(raw)
    except ValueError as exc:
        raise ConfigError("<file>", f"parse error: {exc}") from None
    return config_from_dict(data)


# -- fitting -----------------------------------------------------------------


@dataclass
class RateFit:
    """``log y = intercept + slope N``; ``rate = -slope``."""

    slope: float
    stderr: float
    intercept: float
    r2: float
    window: list
    excluded: list
    rule: str
    status: str = "ok"

    @property
    def rate(self):
        return -self.slope

    def to_dict(self):
        d = asdict(self)
        d["rate"] = self.rate
        return d


def fit_log_linear(Ns, values, window=None, floor=FLOOR, skip_first=1):
    """Least-squares fit of ``log(values)`` against ``N``.

    Without an explicit ``window`` the first ``skip_first`` levels are
    treated as preasymptotic.  Points below ``floor`` are dropped in every
    case.  If every point is floor-limited the fit has status ``"exact"``.
    """
    Ns = np.asarray(Ns, dtype=float)
    y = np.asarray(values, dtype=float)
    if window is None:
        keep = np.arange(Ns.size) >= skip_first
        rule = f"skip first {skip_first} level(s); drop values below {floor:g}"
    else:
        keep = np.isin(Ns, np.asarray(window, dtype=float))
        rule = f"explicit window; drop values below {floor:g}"
    floored = y < floor
    if np.all(floored):
        return RateFit(np.nan, np.nan, np.nan, np.nan, [], Ns.astype(int).tolist(), rule, "exact")
    use = keep & ~floored & np.isfinite(y)
    excluded = Ns[~use].astype(int).tolist()
    if use.sum() < 3:
        raise InsufficientDataError(f"only {int(use.sum())} usable points for a rate fit")
    x, ly = Ns[use], np.log(y[use])
    A = np.stack([np.ones_like(x), x], axis=1)
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    fit = A @ coef
    ss_res = float(np.sum((ly - fit) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    dof = max(1, x.size - 2)
    sigma2 = ss_res / dof
    stderr = float(np.sqrt(sigma2 / np.sum((x - x.mean()) ** 2)))
    status = "ok" if coef[1] < 0 else "non-decaying"
    return RateFit(float(coef[1]), stderr, float(coef[0]), float(min(max(r2, 0.0), 1.0)),
                   x.astype(int).tolist(), excluded, rule, status)


# -- plumbing -----------------------------------------------------------------


@dataclass
class SweepResult:
    kind: str
    columns: list
    rows: list
    fits: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def column(self, name):
        return np.array([r[name] for r in self.rows])

    def report(self):
        return {
            "kind": self.kind,
            "fits": {k: (v.to_dict() if isinstance(v, RateFit) else v) for k, v in self.fits.items()},
            "meta": self.meta,
        }


def thread_count():
    """Worker count from ``TOEPLITZ_WKB_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("TOEPLITZ_WKB_THREADS", "1")))
    except ValueError:
        return 1


def _map_levels(fn, Ns):
    n = thread_count()
    if n == 1 or len(Ns) == 1:
        return [fn(N) for N in Ns]
    with ThreadPoolExecutor(max_workers=n) as pool:
        # map preserves input order, so rows are merged in N-order
        return list(pool.map(fn, Ns))


def _provenance(cfg):
    return {
        "config_sha256": cfg.digest(),
        "version": __version__,
        "numba": bool(_kernels.USE_NUMBA),
        "config": cfg.to_dict(),
    }


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(result, path_or_buf=None):
    """RFC 4180 CSV of the rows; returns the text when no path is given."""
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(result.columns)
    for r in result.rows:
        w.writerow([_fmt(r[c]) for c in result.columns])
    text = buf.getvalue()
    if path_or_buf is None:
        return text
    with open(path_or_buf, "w", newline="") as fh:
        fh.write(text)
    return text


def _setup(cfg):
    model = make_model(cfg.model)
    sym = make_symbol(cfg.symbol, **cfg.params)
    well = cfg.well or sym.wells[0]
    return model, sym, well


def _orient(vec, well):
    # the south chart x' = 1/x maps z^k to z^(N-k) with equal norms
    return vec[::-1] if well == "south" else vec


def _hermitian_slack(T):
    return 64 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(T.matrix))))


# -- sweeps ----------------------------------------------------------------------


def residual_sweep(cfg, wkb=None):
    """Quasimode residual and eigenvalue error against the exact matrix.

    Columns: ``N, residual, minSp, lambdaN, gapToSpec, kmax, boundary_weight``.
    ``gapToSpec <= residual`` is the Hermitian bound and is checked per row.
    """
    model, sym, well = _setup(cfg)
    if wkb is None:
        wkb = build_wkb(model, sym.germ(cfg.germ_degree, well), K=cfg.K, D=cfg.D, radius=cfg.radius)

    def one(N):
        T = build_toeplitz_matrix(model, sym, N)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            sp = diagonalize(T, 1)
            q = wkb.quasimode(N, c=cfg.c)
            emb = embed_quasimode(model, q, warn_tol=np.inf)
        v = _orient(emb.vector, well)
        res = residual_norm(T, v, q.lam)
        gap = abs(sp.min - q.lam)
        if gap > res + _hermitian_slack(T):
            raise ExperimentError(f"Hermitian bound violated at N={N}: {gap:.3e} > {res:.3e}")
        return {
            "N": int(N),
            "residual": res,
            "minSp": sp.min,
            "lambdaN": q.lam,
            "gapToSpec": gap,
            "kmax": q.kmax,
            "boundary_weight": emb.boundary_weight,
        }

    rows = _map_levels(one, cfg.N)
    cols = ["N", "residual", "minSp", "lambdaN", "gapToSpec", "kmax", "boundary_weight"]
    Ns = [r["N"] for r in rows]
    fits = {}
    for key in ("residual", "gapToSpec"):
        try:
            fits[key] = fit_log_linear(Ns, [r[key] for r in rows], cfg.fit_window, cfg.floor, cfg.skip_first)
        except InsufficientDataError as exc:
            fits[key] = {"status": "insufficient", "message": str(exc)}
    meta = _provenance(cfg)
    meta.update({
        "well": well,
        "lambda": wkb.lambdas.real.tolist(),
        "lambda_imag_max": wkb.info["lambda_imag_max"],
        "radius": wkb.hj.radius,
        "admissibility": wkb.hj.t,
        "c": cfg.c if cfg.c is not None else wkb.default_c(),
        "class_params": wkb.params.to_json() if wkb.params is not None else None,
    })
    return SweepResult("residual-sweep", cols, rows, fits, meta)


def tunnelling_gap_sweep(cfg, params=None):
    """``lambda_1 - lambda_0`` of the exact matrix against ``N``.

    Rows whose gap is below the floor are flagged ``floor_limited``; when all
    rows are, the fit reports status ``"exact"`` (a degenerate doublet).
    """
    model = make_model(cfg.model)
    sym = make_symbol(cfg.symbol, **(params if params is not None else cfg.params))

    def one(N):
        T = build_toeplitz_matrix(model, sym, N)
        sp = diagonalize(T, 2, check_tail=False)
        gap = sp.gap
        return {
            "N": int(N),
            "lambda0": float(sp.eigenvalues[0]),
            "lambda1": float(sp.eigenvalues[1]),
            "gap": gap,
            "floor_limited": bool(gap < cfg.floor),
        }

    rows = _map_levels(one, cfg.N)
    cols = ["N", "lambda0", "lambda1", "gap", "floor_limited"]
    try:
        fit = fit_log_linear([r["N"] for r in rows], [r["gap"] for r in rows], cfg.fit_window, cfg.floor, cfg.skip_first)
    except InsufficientDataError as exc:
        fit = {"status": "insufficient", "message": str(exc)}
    meta = _provenance(cfg)
    meta["params"] = sym.params
    meta["max_gap"] = max(r["gap"] for r in rows)
    return SweepResult("gap-sweep", cols, rows, {"gap": fit}, meta)


def gap_family_sweep(cfg):
    """One gap sweep per entry of ``cfg.variants`` (parameter overrides).

    Reports every fitted rate ``sigma`` and whether the rates decrease
    strictly along the list.
    """
    variants = cfg.variants or [{}]
    results = []
    for v in variants:
        params = dict(cfg.params)
        params.update(v)
        results.append(tunnelling_gap_sweep(cfg, params))
    rows = []
    sig = []
    for i, res in enumerate(results):
        fit = res.fits["gap"]
        s = fit.rate if isinstance(fit, RateFit) else np.nan
        sig.append(s)
        for r in res.rows:
            rows.append({"variant": i, **r})
    finite = [s for s in sig if np.isfinite(s)]
    decreasing = len(finite) == len(sig) and all(b < a for a, b in zip(sig, sig[1:]))
    meta = _provenance(cfg)
    meta["sigma"] = sig
    meta["strictly_decreasing"] = bool(decreasing)
    fits = {f"variant{i}": r.fits["gap"] for i, r in enumerate(results)}
    return SweepResult("gap-sweep", ["variant", "N", "lambda0", "lambda1", "gap", "floor_limited"], rows, fits, meta)


def low_lying_count(cfg):
    """Eigenvalues in ``[0, (min lambda_0 + eps)/N]`` against the wells.

    ``lambda_0`` is computed at every well; the expected count is the number
    of wells attaining the minimum.  ``eps`` defaults to half the distance
    to the next distinct ``lambda_0`` capped by half the harmonic spacing.
    A row is ``ambiguous`` when an eigenvalue lies within ``1e-3/N`` of the
    window edge.
    """
    model, sym, _ = _setup(cfg)
    lam0 = {}
    spacing = []
    for w in sym.wells:
        wk = build_wkb(model, sym.germ(24, w), K=0, D=6)
        lam0[w] = wk.lambda0
        spacing.append(wk.transport_frequency.real)
    vals = np.array(list(lam0.values()))
    lo = float(vals.min())
    expected = int(np.sum(vals <= lo + 1e-9 * max(1.0, abs(lo))))
    eps = cfg.eps
    if eps is None:
        above = vals[vals > lo + 1e-9 * max(1.0, abs(lo))]
        eps = 0.5 * min(spacing)
        if above.size:
            eps = min(eps, 0.5 * float(above.min() - lo))

    def one(N):
        T = build_toeplitz_matrix(model, sym, N)
        k = min(T.dim, expected + 4)
        ev = diagonalize(T, k, check_tail=False).eigenvalues
        top = (lo + eps) / N
        count = int(np.sum(ev <= top))
        near = bool(np.any(np.abs(ev - top) < 1e-3 / N))
        return {"N": int(N), "count": count, "expected": expected, "match": count == expected,
                "window_top": top, "ambiguous": near}

    rows = _map_levels(one, cfg.N)
    meta = _provenance(cfg)
    meta.update({"lambda0": lam0, "eps": eps, "all_match": all(r["match"] for r in rows)})
    return SweepResult("count", ["N", "count", "expected", "match", "window_top", "ambiguous"], rows, {}, meta)


def _section_log_abs(model, N, v, z):
    # log |sum v_k z^k/|z^k|| - N phi_K(z), evaluated with a running max
    k = np.arange(v.size)
    lognorm = 0.5 * model.log_norm_sq(N)
    out = np.empty(z.shape)
    for idx, zz in np.ndenumerate(z):
        if zz == 0:
            terms = np.array([v[0] * np.exp(-lognorm[0])])
        else:
            logmag = np.log(np.abs(v) + 1e-320) + k * np.log(abs(zz)) - lognorm
            m = logmag.max()
            terms = np.exp(logmag - m) * np.exp(1j * (np.angle(v) + k * np.angle(zz)))
            out[idx] = m + np.log(abs(terms.sum()) + 1e-320) - N * model.kahler_potential(zz)
            continue
        out[idx] = np.log(abs(terms.sum()) + 1e-320)
    return out


def decay_profile(cfg, N=None):
    """Decay rate of the exact ground state along rays from the well.

    ``rate(x) = -(log(|u(x)| e^{-N phi_K(x)}) - log|u(0)|)/N`` is compared
    with the WKB prediction ``phi_K(x) - Re phi(x)``.  Rows carry the
    direction, radius, both rates and whether the point lies inside the
    half-admissible disk.  The plateau level is the median rate over the
    outer quarter of the sampled radii.
    """
    model, sym, well = _setup(cfg)
    N = cfg.N[-1] if N is None else N
    wkb = build_wkb(model, sym.germ(cfg.germ_degree, well), K=min(cfg.K, 2), radius=cfg.radius)
    T = build_toeplitz_matrix(model, sym, N)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        v = _orient(diagonalize(T, 1).vectors[:, 0], well)
    rho = wkb.hj.radius
    rmax = 2.0 * rho if model.kind == "cp1" else min(2.0 * rho, 3.0)
    radii = rmax * np.arange(1, cfg.radii + 1) / cfg.radii
    angles = 2 * np.pi * np.arange(cfg.rays) / cfg.rays
    z = radii[None, :] * np.exp(1j * angles)[:, None]
    la = _section_log_abs(model, N, v, z)
    l0 = _section_log_abs(model, N, v, np.zeros(1, dtype=complex))[0]
    rate = -(la - l0) / N
    pred = model.kahler_potential(z) - np.real(wkb.hj.phi.evaluate(z))
    rows = []
    for i, a in enumerate(angles):
        for j, r in enumerate(radii):
            rows.append({
                "angle": float(a),
                "radius": float(r),
                "rate": float(rate[i, j]),
                "predicted": float(pred[i, j]),
                "inside_half_disk": bool(r <= 0.5 * rho),
            })
    outer = rate[:, radii >= 0.75 * rmax]
    meta = _provenance(cfg)
    meta.update({"N": int(N), "radius": rho, "plateau": float(np.median(outer)), "well": well})
    cols = ["angle", "radius", "rate", "predicted", "inside_half_disk"]
    return SweepResult("profile", cols, rows, {}, meta)
