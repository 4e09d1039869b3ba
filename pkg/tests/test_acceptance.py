"""One test per acceptance criterion; each prints a single PASS/FAIL line."""
import time
from fractions import Fraction
from math import factorial, lgamma, log

import numpy as np
import pytest

from toeplitz_wkb.experiments import config_from_dict, gap_family_sweep, low_lying_count, residual_sweep, tunnelling_gap_sweep
from toeplitz_wkb.hamilton_jacobi import assemble_hj_solution
from toeplitz_wkb.kahler_models import make_model
from toeplitz_wkb.quantization import build_toeplitz_matrix, diagonalize, embed_quasimode, residual_norm
from toeplitz_wkb.series_core import PowerSeries, n_terms
from toeplitz_wkb.symbol_calculus import AnalyticSymbol, cauchy_product, cj_norms, critical_c, summate, symbol_inverse
from toeplitz_wkb.symbols import make_symbol
from toeplitz_wkb.transport import TransportProblem, solve_transport
from toeplitz_wkb.wkb_engine import build_wkb, compute_lambda0

import oracles

SPIN = {"model": "cp1", "symbol": "cp1-spin-well", "params": {"ex": 0.5, "chi": [1.0, 2.0]}}


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail, t0):
        with capsys.disabled():
            print(f"\n[criterion {n:2d}] {'PASS' if ok else 'FAIL'}  {detail}  ({time.perf_counter() - t0:.1f} s)")
        assert ok, detail

    return emit


@pytest.fixture(scope="module")
def spin_sweep():
    t0 = time.perf_counter()
    cfg = config_from_dict({**SPIN, "N": list(range(40, 161, 20)), "K": 10, "fit_window": list(range(40, 161, 20))})
    return residual_sweep(cfg), time.perf_counter() - t0


def test_criterion_01_isotropic_exact(report):
    t0 = time.perf_counter()
    m, sym = make_model("bargmann"), make_symbol("isotropic-quadratic")
    wk = build_wkb(m, sym.germ(40), K=6)
    ok = wk.hj.phi.is_zero()
    ok &= abs(wk.u[0].coeffs[0] - 1) < 1e-15 and np.max(np.abs(wk.u[0].coeffs[1:])) < 1e-14
    ok &= all(u.max_abs() < 1e-14 for u in wk.u[1:])
    ok &= np.max(np.abs(wk.lambdas - np.eye(1, wk.K + 1)[0])) < 1e-14
    res = []
    for N in (10, 20, 40):
        T = build_toeplitz_matrix(m, sym, N)
        res.append(residual_norm(T, embed_quasimode(m, wk.quasimode(N, radius=2.5)).vector, 1 / N))
    ok &= max(res) < 1e-11 and time.perf_counter() - t0 < 10
    report(1, bool(ok), f"max residual {max(res):.2e} < 1e-11", t0)


def test_criterion_02_hamilton_jacobi(report):
    t0 = time.perf_counter()
    cases = [("bargmann", make_symbol("anisotropic-quadratic", a=3.0, b=1.0, c=0.4)), ("cp1", make_symbol("cp1-spin-well", ex=0.5))]
    worst, deg = 0.0, 99
    for kind, sym in cases:
        h = assemble_hj_solution(make_model(kind), sym.germ(24), 17)
        worst = max(worst, h.residuals["hj"], h.residuals["gradient"])
        deg = min(deg, h.residuals["degree"])
    ok = worst < 1e-10 and deg >= 16 and time.perf_counter() - t0 < 30
    report(2, ok, f"HJ/gradient residual {worst:.2e} < 1e-10 through degree {deg}", t0)


def test_criterion_03_lambda0(report):
    t0 = time.perf_counter()
    m = make_model("bargmann")
    Ns = np.array([50.0, 100.0, 200.0])
    V = np.vander(1 / Ns, 3, increasing=True)
    errs = []
    for a, b, c in [(3.0, 1.0, 0.0), (2.0, 0.7, 0.3), (1.0, 4.0, -0.5)]:
        sym = make_symbol("anisotropic-quadratic", a=a, b=b, c=c)
        lam0 = compute_lambda0(m, sym.germ(12))
        vals = [N * diagonalize(build_toeplitz_matrix(m, sym, int(N)), 1).min for N in Ns]
        extrap = np.linalg.solve(V, vals)[0]
        errs.append(abs(lam0 - extrap))
    ok = max(errs) < 1e-6 and time.perf_counter() - t0 < 60
    report(3, ok, f"max |lambda0 - extrapolated N minSp| {max(errs):.2e} < 1e-6", t0)


def test_criterion_04_residual_decay(report, spin_sweep):
    t0 = time.perf_counter()
    r, elapsed = spin_sweep
    fit = r.fits["residual"]
    res = r.column("residual")
    drop = res[0] / res[-1]
    ok = fit.slope < 0 and fit.r2 >= 0.98 and drop >= 1e3 and elapsed < 600
    report(4, ok, f"c' = {fit.rate:.4f} > 0, R^2 = {fit.r2:.4f} >= 0.98, residual(40)/residual(160) = {drop:.2e} >= 1e3", t0 - elapsed)


def test_criterion_05_eigenvalue_proximity(report, spin_sweep):
    t0 = time.perf_counter()
    r, _ = spin_sweep
    bound = bool(np.all(r.column("gapToSpec") <= r.column("residual")))
    ratio = r.fits["gapToSpec"].slope / r.fits["residual"].slope
    ok = bound and 0.5 <= ratio <= 2
    report(5, ok, f"Hermitian bound on every row: {bound}; slope ratio {ratio:.3f} in [0.5, 2]", t0)


def test_criterion_06_transport_oracle(report):
    t0 = time.perf_counter()

    def uni(c, D):
        out = np.zeros(D + 1, dtype=np.complex128)
        out[: len(c)] = [complex(v) for v in c]
        return PowerSeries(out, 1, D)

    u = solve_transport(TransportProblem(np.array([1.0]), [uni([], 12)], uni([0, 1], 12), uni([0, 1], 12)))
    err_exp = np.max(np.abs(u.coeffs - np.array([0] + [1 / factorial(k) for k in range(1, 13)])))

    rng = np.random.default_rng(2024)
    err_rat = 0.0
    for _ in range(20):
        D = int(rng.integers(2, 7))
        lam = Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 4)))
        a = [0, 0] + [Fraction(int(v), 3) for v in rng.integers(-3, 4, D - 1)]
        h = [0] + [Fraction(int(v), 2) for v in rng.integers(-3, 4, D)]
        g = [0] + [Fraction(int(v), 5) for v in rng.integers(-5, 6, D)]
        exact = oracles.transport_1d(lam, a, h, g, D)
        v = solve_transport(TransportProblem(np.array([float(lam)]), [uni([float(x) for x in a], D)], uni([float(x) for x in h], D), uni([float(x) for x in g], D)))
        err_rat = max(err_rat, float(np.max(np.abs(v.coeffs - [float(x) for x in exact]))))
    ok = err_exp < 1e-12 and err_rat < 1e-12
    report(6, ok, f"e^x - 1 error {err_exp:.1e}, rational mirror error {err_rat:.1e} (both < 1e-12)", t0)


def _random_symbol(rng, K, R, D=2):
    terms = []
    for k in range(K + 1):
        terms.append(PowerSeries(rng.uniform(-1, 1, n_terms(2, D)) * R**k * factorial(k), 2, D))
    terms[0].coeffs[0] = 1.0 + abs(terms[0].coeffs[0])
    return AnalyticSymbol(terms)


def test_criterion_07_symbol_algebra(report):
    t0 = time.perf_counter()
    R = 10.0
    cR = critical_c(R)
    Ns = np.arange(20, 201, 10)
    pts = [np.array([0.1, -0.2j]), np.array([0.3, 0.05 + 0.1j])]
    slopes, tails, inv = [], [], 0.0
    for seed in range(3):
        rng = np.random.default_rng(100 + seed)
        a, b = _random_symbol(rng, 40, R), _random_symbol(rng, 40, R)
        ab = cauchy_product(a, b)
        mism = [max(abs(summate(ab, N, cR).evaluate(p) - summate(a, N, cR).evaluate(p) * summate(b, N, cR).evaluate(p)) for p in pts) for N in Ns]
        slopes.append(np.polyfit(Ns, np.log(mism), 1)[0])
        tail = [abs(summate(a, N, cR).evaluate(pts[0]) - summate(a, N, cR / 2).evaluate(pts[0])) for N in Ns]
        keep = np.array(tail) > 0
        tails.append(np.polyfit(Ns[keep], np.log(np.array(tail)[keep]), 1)[0])
        small = _random_symbol(rng, 5, 1.0, D=4)
        prod = cauchy_product(small, symbol_inverse(small, check_radius=0))
        unit = np.zeros_like(prod.terms[0].coeffs)
        unit[0] = 1
        scale = max(1.0, max(t.max_abs() for t in small.terms)) ** 2
        inv = max(inv, np.max(np.abs(prod.terms[0].coeffs - unit)) / scale, max(t.max_abs() for t in prod.terms[1:]) / scale)
    ok = max(slopes) < 0 and max(tails) < 0 and inv < 1e-10
    report(7, ok, f"product-mismatch rates {[round(-float(s), 4) for s in slopes]} > 0, tail-change rates {[round(-float(s), 4) for s in tails]} > 0, inverse residual {inv:.1e} < 1e-10", t0)


def test_criterion_08_growth_bounds(report):
    t0 = time.perf_counter()
    m, sym = make_model("cp1"), make_symbol("cp1-spin-well", ex=0.5, chi=[1.0, 2.0])
    wk = build_wkb(m, sym.germ(120), K=10, fit_jmax=10)
    p = wk.params

    def env(j, k):
        return log(p.C) + j * log(p.r) + k * log(p.R) + lgamma(j + k + 1) - p.m * log(j + k + 1)

    worst = -np.inf
    for k, lk in enumerate(wk.lambdas):
        if abs(lk) > 0:
            worst = max(worst, log(abs(lk)) - env(0, k))
    for k, uk in enumerate(wk.u):
        for j, v in enumerate(cj_norms(uk, min(10, uk.degree))):
            if v > 0:
                worst = max(worst, log(v) - env(j, k))
    ok = p.geometric and p.covers and worst <= 1e-9
    report(8, ok, f"(C, r, R) = ({p.C:.3g}, {p.r:.3g}, {p.R:.3g}) covers all lambda_k and |u_k|_Cj (max log excess {worst:.1e}); flag {p.geometric}", t0)


def test_criterion_09_tunnelling(report):
    t0 = time.perf_counter()
    sym_cfg = config_from_dict({"model": "cp1", "symbol": "cp1-double-well", "N": [50, 100, 200, 400]})
    gaps = tunnelling_gap_sweep(sym_cfg).column("gap")
    fam = gap_family_sweep(config_from_dict({
        "model": "cp1", "symbol": "cp1-double-well-perturbed", "params": {"width": 0.15, "height": 0.1},
        "N": list(range(16, 81, 8)), "variants": [{"center": 0.3}, {"center": 0.45}, {"center": 0.6}]}))
    sigma = fam.meta["sigma"]
    positive = all(r["gap"] > 0 for r in fam.rows)
    ok = np.max(gaps) < 1e-10 and positive and min(sigma) > 0 and fam.meta["strictly_decreasing"] and time.perf_counter() - t0 < 600
    report(9, ok, f"symmetric gap max {np.max(gaps):.1e} < 1e-10; bumped slopes {[round(float(s), 4) for s in sigma]} positive and decreasing toward the well", t0)


def test_criterion_10_low_lying_count(report):
    t0 = time.perf_counter()
    m, sym = make_model("cp1"), make_symbol("cp1-asymmetric-double-well", delta=0.25)
    lam0 = [compute_lambda0(m, sym.germ(24, w)) for w in sym.wells]
    eps = 0.5 * abs(lam0[0] - lam0[1])
    r = low_lying_count(config_from_dict({
        "model": "cp1", "symbol": "cp1-asymmetric-double-well", "params": {"delta": 0.25},
        "N": [20, 40, 80, 160, 320], "eps": eps}))
    counts = r.column("count").tolist()
    ok = counts == [1] * len(counts)
    report(10, ok, f"lambda0 = {lam0}, eps = {eps}; counts {counts} all 1", t0)
