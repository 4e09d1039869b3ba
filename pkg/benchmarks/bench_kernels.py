"""Compare the numba kernels with their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each case checks that both paths agree before timing them.  The first numba
call (compilation or cache load) is excluded from the timings.
"""
import argparse
import json
import time

import numpy as np

from toeplitz_wkb import _kernels
from toeplitz_wkb.kahler_models import make_model
from toeplitz_wkb.series_core import index_table
from toeplitz_wkb.symbols import make_symbol


def _best(fn, repeat):
    ts = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t0)
    return min(ts)


def case_series_mul(nvars=3, degree=22, seed=0):
    rng = np.random.default_rng(seed)
    tab = index_table(nvars, degree)
    n = tab.exps.shape[0]
    a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    args = (a, b, tab.enc, tab.lut, tab.deg, tab.prefix, degree)
    return f"series_mul nvars={nvars} D={degree}", lambda u: _kernels.series_mul(*args, use_numba=u)


def case_band_assemble(N=400):
    model = make_model("cp1")
    sym = make_symbol("cp1-spin-well", ex=0.5)
    rule = model.radial_rule(N, model.default_radial_nodes(N))
    E = np.exp(model.log_basis_on_rule(N, rule))
    nt = model.angular_nodes(N)
    th = 2 * np.pi * np.arange(nt) / nt
    vals = sym(rule.r[:, None] * np.exp(1j * th)[None, :])
    F = np.fft.rfft(vals, axis=1) / nt
    bands = np.arange(5)
    Fb = F[:, bands].T.copy()
    return f"band_assemble cp1 N={N}", lambda u: _kernels.band_assemble(E, Fb, bands, use_numba=u)


def case_exp_series(n=4000, seed=1):
    rng = np.random.default_rng(seed)
    p = np.zeros(40, dtype=np.complex128)
    p[2:] = (rng.standard_normal(38) + 1j * rng.standard_normal(38)) * 0.5 ** np.arange(2, 40)
    return f"exp_series n={n}", lambda u: _kernels.exp_series(p, n, use_numba=u)


def run(repeat=5):
    out = []
    for name, fn in (case_series_mul(), case_band_assemble(), case_exp_series()):
        ref = fn(False)
        got = fn(True)  # warm-up and agreement check
        scale = max(1.0, float(np.max(np.abs(ref))))
        err = float(np.max(np.abs(got - ref))) / scale
        t_np = _best(lambda: fn(False), repeat)
        t_nb = _best(lambda: fn(True), repeat)
        out.append({"case": name, "numpy_s": t_np, "numba_s": t_nb, "speedup": t_np / t_nb, "rel_diff": err})
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None)
    args = ap.parse_args()
    rows = run(args.repeat)
    print(f"{'case':34s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s} {'rel diff':>9s}")
    for r in rows:
        print(f"{r['case']:34s} {r['numpy_s']:10.4f} {r['numba_s']:10.4f} {r['speedup']:8.1f} {r['rel_diff']:9.1e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
