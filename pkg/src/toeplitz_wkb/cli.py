"""Command line driver.

    toeplitz-wkb <subcommand> --config FILE [--out DIR] [--plot] [--seed S]

Subcommands: ``wkb``, ``spectrum``, ``residual-sweep``, ``gap-sweep``,
``count``, ``profile``.  Configs are JSON or TOML (see README).  Results go
to ``<out>/<subcommand>.csv`` and ``<out>/<subcommand>.json``.  Failures print
a one-line JSON report on stderr: exit 2 for usage or config errors, 1 for
numerical failures, 3 when a sweep finishes but its rate fit reports a
non-decaying quantity.
"""
import argparse
import json
import logging
import os
import sys
import warnings

import numpy as np

from . import __version__
from .errors import ConfigError, ToeplitzWKBError
from .experiments import (
    RateFit,
    SweepResult,
    decay_profile,
    gap_family_sweep,
    load_config,
    low_lying_count,
    residual_sweep,
    tunnelling_gap_sweep,
    write_csv,
    _provenance,
)
from .kahler_models import make_model
from .quantization import build_toeplitz_matrix, diagonalize
from .symbols import make_symbol
from .wkb_engine import build_wkb

log = logging.getLogger("toeplitz_wkb")

SUBCOMMANDS = ("wkb", "spectrum", "residual-sweep", "gap-sweep", "count", "profile")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, RateFit):
        return _jsonable(obj.to_dict())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _write_json(path, data):
    with open(path, "w") as fh:
        json.dump(_jsonable(data), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _plot(result, path):
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        log.warning("matplotlib not installed; skipping plot")
        return None
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if result.kind == "residual-sweep":
        for key in ("residual", "gapToSpec"):
            ax.semilogy(result.column("N"), result.column(key), "o-", label=key)
        ax.set_xlabel("N")
    elif result.kind == "gap-sweep":
        rows = result.rows
        groups = sorted({r.get("variant", 0) for r in rows})
        for g in groups:
            sel = [r for r in rows if r.get("variant", 0) == g]
            ax.semilogy([r["N"] for r in sel], [max(r["gap"], 1e-300) for r in sel], "o-", label=f"variant {g}")
        ax.set_xlabel("N")
    elif result.kind == "profile":
        for a in sorted({r["angle"] for r in result.rows}):
            sel = [r for r in result.rows if r["angle"] == a]
            ax.plot([r["radius"] for r in sel], [r["rate"] for r in sel], "-")
            ax.plot([r["radius"] for r in sel], [r["predicted"] for r in sel], ":", color="gray")
        ax.set_xlabel("|x|")
    elif result.kind == "wkb":
        ax.semilogy(result.column("k"), np.abs(result.column("lambda")) + 1e-300, "o-")
        ax.set_xlabel("k")
        ax.set_ylabel("|lambda_k|")
    else:
        x = result.columns[0]
        ax.plot(result.column(x), result.column(result.columns[1]), "o-")
        ax.set_xlabel(x)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _spectrum(cfg, k=4):
    model = make_model(cfg.model)
    sym = make_symbol(cfg.symbol, **cfg.params)
    rows = []
    for N in cfg.N:
        T = build_toeplitz_matrix(model, sym, N)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            ev = diagonalize(T, min(k, T.dim)).eigenvalues
        row = {"N": int(N)}
        for i in range(k):
            row[f"e{i}"] = float(ev[i]) if i < ev.size else float("nan")
        rows.append(row)
    return SweepResult("spectrum", ["N"] + [f"e{i}" for i in range(k)], rows, {}, _provenance(cfg))


def _run(args):
    cfg = load_config(args.config)
    name = args.command
    if name == "wkb":
        model = make_model(cfg.model)
        sym = make_symbol(cfg.symbol, **cfg.params)
        well = cfg.well or sym.wells[0]
        wk = build_wkb(model, sym.germ(cfg.germ_degree, well), K=cfg.K, D=cfg.D, radius=cfg.radius)
        data = wk.to_json()
        data["provenance"] = _provenance(cfg)
        rows = [{"k": k, "lambda": float(lk.real)} for k, lk in enumerate(wk.lambdas)]
        result = SweepResult("wkb", ["k", "lambda"], rows, {}, data)
    elif name == "spectrum":
        result = _spectrum(cfg)
    elif name == "residual-sweep":
        result = residual_sweep(cfg)
    elif name == "gap-sweep":
        result = gap_family_sweep(cfg) if cfg.variants else tunnelling_gap_sweep(cfg)
    elif name == "count":
        result = low_lying_count(cfg)
    else:
        result = decay_profile(cfg)
    return result


def build_parser():
    p = argparse.ArgumentParser(prog="toeplitz-wkb", description="WKB quasimodes for Toeplitz operators")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", metavar="subcommand")
    sub.required = True
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON or TOML experiment config")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--plot", action="store_true", help="also write a PNG plot")
        sp.add_argument("--seed", type=int, default=None, help="reserved; all experiments are deterministic")
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def _fail(code, kind, message, path=None):
    report = {"error": kind, "message": message}
    if path is not None:
        report["path"] = path
    print(json.dumps(report), file=sys.stderr)
    return code


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        result = _run(args)
    except ConfigError as exc:
        return _fail(2, "ConfigError", exc.message, exc.path)
    except OSError as exc:
        return _fail(2, "OSError", str(exc))
    except ToeplitzWKBError as exc:
        return _fail(1, type(exc).__name__, str(exc))
    os.makedirs(args.out, exist_ok=True)
    stem = os.path.join(args.out, args.command)
    write_csv(result, stem + ".csv")
    report = result.report()
    _write_json(stem + ".json", report)
    if args.plot:
        _plot(result, stem + ".png")
    bad = [k for k, f in result.fits.items() if isinstance(f, RateFit) and f.status == "non-decaying"]
    if bad and args.command == "residual-sweep":
        return _fail(3, "NonDecaying", f"fitted slope is not negative for {', '.join(bad)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
