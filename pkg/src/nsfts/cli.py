"""Command-line front end: ``nsfts bench | forecast | generate``.

Exit codes: 0 success, 1 validation or usage error, 2 at least one benchmark cell failed.
All configuration comes from flags and the manifest file.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from . import manifest as mf
from .drift import KINDS, DataError, DriftSpec, generate, read_column
from .evaluation import MetricReport, evaluate
from .model import CheckpointError, NsftsModel, train_nsfts
from .partitioner import PAPER_EXACT, RANGE_PAD, ConfigError

EXIT_OK, EXIT_INVALID, EXIT_CELL = 0, 1, 2
METRIC_GROUPS = ("rmse", "mape_pct", "u1", "u2")
TRACE_COLUMNS = ("t", "y", "yhat", "eps", "fallback", "warmup", "delta_min", "delta_max", "rho_max")


class _Parser(argparse.ArgumentParser):
    # usage errors are validation errors (exit 1), not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


# -- bench -------------------------------------------------------------------

def _run_cell(job):
    """Evaluate one dataset x method cell and write its trace. Never raises."""
    ds_ref, method, params, split, options, trace_dir = job
    try:
        ds = ds_ref.load()
        rep, res = evaluate(method.name, ds, split, params, options["exclude_fallback"],
                            options["mape_percent"], ds_ref.seed)
        y = res.extras["targets"]
        start = len(ds) - len(y)
        extras = res.extras
        buf = io.StringIO()
        w = _writer(buf)
        w.writerow(TRACE_COLUMNS)
        for j in range(len(y)):
            per = [extras[key][j] if key in extras else None for key in ("delta_min", "delta_max", "rho_max")]
            w.writerow([start + j, _num(y[j]), _num(res.forecasts[j]), _num(y[j] - res.forecasts[j]),
                        _num(res.fallback[j]), _num(res.warmup[j]), *map(_num, per)])
        (trace_dir / f"{ds_ref.name}_{method.name}.csv").write_text(buf.getvalue(), encoding="utf-8")
        return rep, None
    except Exception as e:  # isolate the cell
        return None, f"{type(e).__name__}: {e}\n{traceback.format_exc(limit=3)}"


def _report_table(m: mf.Manifest, cells: dict) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(["dataset"] + [f"{g}:{meth.name}" for g in METRIC_GROUPS for meth in m.methods])
    for ds in m.datasets:
        row = [ds.name]
        for g in METRIC_GROUPS:
            for meth in m.methods:
                rep = cells.get((ds.name, meth.name))
                row.append("" if rep is None else _num(rep.row()[g]))
        w.writerow(row)
    return buf.getvalue()


def _cells_table(reps) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(MetricReport.CSV_COLUMNS)
    for rep in reps:
        r = rep.row()
        w.writerow([r[c] if isinstance(r[c], str) else _num(r[c]) for c in MetricReport.CSV_COLUMNS])
    return buf.getvalue()


def _apply_overrides(doc, args):
    if not isinstance(doc, dict):
        raise mf.ManifestError("manifest must be a mapping")
    opts = dict(doc.get("options") or {})
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.no_normalize:
        opts["normalize"] = False
    if args.sigma_squared:
        opts["sigma_squared"] = True
    if args.paper_exact_universe:
        opts["universe"] = PAPER_EXACT
    if args.exclude_fallback:
        opts["exclude_fallback"] = True
    if opts:
        doc["options"] = opts
    return doc


def cmd_bench(args) -> int:
    path = Path(args.manifest)
    try:
        if not path.is_file():
            raise mf.ManifestError(f"manifest not found: {path}")
        try:
            doc = yaml.safe_load(path.read_text(encoding="utf-8"))
        except yaml.YAMLError as e:
            raise mf.ManifestError(f"manifest is not valid YAML: {e}") from None
        m = mf.parse(_apply_overrides(doc, args), path.parent)
    except mf.ManifestError as e:
        print(f"nsfts bench: invalid manifest: {e}", file=sys.stderr)
        return EXIT_INVALID
    out = Path(args.out) if args.out else m.output
    workers = args.workers or m.workers or mf.default_workers()
    if workers < 1:
        print("nsfts bench: --workers must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    trace_dir = out / "trace"
    trace_dir.mkdir(parents=True, exist_ok=True)

    jobs = [(ds, meth, m.params_for(meth), m.defaults["split"], m.options, trace_dir)
            for ds in m.datasets for meth in m.methods]
    if workers == 1 or len(jobs) == 1:
        results = [_run_cell(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            results = list(pool.map(_run_cell, jobs))

    cells, reps, errors = {}, [], []
    for (ds, meth, *_), (rep, err) in zip(jobs, results):
        if err is not None:
            errors.append({"dataset": ds.name, "method": meth.name, "error": err.splitlines()[0]})
            print(f"nsfts bench: cell {ds.name} x {meth.name} failed: {err}", file=sys.stderr)
            continue
        cells[(ds.name, meth.name)] = rep
        reps.append(rep)

    (out / "report.csv").write_text(_report_table(m, cells), encoding="utf-8")
    (out / "cells.csv").write_text(_cells_table(reps), encoding="utf-8")
    doc = {
        "format": "nsfts-report",
        "version": 1,
        "seed": m.seed,
        "split": m.defaults["split"],
        "options": m.options,
        "datasets": [ds.describe() for ds in m.datasets],
        "methods": [{"name": meth.name, "params": m.params_for(meth)} for meth in m.methods],
        "cells": [r.to_json() for r in reps],
        "errors": errors,
    }
    (out / "report.json").write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
    print(f"nsfts bench: {len(reps)}/{len(jobs)} cells ok -> {out}", file=sys.stderr)
    return EXIT_CELL if errors else EXIT_OK


# -- forecast ----------------------------------------------------------------

def cmd_forecast(args) -> int:
    try:
        column = int(args.column) if args.column.lstrip("-").isdigit() else args.column
        if args.model:
            model = NsftsModel.load(args.model)
        else:
            train_y = read_column(args.train, column, args.header)
            model = train_nsfts(np.array(train_y), args.k, args.w, args.padding,
                                PAPER_EXACT if args.paper_exact_universe else RANGE_PAD,
                                not args.no_normalize, args.sigma_squared)
        y = np.array(read_column(args.input, column, args.header), dtype=float)
    except FileNotFoundError as e:
        print(f"nsfts forecast: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (CheckpointError, DataError, ConfigError, ValueError) as e:
        print(f"nsfts forecast: {e}", file=sys.stderr)
        return EXIT_INVALID

    # row t carries the forecast of y[t], issued before y[t] was observed
    prev, prev_fb = model.last_forecast, model.last_fallback
    run = model.run_online(y)
    w = _writer(sys.stdout)
    w.writerow(("t", "y", "forecast", "fallback"))
    for t in range(len(y)):
        w.writerow((t, _num(y[t]), _num(prev), _num(prev_fb)))
        prev, prev_fb = run.forecasts[t], run.fallback[t]
    sys.stdout.flush()
    if args.checkpoint:
        model.save(args.checkpoint)
    return EXIT_OK


# -- generate ----------------------------------------------------------------

def cmd_generate(args) -> int:
    try:
        spec = DriftSpec(args.kind, args.length, args.seed, args.mean, args.stdev, args.magnitude,
                         args.onset, args.variance_magnitude, args.noise_ar)
    except DataError as e:
        print(f"nsfts generate: {e}", file=sys.stderr)
        return EXIT_INVALID
    ds = generate(spec)
    buf = io.StringIO()
    w = _writer(buf)
    if args.header:
        w.writerow(["value"])
    for v in ds.values:
        w.writerow([_num(v)])
    if args.out:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def _model_flags(p):
    p.add_argument("--no-normalize", action="store_true", help="skip membership normalization in defuzzification")
    p.add_argument("--sigma-squared", action="store_true", help="use the residual variance instead of the stdev")
    p.add_argument("--paper-exact-universe", action="store_true",
                   help="universe [0.8*min, 1.2*max] (positive data only) instead of range padding")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="nsfts", description="Non-stationary fuzzy time series forecasting and benchmarks.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bench", help="run every dataset x method cell of a manifest")
    b.add_argument("--manifest", required=True, help="YAML benchmark manifest")
    b.add_argument("--out", help="output directory (overrides the manifest)")
    b.add_argument("--seed", type=int, help="default seed for synthetic datasets (overrides the manifest)")
    b.add_argument("--workers", type=int, help="worker processes (default: available CPUs)")
    b.add_argument("--exclude-fallback", action="store_true", help="leave no-rule fallback forecasts unscored")
    _model_flags(b)
    b.set_defaults(func=cmd_bench)

    f = sub.add_parser("forecast", help="stream a CSV column through a train-once NSFTS model")
    src = f.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", help="checkpoint JSON to resume from")
    src.add_argument("--train", help="CSV to train a fresh model on")
    f.add_argument("--input", required=True, help="CSV with the observations to forecast")
    f.add_argument("--column", default="0", help="column index or header name (default 0)")
    f.add_argument("--header", action="store_true", help="CSV files have a header row")
    f.add_argument("--checkpoint", help="write the final model state here")
    f.add_argument("--k", type=int, default=35, help="number of fuzzy sets (default 35)")
    f.add_argument("--w", type=int, default=10, help="residual window length (default 10)")
    f.add_argument("--padding", type=float, default=0.2, help="universe padding fraction (default 0.2)")
    _model_flags(f)
    f.set_defaults(func=cmd_forecast)

    g = sub.add_parser("generate", help="write a seeded synthetic drift series as CSV")
    g.add_argument("--kind", required=True, choices=KINDS, metavar="KIND",
                   help="one of: " + ", ".join(KINDS))
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--length", type=int, default=1000)
    g.add_argument("--mean", type=float, default=10.0, help="base mean")
    g.add_argument("--stdev", type=float, default=1.0, help="base standard deviation")
    g.add_argument("--magnitude", type=float, help="mean shift in stdev units, or stdev multiplier")
    g.add_argument("--onset", type=float, default=0.5, help="drift onset as a fraction of the length")
    g.add_argument("--variance-magnitude", type=float, default=5.0,
                   help="stdev multiplier for the combined mean-and-variance kinds")
    g.add_argument("--noise-ar", type=float, default=0.0, help="AR(1) coefficient of the noise")
    g.add_argument("--out", help="output file (default stdout)")
    g.add_argument("--header", action="store_true", help="write a 'value' header row")
    g.set_defaults(func=cmd_generate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
