"""Command line: ``varclass {fit,predict,bench,validate-data}``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure,
1 anything else.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classifier import Hyperparameters, fit, load_model, save_model
from .data_io import Dataset, RegistryEntry, load_csv, load_registry, make_blobs
from .errors import DataError, NumericalError, ShapeError
from .eval_harness import GridSpec, benchmark_dataset, scaler_fit
from .lm_solver import ADAPTIVE, FIXED, LmConfig
from .reporting import write_reports

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

log = logging.getLogger("varclass")


def _positive(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return v


def _nonneg(text):
    v = float(text)
    if not (v >= 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be a nonnegative number, got {text}")
    return v


def _float_list(kind):
    def parse(text):
        return tuple(kind(t) for t in text.split(",") if t.strip())
    return parse


def _lm_config(args, eta=1.0) -> LmConfig:
    return LmConfig(eta=eta, max_iter=args.max_iter, mode=ADAPTIVE if args.adaptive_lm else FIXED)


def _resolve_dataset(args) -> Dataset:
    """A registry name, ``blobs`` for the synthetic fixture, or a CSV path."""
    ref = args.dataset
    if ref == "blobs":
        return make_blobs(100, 2, 4.0, 1.0, seed=args.seed)
    if args.registry is not None or args.data_dir is not None:
        entries = load_registry(args.registry, args.data_dir)
        if ref in entries:
            return load_csv(entries[ref])
    path = Path(ref)
    if not path.exists():
        raise DataError(f"{ref!r} is neither a registry dataset nor an existing file")
    return load_csv(RegistryEntry(
        name=path.stem, file=path, delimiter=args.delimiter, has_header=args.header,
        label_column=args.label_column, positive_label=args.positive_label,
        negative_label=args.negative_label,
    ))


def cmd_fit(args) -> int:
    dataset = _resolve_dataset(args)
    hyper = Hyperparameters(args.c, args.lam, args.eta)
    scaler = scaler_fit(dataset.X)
    model = fit(scaler.transform(dataset.X), dataset.y, hyper, _lm_config(args, args.eta))
    save_model(args.out, model, scaler)
    rep = model.fit_report
    print(f"dataset={dataset.name} n={dataset.n} m={dataset.m} "
          f"c={hyper.c:g} lambda={hyper.lam:g} eta={hyper.eta:g}")
    print(f"iterations={rep.iterations} rejected={rep.rejected_steps} "
          f"cost0={rep.cost_history[0]:.6g} cost={rep.final_cost:.6g} termination={rep.termination}")
    print(f"model written to {args.out}")
    return EXIT_OK


def _read_features(path, delimiter, header):
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        lines = (line.split() for line in fh) if delimiter == "whitespace" else csv.reader(fh, delimiter=delimiter)
        for lineno, tokens in enumerate(lines, start=1):
            if header and lineno == 1:
                continue
            if not tokens or all(not t.strip() for t in tokens):
                continue
            try:
                rows.append([float(t) for t in tokens])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    return rows


def cmd_predict(args) -> int:
    model, scaler = load_model(args.model)
    rows = _read_features(args.input, args.delimiter, args.header)
    for i, r in enumerate(rows):
        if len(r) != model.m:
            raise DataError(f"{args.input}: row {i} has {len(r)} features, model expects m={model.m}")
    X = np.array(rows, dtype=float).reshape(len(rows), model.m)
    if scaler is not None and len(rows):
        X = scaler.transform(X)
    g = model.decision_function(X)
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["index", "g", "class"])
        for i, v in enumerate(g):
            w.writerow([i, repr(float(v)), int(v > 0.5)])
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def cmd_bench(args) -> int:
    entries = load_registry(args.registry, args.data_dir)
    names = list(entries)
    if args.datasets:
        wanted = [n.strip() for n in args.datasets.split(",") if n.strip()]
        unknown = [n for n in wanted if n not in entries]
        if unknown:
            raise DataError(f"unknown dataset(s) {unknown}; registry has {names}")
        names = wanted
    grid = GridSpec(
        c_values=args.c_values or GridSpec.c_values,
        lambda_values=args.lambda_values or GridSpec.lambda_values,
        eta=args.eta,
    )
    results, failures, codes = [], {}, []
    for name in names:
        try:
            dataset = load_csv(entries[name])
            log.info("benchmarking %s (n=%d, m=%d)", name, dataset.n, dataset.m)
            results.append(benchmark_dataset(
                dataset, grid, repeats=args.repeats, seed=args.seed,
                lm=_lm_config(args, args.eta), scaling=args.scale, n_jobs=args.jobs))
        except (DataError, NumericalError) as exc:
            failures[name] = str(exc)
            codes.append(EXIT_NUMERIC if isinstance(exc, NumericalError) else EXIT_DATA)
            log.error("%s failed: %s", name, exc)
    write_reports(args.out, results, failures)
    print(f"reports written to {args.out} ({len(results)} ok, {len(failures)} failed)")
    return max(codes, default=EXIT_OK)


def cmd_validate_data(args) -> int:
    entries = load_registry(args.registry, args.data_dir)
    status = EXIT_OK
    for name, entry in entries.items():
        try:
            ds = load_csv(entry)
            print(f"ok      {name}: n={ds.n} m={ds.m} positives={int(ds.y.sum())}")
        except DataError as exc:
            print(f"FAILED  {name}: {exc}")
            status = EXIT_DATA
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="varclass", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def registry_opts(sp):
        sp.add_argument("--registry", type=Path, help="registry INI file (default: bundled)")
        sp.add_argument("--data-dir", type=Path, help="directory holding the dataset files")

    def lm_opts(sp):
        sp.add_argument("--eta", type=_positive, default=1.0, help="LM damping (default 1)")
        sp.add_argument("--max-iter", type=int, default=100)
        sp.add_argument("--adaptive-lm", action="store_true",
                        help="Marquardt diagonal scaling with adaptive damping")

    f = sub.add_parser("fit", help="fit one model on a full dataset")
    f.add_argument("dataset", help="registry name, 'blobs', or a CSV path")
    registry_opts(f)
    f.add_argument("--c", type=_positive, required=True, help="fitting degree")
    f.add_argument("--lambda", dest="lam", type=_nonneg, required=True, help="regularization weight")
    lm_opts(f)
    f.add_argument("--seed", type=int, default=0, help="seed for the synthetic dataset")
    f.add_argument("--out", type=Path, required=True, help="model file to write")
    f.add_argument("--delimiter", default=",")
    f.add_argument("--header", action="store_true")
    f.add_argument("--label-column", type=int, default=-1)
    f.add_argument("--positive-label", default="1")
    f.add_argument("--negative-label", default="0")
    f.set_defaults(func=cmd_fit)

    pr = sub.add_parser("predict", help="score rows of a feature-only CSV")
    pr.add_argument("model", type=Path)
    pr.add_argument("input", type=Path)
    pr.add_argument("--out", type=Path, help="output CSV (default: stdout)")
    pr.add_argument("--delimiter", default=",")
    pr.add_argument("--header", action="store_true", help="input has a header row")
    pr.set_defaults(func=cmd_predict)

    b = sub.add_parser("bench", help="grid search + repeated 5-fold CV on registry datasets")
    registry_opts(b)
    b.add_argument("--datasets", help="comma-separated dataset names (default: all)")
    b.add_argument("--repeats", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", type=Path, required=True, help="report directory")
    b.add_argument("--scale", choices=("global", "per-fold"), default="global")
    b.add_argument("--c-values", type=_float_list(_positive), help="override the c grid")
    b.add_argument("--lambda-values", type=_float_list(_nonneg), help="override the lambda grid")
    b.add_argument("--jobs", type=int, default=1)
    lm_opts(b)
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("validate-data", help="check every registry file loads with the expected shape")
    registry_opts(v)
    v.set_defaults(func=cmd_validate_data)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if getattr(args, "repeats", 1) < 1 or getattr(args, "max_iter", 1) < 1:
        parser.error("--repeats and --max-iter must be positive")
    try:
        return args.func(args)
    except (DataError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
