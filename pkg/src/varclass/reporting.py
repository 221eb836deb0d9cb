"""Benchmark report files: CSV tables, a Markdown mirror and a JSON summary.

CSV files carry full-precision floats (``repr``); the Markdown mirror rounds
accuracies and AUCs to four decimals. Nothing time- or host-dependent is
written, so identical runs give byte-identical files.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

from . import metrics
from .metrics import Grade
from .reference import PRINTED_WEIGHTED_TOTALS, REFERENCE, REFERENCE_VERSION

SCHEMA_VERSION = 1
METHODS = ("LR", "SVM", "NN")
BASELINES = ("SVM", "NN")


def _num(v):
    return "" if v is None else repr(float(v))


def _f4(v):
    return "" if v is None else f"{v:.4f}"


def _place(ours, others):
    """1-based rank of ``ours`` among all values (ties share the better place) and gap to the best."""
    vals = [v for v in others if v is not None]
    place = 1 + sum(v > ours for v in vals)
    return place, max([ours, *vals]) - ours


_ORDINAL = {1: "1st", 2: "2nd", 3: "3rd"}


def dataset_rows(results):
    """One summary dict per benchmarked dataset, reference columns filled when known."""
    rows = []
    for res in results:
        best = res.best
        ref = REFERENCE.get(res.name)
        acc = best.accuracy_mean
        auc = best.auc_mean
        ref_acc = {m: (ref.accuracy[m] if ref else None) for m in BASELINES}
        ref_auc = {m: (ref.auc[m] if ref else None) for m in BASELINES}
        acc_place, acc_dist = _place(acc, ref_acc.values())
        auc_place, auc_dist = _place(auc, ref_auc.values())
        rows.append({
            "dataset": res.name,
            "dim": res.m,
            "n": res.n,
            "c": best.hyper.c,
            "lambda": best.hyper.lam,
            "eta": best.hyper.eta,
            "accuracy_mean": acc,
            "accuracy_std": best.accuracy_std,
            "auc_mean": auc,
            "auc_std": best.auc_std,
            "grade": metrics.grade(auc).name,
            "ref_accuracy": ref_acc,
            "ref_auc": ref_auc,
            "ref_grade": {m: (metrics.grade(v).name if v is not None else None) for m, v in ref_auc.items()},
            "accuracy_place": acc_place,
            "accuracy_dist": acc_dist,
            "auc_place": auc_place,
            "auc_dist": auc_dist,
            "ref_lr_accuracy": ref.accuracy["LR"] if ref else None,
            "ref_lr_auc": ref.auc["LR"] if ref else None,
        })
    return rows


def grade_tallies(rows):
    """Grade counts per method over the benchmarked datasets.

    Baseline columns only count datasets that have reference numbers.
    """
    out = {"LR": metrics.tally(r["grade"] for r in rows)}
    for m in BASELINES:
        letters = [r["ref_grade"][m] for r in rows if r["ref_grade"][m] is not None]
        out[m] = metrics.tally(letters) if letters else None
    return out


def published_grade_check():
    """Recompute the published weighted totals from the published grade letters.

    Returns one dict per method with the tally, the computed total, the
    printed total and whether they agree.
    """
    out = []
    for method in METHODS:
        letters = [row.grades[method] for row in REFERENCE.values()]
        counts = metrics.tally(letters)
        total = metrics.weighted_grade_total(counts)
        printed = PRINTED_WEIGHTED_TOTALS[method]
        out.append({
            "method": method,
            "counts": {g.name: counts[g] for g in Grade},
            "computed": total,
            "printed": printed,
            "consistent": total == printed,
        })
    return out


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_reports(out_dir, results, failures=None):
    """Write every report file for ``results`` into ``out_dir``; returns the JSON summary."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    failures = failures or {}
    rows = dataset_rows(results)
    tallies = grade_tallies(rows)
    check = published_grade_check()

    _write_csv(out / "accuracy.csv",
               ["dataset", "dim", "n", "c", "lambda", "eta", "lr_accuracy_mean", "lr_accuracy_std",
                "svm_reference", "nn_reference", "place", "dist_from_first"],
               [[r["dataset"], r["dim"], r["n"], _num(r["c"]), _num(r["lambda"]), _num(r["eta"]),
                 _num(r["accuracy_mean"]), _num(r["accuracy_std"]),
                 _num(r["ref_accuracy"]["SVM"]), _num(r["ref_accuracy"]["NN"]),
                 r["accuracy_place"], _num(r["accuracy_dist"])] for r in rows])

    _write_csv(out / "auc.csv",
               ["dataset", "lr_auc_mean", "lr_auc_std", "lr_grade", "svm_reference", "svm_grade",
                "nn_reference", "nn_grade", "place", "dist_from_first"],
               [[r["dataset"], _num(r["auc_mean"]), _num(r["auc_std"]), r["grade"],
                 _num(r["ref_auc"]["SVM"]), r["ref_grade"]["SVM"] or "",
                 _num(r["ref_auc"]["NN"]), r["ref_grade"]["NN"] or "",
                 r["auc_place"], _num(r["auc_dist"])] for r in rows])

    grade_rows = []
    for g in Grade:
        grade_rows.append([g.name] + [("" if tallies[m] is None else tallies[m][g]) for m in METHODS])
    grade_rows.append(["weighted"] + [
        ("" if tallies[m] is None else metrics.weighted_grade_total(tallies[m])) for m in METHODS])
    _write_csv(out / "grades.csv", ["grade", *METHODS], grade_rows)

    _write_csv(out / "published_grades_check.csv",
               ["method", *[g.name for g in Grade], "computed_weighted", "printed_weighted", "status"],
               [[c["method"], *[c["counts"][g.name] for g in Grade], c["computed"], c["printed"],
                 "consistent" if c["consistent"] else "DISCREPANCY"] for c in check])

    fold_rows, grid_rows = [], []
    for res in results:
        for s in res.best.folds:
            fold_rows.append([res.name, s.repeat, s.fold, _num(s.accuracy), _num(s.auc),
                              s.iterations, s.termination, int(s.monotone)])
        for cv in res.table:
            grid_rows.append([res.name, _num(cv.hyper.c), _num(cv.hyper.lam), _num(cv.hyper.eta),
                              _num(cv.accuracy_mean), _num(cv.accuracy_std),
                              _num(cv.auc_mean), _num(cv.auc_std)])
    _write_csv(out / "folds.csv",
               ["dataset", "repeat", "fold", "accuracy", "auc", "iterations", "termination", "monotone"],
               fold_rows)
    _write_csv(out / "grid.csv",
               ["dataset", "c", "lambda", "eta", "accuracy_mean", "accuracy_std", "auc_mean", "auc_std"],
               grid_rows)
    _write_csv(out / "failures.csv", ["dataset", "error"], sorted(failures.items()))

    summary = {
        "schema_version": SCHEMA_VERSION,
        "reference_version": REFERENCE_VERSION,
        "datasets": rows,
        "grade_tally": {m: (None if t is None else {g.name: t[g] for g in Grade}) for m, t in tallies.items()},
        "weighted_total": {m: (None if t is None else metrics.weighted_grade_total(t))
                           for m, t in tallies.items()},
        "published_grade_check": check,
        "failures": dict(sorted(failures.items())),
    }
    (out / "report.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    (out / "report.md").write_text(render_markdown(rows, tallies, check, failures))
    return summary


def _avg(values):
    return sum(values) / len(values) if values else None


def render_markdown(rows, tallies, check, failures) -> str:
    lines = ["# Benchmark report", "", "## Accuracy (%)", "",
             "| Data | Dim | N | c | lambda | LR | SVM (ref) | NN (ref) | Place | Dist. from 1st |",
             "|---|---|---|---|---|---|---|---|---|---|"]
    for r in rows:
        lines.append(
            f"| {r['dataset']} | {r['dim']} | {r['n']} | {r['c']:.4f} | {r['lambda']:g} | "
            f"{_f4(r['accuracy_mean'])} | {_f4(r['ref_accuracy']['SVM'])} | {_f4(r['ref_accuracy']['NN'])} | "
            f"{_ORDINAL.get(r['accuracy_place'], r['accuracy_place'])} | {_f4(r['accuracy_dist'])} |")
    if rows:
        lines.append(f"\nAverage distance from 1st: {_f4(_avg([r['accuracy_dist'] for r in rows]))}")

    lines += ["", "## Area under the ROC curve", "",
              "| Data | LR | SVM (ref) | NN (ref) | Place | Dist. from 1st |",
              "|---|---|---|---|---|---|"]

    def cell(v, g):
        return "" if v is None else f"{v:.4f} ({g})"

    for r in rows:
        lines.append(
            f"| {r['dataset']} | {cell(r['auc_mean'], r['grade'])} | "
            f"{cell(r['ref_auc']['SVM'], r['ref_grade']['SVM'])} | "
            f"{cell(r['ref_auc']['NN'], r['ref_grade']['NN'])} | "
            f"{_ORDINAL.get(r['auc_place'], r['auc_place'])} | {_f4(r['auc_dist'])} |")
    if rows:
        lines.append(f"\nAverage distance from 1st: {_f4(_avg([r['auc_dist'] for r in rows]))}")

    lines += ["", "## Grades (A=1 ... F=5, lower is better)", "",
              "| Grade | LR | SVM (ref) | NN (ref) |", "|---|---|---|---|"]
    for g in Grade:
        lines.append(f"| {g.name} | " + " | ".join(
            "" if tallies[m] is None else str(tallies[m][g]) for m in METHODS) + " |")
    lines.append("| Weighted | " + " | ".join(
        "" if tallies[m] is None else str(metrics.weighted_grade_total(tallies[m])) for m in METHODS) + " |")

    lines += ["", "## Published weighted grades recomputed from published letters", "",
              "| Method | Computed | Printed | Status |", "|---|---|---|---|"]
    for c in check:
        status = "consistent" if c["consistent"] else "DISCREPANCY: printed total does not match its grade counts"
        lines.append(f"| {c['method']} | {c['computed']} | {c['printed']} | {status} |")

    if failures:
        lines += ["", "## Failures", ""]
        lines += [f"- {name}: {err}" for name, err in sorted(failures.items())]
    return "\n".join(lines) + "\n"
