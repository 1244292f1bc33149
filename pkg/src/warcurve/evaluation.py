"""Test-set scoring, prediction tables and figures."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baseline import AgingCurve, delta_predictions
from .metrics import UndefinedRSquaredError, r_squared
from .svg import Svg

__all__ = ["EvaluationReport", "ReportEntry", "UndefinedRSquaredError", "evaluate_models",
           "heatmap_counts", "r_squared", "render_heatmap", "render_rfe_curve",
           "rfe_curve_report", "write_predictions"]

DELTA = "delta"


@dataclass(frozen=True)
class ReportEntry:
    cohort: str
    model: str
    year: int
    r2: float
    n_test: int


@dataclass
class EvaluationReport:
    entries: list[ReportEntry] = field(default_factory=list)
    seed: int = 0
    config_digest: str = ""

    def get(self, cohort, model, year):
        for e in self.entries:
            if (e.cohort, e.model, e.year) == (cohort, model, year):
                return e.r2
        raise KeyError((cohort, model, year))

    def best(self, cohort, year, exclude=(DELTA,)):
        scores = [e.r2 for e in self.entries
                  if e.cohort == cohort and e.year == year and e.model not in exclude]
        return max(scores)

    def extend(self, other):
        self.entries.extend(other.entries)

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(f"# seed={self.seed} config_digest={self.config_digest}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["cohort", "model", "year", "r2", "n_test"])
            for e in self.entries:
                writer.writerow([e.cohort, e.model, e.year, format(e.r2, ".6f"), e.n_test])


def evaluate_models(cohort_kind, models_by_year, curve: AgingCurve, test_features,
                    test_careers, targets_by_year, base_fill=0.0, seed=0, config_digest=""):
    """Score every model and the delta method on the held-out players.

    Parameters
    ----------
    models_by_year : dict
        ``{year: {model kind: FittedModel}}``; each model selects its own
        feature columns by name from ``test_features``.
    test_features : FeatureMatrix
        Scaled features of the test players, in the order of ``test_careers``.
    targets_by_year : dict
        ``{year: TargetVector}`` restricted to the same test players.

    Returns
    -------
    report : EvaluationReport
    rows : list of dict
        Prediction table, one row per (player, year).
    """
    test_careers = list(test_careers)
    if not test_careers:
        raise ValueError("empty test set")
    if test_features.player_ids != [c.player_id for c in test_careers]:
        raise ValueError("test features and careers are not aligned")
    report = EvaluationReport(seed=seed, config_digest=config_digest)
    rows = []
    for year in sorted(models_by_year):
        target = targets_by_year[year]
        if target.player_ids != test_features.player_ids:
            raise ValueError(f"targets for year {year} are not aligned with the test rows")
        actual = target.values
        preds = {}
        for kind, model in models_by_year[year].items():
            X = test_features.select(model.feature_names).X
            preds[kind] = model.predict(X, model.feature_names)
        preds[DELTA], imputed = delta_predictions(test_careers, curve, year, base_fill)
        for kind, p in preds.items():
            report.entries.append(ReportEntry(cohort_kind, kind, year, r_squared(actual, p),
                                              len(actual)))
        for i, pid in enumerate(target.player_ids):
            row = {"player_id": pid, "year": year, "actual": actual[i],
                   "recorded": int(target.recorded[i])}
            row.update({kind: p[i] for kind, p in preds.items()})
            row["delta_base_imputed"] = int(imputed[i])
            rows.append(row)
    return report, rows


def write_predictions(rows, path):
    if not rows:
        raise ValueError("no prediction rows")
    keys = list(rows[0])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(keys)
        for row in rows:
            writer.writerow([format(v, ".10g") if isinstance(v, float) else v
                             for v in (row[k] for k in keys)])


def heatmap_counts(actual, predicted, bins=40, lo=-2.0, hi=10.0):
    """Square 2D histogram; ``counts[i, j]`` has actual in bin i, predicted in bin j.

    Values outside ``[lo, hi]`` are clamped into the edge bins.
    """
    actual = np.asarray(actual, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if actual.shape != predicted.shape:
        raise ValueError("actual and predicted need equal lengths")
    width = (hi - lo) / bins

    def index(v):
        return np.clip(np.floor((v - lo) / width), 0, bins - 1).astype(int)

    counts = np.zeros((bins, bins), dtype=int)
    np.add.at(counts, (index(actual), index(predicted)), 1)
    return counts


# dark (rare) to light (common)
_DARK = np.array([8, 48, 107])
_LIGHT = np.array([198, 219, 239])


def _cell_color(count, max_count):
    t = np.log1p(count) / np.log1p(max_count) if max_count > 1 else 1.0
    r, g, b = np.round(_DARK + (_LIGHT - _DARK) * t).astype(int)
    return f"#{r:02x}{g:02x}{b:02x}"


def render_heatmap(actual, predicted, path, bins=40, lo=-2.0, hi=10.0, title=""):
    """Predicted-vs-actual density plot with the y = x reflection line."""
    counts = heatmap_counts(actual, predicted, bins, lo, hi)
    size, margin = 480, 50
    cell = size / bins
    svg = Svg(size + 2 * margin, size + 2 * margin)
    svg.comment(f"warcurve heatmap bins={bins} range=[{lo:g},{hi:g}] points={int(counts.sum())}")
    svg.comment("color: log(1+count)/log(1+max) from #08306b (rare) to #c6dbef (most frequent)")
    svg.comment("counts[actual_bin][predicted_bin]=" + json.dumps(counts.tolist(),
                                                                  separators=(",", ":")))
    svg.rect(margin, margin, size, size, "white", stroke="#999999")
    max_count = int(counts.max()) if counts.size else 0
    for i, j in zip(*np.nonzero(counts)):
        x = margin + i * cell
        y = margin + size - (j + 1) * cell
        svg.rect(x, y, cell, cell, _cell_color(counts[i, j], max_count),
                 **{"data-count": int(counts[i, j]), "data-bin": f"{i},{j}"})
    svg.line(margin, margin + size, margin + size, margin, stroke="red", width=1.5)
    for v in np.arange(np.ceil(lo), hi + 1e-9, 2.0):
        pos = (v - lo) / (hi - lo) * size
        svg.text(margin + pos, margin + size + 16, f"{v:g}", size=10)
        svg.text(margin - 6, margin + size - pos + 3, f"{v:g}", size=10, anchor="end")
    svg.text(margin + size / 2, margin + size + 36, "actual WAR")
    svg.text(14, margin + size / 2, "predicted WAR", transform=f"rotate(-90 14 {margin + size / 2})")
    if title:
        svg.text(margin + size / 2, margin - 16, title, size=13)
    svg.save(path)
    return counts


def render_rfe_curve(trace, path, title=""):
    curve = sorted(trace.curve())
    counts = [c for c, _ in curve]
    scores = [s for _, s in curve]
    width, height, margin = 560, 360, 50
    svg = Svg(width, height)
    svg.comment("warcurve rfe curve: cross-validated ridge R^2 against retained feature count")
    lo_s = min(min(scores), 0.0)
    hi_s = max(max(scores), 1e-9)
    x0, x1 = min(counts), max(counts)

    def to_xy(c, s):
        x = margin + (c - x0) / max(x1 - x0, 1) * (width - 2 * margin)
        y = height - margin - (s - lo_s) / (hi_s - lo_s) * (height - 2 * margin)
        return x, y

    svg.rect(margin, margin, width - 2 * margin, height - 2 * margin, "white", stroke="#999999")
    points = [to_xy(c, s) for c, s in curve]
    svg.polyline(points, stroke="#1f77b4")
    svg.text(width / 2, height - 12, "retained features")
    svg.text(14, height / 2, "CV R^2", transform=f"rotate(-90 14 {height / 2})")
    svg.text(margin, height - margin + 14, str(x0), size=10)
    svg.text(width - margin, height - margin + 14, str(x1), size=10)
    svg.text(margin - 6, height - margin, f"{lo_s:.2f}", size=10, anchor="end")
    svg.text(margin - 6, margin + 4, f"{hi_s:.2f}", size=10, anchor="end")
    if title:
        svg.text(width / 2, margin - 16, title, size=13)
    svg.save(path)
    return points


def rfe_curve_report(traces, out_dir):
    """Write ``rfe_{cohort}_{year}.csv`` and ``.svg`` for every ``(cohort, year)`` trace."""
    out = Path(out_dir)
    written = []
    for (cohort, year), trace in sorted(traces.items()):
        stem = out / f"rfe_{cohort}_{year}"
        trace.to_csv(stem.with_suffix(".csv"))
        render_rfe_curve(trace, stem.with_suffix(".svg"), f"{cohort}, year {year}")
        written.append(stem)
    return written
