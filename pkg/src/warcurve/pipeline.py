"""Stage orchestration behind the command-line tool.

Each command computes what it needs lazily and writes its own artifacts under
the output directory.  Every random draw comes from a labeled stream of the
single run seed, so any stage can be rerun on its own with identical output.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .baseline import delta_predictions, fit_aging_curve
from .cohort import CohortRules, build_batting_cohort, build_pitching_cohort, cohort_report
from .config import RunConfig
from .evaluation import DELTA, render_heatmap, rfe_curve_report, write_predictions
from .evaluation import evaluate_models
from .features import POLICIES, apply_scaler, build_features, build_targets, fit_scaler
from .fixtures import generate_synthetic_league
from .ingest import attach_war, load_dataset, merge_stints, write_rejects
from .metrics import r_squared
from .models import MODEL_KINDS, fit_model
from .selection import SplitSpec, grid_search, rfe_rank, split_players

logger = logging.getLogger(__name__)

COHORT_KIND = {"batters": "batter", "pitchers": "pitcher"}
COMMANDS = ("ingest", "cohort", "features", "select", "tune", "train", "evaluate",
            "baseline", "synth", "all")


@dataclass
class CohortRun:
    """Everything computed for one cohort, filled in stage by stage."""

    name: str
    cohort: object
    features: object
    scaled: object
    train_ids: list
    test_ids: list
    curve: object
    targets: dict = field(default_factory=dict)
    traces: dict = field(default_factory=dict)
    tunes: dict = field(default_factory=dict)
    models: dict = field(default_factory=dict)

    @property
    def test_careers(self):
        by_id = {c.player_id: c for c in self.cohort}
        return [by_id[pid] for pid in self.test_ids]


class Pipeline:
    def __init__(self, config: RunConfig):
        self.config = config
        self.out = Path(config.out)
        self.digest = config.digest()
        self._runs = {}

    # -- shared state ---------------------------------------------------

    @cached_property
    def raw_dataset(self):
        logger.info("loading data from %s", self.config.data_dir)
        return load_dataset(**self.config.input_paths())

    @cached_property
    def dataset(self):
        return attach_war(merge_stints(self.raw_dataset))

    @cached_property
    def cohorts(self):
        rules = CohortRules(cutoff_year=self.config.cutoff_year, min_span=self.config.min_span)
        pitchers = build_pitching_cohort(self.dataset, rules)
        batters = build_batting_cohort(self.dataset, rules, pitching=pitchers)
        return {"batters": batters, "pitchers": pitchers}

    def run(self, name) -> CohortRun:
        if name not in self._runs:
            cohort = self.cohorts[name]
            features = build_features(cohort)
            train_ids, test_ids = split_players(
                cohort.player_ids, SplitSpec(self.config.train_fraction, self.config.seed))
            scaler = fit_scaler(features.rows(train_ids))
            by_id = {c.player_id: c for c in cohort}
            curve = fit_aging_curve([by_id[pid] for pid in train_ids])
            run = CohortRun(name, cohort, features, apply_scaler(scaler, features),
                            train_ids, test_ids, curve)
            for year in self.config.years:
                run.targets[year] = build_targets(cohort, year, self.config.policy)
            self._runs[name] = run
        return self._runs[name]

    def _train_xy(self, run, year, names=None):
        fm = run.scaled.rows(run.train_ids)
        if names is not None:
            fm = fm.select(names)
        return fm, run.targets[year].rows(run.train_ids).values

    def selected(self, name):
        run = self.run(name)
        cfg = self.config
        for year in cfg.years:
            if year not in run.traces:
                logger.info("RFE %s year %d", name, year)
                fm, y = self._train_xy(run, year)
                run.traces[year] = rfe_rank(fm.X, y, fm.feature_names,
                                            target_count=min(cfg.retained_features,
                                                             len(fm.feature_names)),
                                            k=cfg.folds, seed=cfg.seed)
        return run

    def tuned(self, name):
        run = self.selected(name)
        for year in self.config.years:
            if year in run.tunes:
                continue
            fm, y = self._train_xy(run, year, run.traces[year].retained)
            run.tunes[year] = {}
            for kind in MODEL_KINDS:
                logger.info("tuning %s %s year %d", kind, name, year)
                run.tunes[year][kind] = grid_search(kind, self.config.grids[kind], fm.X, y,
                                                    k=self.config.folds, seed=self.config.seed)
        return run

    def trained(self, name):
        run = self.tuned(name)
        for year in self.config.years:
            if year in run.models:
                continue
            fm, y = self._train_xy(run, year, run.traces[year].retained)
            run.models[year] = {
                kind: fit_model(kind, fm.X, y, run.tunes[year][kind].best_params,
                                seed=self.config.seed, feature_names=fm.feature_names)
                for kind in MODEL_KINDS}
        return run

    @property
    def base_fill(self):
        return POLICIES[self.config.policy]

    def evaluated(self, name):
        run = self.trained(name)
        test = run.scaled.rows(run.test_ids)
        targets = {y: t.rows(run.test_ids) for y, t in run.targets.items()}
        return evaluate_models(COHORT_KIND[name], run.models, run.curve, test,
                               run.test_careers, targets, base_fill=self.base_fill,
                               seed=self.config.seed, config_digest=self.digest)

    # -- artifact writers ------------------------------------------------

    def _path(self, *parts):
        path = self.out.joinpath(*parts)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_run_info(self):
        with open(self._path("run_config.txt"), "w", encoding="utf-8") as fh:
            fh.write(f"config_digest = {self.digest}\nseed = {self.config.seed}\n")

    def write_ingest(self):
        ds = self.dataset
        write_rejects(self.raw_dataset.rejects, self._path("rejects.csv"))
        ds.batting.to_csv(self._path("seasons_batting.csv"), index=False, lineterminator="\n")
        ds.pitching.to_csv(self._path("seasons_pitching.csv"), index=False, lineterminator="\n")
        logger.info("%d batting and %d pitching seasons, %d rejects", len(ds.batting),
                    len(ds.pitching), len(self.raw_dataset.rejects))

    def write_cohort(self):
        for name in self.config.cohort_names:
            cohort = self.cohorts[name]
            report = cohort_report(cohort, self.dataset)
            with open(self._path(f"cohort_{name}.csv"), "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["metric", "contemporary", "included", "percent"])
                writer.writerows(report.rows())
                writer.writerow(["exclusions", "", "", ""])
                for reason, count in sorted(cohort.exclusions.items()):
                    writer.writerow([reason, count, "", ""])
            lines = [f"{name.capitalize()} since {self.config.cutoff_year}",
                     f"{'':<20}{'Contemporary':>14}{'Included':>12}{'Percent':>10}"]
            lines += [f"{label:<20}{a:>14}{b:>12}{pct:>9.1f}%" for label, a, b, pct in report.rows()]
            self._path(f"cohort_{name}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    def write_features(self):
        for name in self.config.cohort_names:
            run = self.run(name)
            run.features.to_csv(self._path(f"features_{name}.csv"))
            with open(self._path(f"split_{name}.csv"), "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["player_id", "split"])
                rows = [(pid, "train") for pid in run.train_ids]
                rows += [(pid, "test") for pid in run.test_ids]
                writer.writerows(sorted(rows))
            for year, target in run.targets.items():
                target.to_csv(self._path(f"targets_{name}_{year}.csv"))

    def write_select(self):
        for name in self.config.cohort_names:
            run = self.selected(name)
            rfe_curve_report({(name, y): run.traces[y] for y in self.config.years}, self.out)

    def write_tune(self):
        for name in self.config.cohort_names:
            run = self.tuned(name)
            for year in self.config.years:
                for kind, result in run.tunes[year].items():
                    result.to_csv(self._path("tune", f"{name}_{year}_{kind}.csv"))

    def write_train(self):
        for name in self.config.cohort_names:
            run = self.trained(name)
            for year in self.config.years:
                for kind, model in run.models[year].items():
                    self._path("models", f"{name}_{year}_{kind}.json").write_text(
                        model.to_text(), encoding="utf-8")

    def write_evaluate(self):
        report = None
        for name in self.config.cohort_names:
            part, rows = self.evaluated(name)
            if report is None:
                report = part
            else:
                report.extend(part)
            write_predictions(rows, self._path(f"predictions_{name}.csv"))
            for kind in (*MODEL_KINDS, DELTA):
                actual = np.array([r["actual"] for r in rows])
                predicted = np.array([r[kind] for r in rows])
                render_heatmap(actual, predicted, self._path(f"heatmap_{name}_{kind}.svg"),
                               title=f"{name} {kind}: predicted vs actual WAR, years "
                                     f"{min(self.config.years)}-{max(self.config.years)}")
        report.to_csv(self._path("metrics.csv"))
        self.report = report
        for e in report.entries:
            logger.info("%s %s year %d: R2 %.4f (n=%d)", e.cohort, e.model, e.year, e.r2, e.n_test)

    def write_baseline(self):
        for name in self.config.cohort_names:
            run = self.run(name)
            run.curve.to_csv(self._path(f"aging_curve_{name}.csv"))
            careers = run.test_careers
            with open(self._path(f"baseline_{name}.csv"), "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["year", "n_test", "r2"])
                for year in self.config.years:
                    pred, _ = delta_predictions(careers, run.curve, year, self.base_fill)
                    actual = run.targets[year].rows(run.test_ids).values
                    writer.writerow([year, len(actual), format(r_squared(actual, pred), ".10g")])

    def write_synth(self):
        league = generate_synthetic_league(self.config.synth_config(), self.config.data_dir)
        logger.info("synthetic league written to %s (%d player-seasons)",
                    self.config.data_dir, len(league.truth))
        return league


STAGES = {
    "ingest": ("write_ingest",),
    "cohort": ("write_cohort",),
    "features": ("write_features",),
    "select": ("write_select",),
    "tune": ("write_tune",),
    "train": ("write_train",),
    "evaluate": ("write_evaluate",),
    "baseline": ("write_baseline",),
    "synth": ("write_synth",),
    "all": ("write_ingest", "write_cohort", "write_features", "write_baseline", "write_select",
            "write_tune", "write_train", "write_evaluate"),
}


def run_pipeline(config: RunConfig, command: str) -> Pipeline:
    """Run ``command`` and write its artifacts; returns the pipeline for inspection."""
    if command not in STAGES:
        raise ValueError(f"unknown command {command!r}")
    pipeline = Pipeline(config)
    if command != "synth":
        pipeline.write_run_info()
    for stage in STAGES[command]:
        getattr(pipeline, stage)()
    return pipeline
