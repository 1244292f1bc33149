import csv

import numpy as np
import pytest

from warcurve.baseline import fit_aging_curve
from warcurve.config import config_from_entries
from warcurve.models import model_from_text
from warcurve.pipeline import Pipeline, run_pipeline

ENTRIES = {
    "years": "7, 10", "grid.ridge.alpha": "0.1, 10",
    "grid.mlp.alpha": "1", "grid.mlp.layer1": "4", "grid.mlp.layer2": "0",
    "grid.mlp.max_iterations": "100",
    "grid.forest.max_depth": "3", "grid.forest.min_split": "2", "grid.forest.n_trees": "8",
    "grid.svr.epsilon": "0.1", "grid.svr.C": "10", "grid.svr.gamma": "0.05",
    "synth.n_players": "200", "retained_features": "12",
}


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    root = tmp_path_factory.mktemp("pipe")
    cfg = config_from_entries({**ENTRIES, "data_dir": str(root / "data"),
                               "out": str(root / "out")}).validate()
    run_pipeline(cfg, "synth")
    return run_pipeline(cfg, "all")


def test_split_is_a_partition_and_curve_uses_train_only(pipeline):
    for name in ("batters", "pitchers"):
        run = pipeline.run(name)
        assert set(run.train_ids).isdisjoint(run.test_ids)
        assert sorted(run.train_ids + run.test_ids) == sorted(run.cohort.player_ids)
        train = [c for c in run.cohort if c.player_id in set(run.train_ids)]
        assert run.curve == fit_aging_curve(train)


def test_rfe_keeps_configured_count_and_models_use_it(pipeline):
    run = pipeline.run("batters")
    for year in (7, 10):
        retained = run.traces[year].retained
        assert len(retained) == 12
        for model in run.models[year].values():
            assert model.feature_names == retained


def test_n_test_constant_within_cohort_year(pipeline):
    sizes = {}
    for e in pipeline.report.entries:
        sizes.setdefault((e.cohort, e.year), set()).add(e.n_test)
        assert e.r2 <= 1
    assert all(len(s) == 1 for s in sizes.values())
    assert len(sizes) == 4


def test_saved_models_reload_and_predict_identically(pipeline):
    run = pipeline.run("pitchers")
    test = run.scaled.rows(run.test_ids)
    for kind, model in run.models[10].items():
        path = pipeline.out / "models" / f"pitchers_10_{kind}.json"
        again = model_from_text(path.read_text(encoding="utf-8"))
        X = test.select(model.feature_names).X
        np.testing.assert_array_equal(again.predict(X, model.feature_names), model.predict(X))


def test_prediction_table_matches_report(pipeline):
    with open(pipeline.out / "predictions_batters.csv", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    run = pipeline.run("batters")
    assert len(rows) == 2 * len(run.test_ids)
    assert {"player_id", "year", "actual", "ridge", "mlp", "forest", "svr", "delta"} <= set(rows[0])
    from warcurve.metrics import r_squared
    year7 = [r for r in rows if r["year"] == "7"]
    r2 = r_squared([float(r["actual"]) for r in year7], [float(r["ridge"]) for r in year7])
    assert r2 == pytest.approx(pipeline.report.get("batter", "ridge", 7), abs=1e-7)


def test_stage_state_is_reused(tmp_path):
    cfg = config_from_entries({**ENTRIES, "data_dir": str(tmp_path / "d"),
                               "out": str(tmp_path / "o"), "years": "7"}).validate()
    run_pipeline(cfg, "synth")
    p = Pipeline(cfg)
    first = p.selected("pitchers")
    assert p.selected("pitchers") is first
    assert p.run("pitchers").traces is first.traces
