import csv

import pytest

from warcurve.cli import main
from warcurve.config import ConfigError, RunConfig, config_from_entries, parse_grid_values, parse_years

FAST = """\
years = 7..8
grid.ridge.alpha = 0.01, 1
grid.mlp.alpha = 0.1
grid.mlp.layer1 = 4
grid.mlp.layer2 = 0
grid.mlp.max_iterations = 100
grid.forest.max_depth = 4
grid.forest.min_split = 2
grid.forest.n_trees = 10
grid.svr.epsilon = 0.1
grid.svr.C = 10
grid.svr.gamma = 0.05
synth.n_players = 160
"""


@pytest.fixture
def workspace(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(FAST + f"data_dir = {tmp_path / 'data'}\n", encoding="utf-8")
    return tmp_path, cfg


def test_year_and_grid_parsing():
    assert parse_years("7..11") == [7, 8, 9, 10, 11]
    assert parse_years("7, 9") == [7, 9]
    assert parse_grid_values("4..6") == [4, 5, 6]
    assert parse_grid_values("0.1, 10, true") == [0.1, 10, True]


def test_config_entries_and_validation():
    cfg = config_from_entries({"policy": "-0.5", "grid.svr.C": "1, 2", "synth.noise_sd": "0"})
    assert cfg.policy == "penalty-0.5"
    assert cfg.grids["svr"]["C"] == [1, 2]
    assert cfg.grids["svr"]["gamma"]  # untouched defaults survive
    assert cfg.synth_config().noise_sd == 0
    with pytest.raises(ConfigError, match="colour"):
        config_from_entries({"colour": "red"})
    bad = RunConfig(years=[5], folds=1)
    with pytest.raises(ConfigError) as err:
        bad.validate()
    assert any(p.startswith("years") for p in err.value.problems)
    assert any(p.startswith("folds") for p in err.value.problems)


def test_digest_tracks_settings_but_not_output_dir():
    a, b = RunConfig(), RunConfig(out="elsewhere")
    assert a.digest() == b.digest()
    assert a.digest() != RunConfig(seed=1).digest()


def test_unknown_command_exits_2_with_usage(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    assert "usage:" in capsys.readouterr().err


def test_invalid_config_exits_1_naming_fields(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("years = 3..4\nfolds = 1\n", encoding="utf-8")
    assert main(["cohort", "--config", str(cfg)]) == 1
    err = capsys.readouterr().err
    assert "years" in err and "folds" in err
    assert main(["cohort", "--policy", "-2"]) == 1
    assert "policy" in capsys.readouterr().err


def test_missing_input_exits_1_with_one_line(tmp_path, capsys):
    assert main(["ingest", "--data", str(tmp_path / "nowhere"), "--out", str(tmp_path / "o")]) == 1
    err = capsys.readouterr().err.strip()
    assert len(err.splitlines()) == 1 and "missing file" in err


def test_synth_then_all_writes_every_artifact(workspace):
    root, cfg = workspace
    out = root / "out"
    assert main(["synth", "--config", str(cfg)]) == 0
    assert main(["all", "--config", str(cfg), "--out", str(out)]) == 0
    expected = ["metrics.csv", "rejects.csv", "run_config.txt", "cohort_batters.csv",
                "cohort_pitchers.txt", "features_batters.csv", "targets_pitchers_8.csv",
                "aging_curve_batters.csv", "baseline_pitchers.csv", "predictions_batters.csv",
                "heatmap_batters_ridge.svg", "heatmap_pitchers_delta.svg", "rfe_batters_7.csv",
                "rfe_pitchers_8.svg", "tune/batters_7_svr.csv", "models/pitchers_8_mlp.json"]
    for name in expected:
        assert (out / name).is_file(), name
    with open(out / "metrics.csv", encoding="utf-8") as fh:
        header = fh.readline()
        rows = list(csv.DictReader(fh))
    assert header.startswith("# seed=0 config_digest=")
    assert len(rows) == 2 * 2 * 5  # cohorts x years x (four models + delta)
    assert all(float(r["r2"]) <= 1 for r in rows)


def test_csv_artifacts_byte_identical_across_runs(workspace):
    root, cfg = workspace
    assert main(["synth", "--config", str(cfg)]) == 0
    for name in ("a", "b"):
        assert main(["evaluate", "--config", str(cfg), "--cohort", "batters",
                     "--out", str(root / name)]) == 0
    a_files = sorted(p.relative_to(root / "a") for p in (root / "a").rglob("*.csv"))
    assert a_files
    for rel in a_files:
        assert (root / "a" / rel).read_bytes() == (root / "b" / rel).read_bytes(), rel


def test_seed_flag_changes_split(workspace):
    root, cfg = workspace
    assert main(["synth", "--config", str(cfg)]) == 0
    for seed in ("1", "2"):
        assert main(["features", "--config", str(cfg), "--seed", seed, "--cohort", "pitchers",
                     "--out", str(root / seed)]) == 0
    assert (root / "1" / "split_pitchers.csv").read_bytes() != (root / "2" / "split_pitchers.csv").read_bytes()
    assert not (root / "1" / "split_batters.csv").exists()


def test_policy_flag_reaches_targets(workspace):
    root, cfg = workspace
    assert main(["synth", "--config", str(cfg)]) == 0
    assert main(["features", "--config", str(cfg), "--policy", "-1", "--years", "8",
                 "--cohort", "batters", "--out", str(root / "p")]) == 0
    with open(root / "p" / "targets_batters_8.csv", encoding="utf-8") as fh:
        values = [float(r["war"]) for r in csv.DictReader(fh)]
    assert -1.0 in values
    assert not (root / "p" / "targets_batters_7.csv").exists()
