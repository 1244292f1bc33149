import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import bat, bio, dataset, pit
from warcurve.cohort import build_batting_cohort, build_pitching_cohort
from warcurve.features import (
    FeatureAlignmentError,
    FeatureMatrix,
    apply_scaler,
    build_features,
    build_targets,
    fit_scaler,
    invert_scaler,
    is_one_hot,
)


def batter_league():
    rows = []
    # fixture player: seasons 1, 2, 4, 7, 8 (3, 5, 6 absent); WAR missing in season 2
    rows.append(bat("fix", 1995, at_bats=400, war=1.5, hits=120, doubles=20, triples=2,
                    home_runs=10, walks=40, hbp=5, sac_flies=5, games=110))
    rows.append(bat("fix", 1996, at_bats=200, hits=50, games=60))
    rows.append(bat("fix", 1998, at_bats=500, war=2.0, hits=150, games=140))
    rows.append(bat("fix", 2001, at_bats=300, war=2.4))
    rows.append(bat("fix", 2002, at_bats=300, war=0.7))
    for k, debut in enumerate([1982, 1991, 2003]):
        pid = f"o{k}"
        rows += [bat(pid, y, war=0.1 * (y - debut)) for y in range(debut, debut + 9)]
    bios = [bio("fix", 1995, birth=1972, bats="left", pos="CF", height=73.0, weight=None),
            bio("o0", 1982, pos="SS", weight=180.0), bio("o1", 1991, weight=200.0),
            bio("o2", 2003, bats="switch", throws="left", pos="C", weight=220.0)]
    return dataset(batting=rows, bios=bios)


def test_fixture_player_full_vector():
    cohort = build_batting_cohort(batter_league())
    fm = build_features(cohort)
    row = dict(zip(fm.feature_names, fm.X[cohort.player_ids.index("fix")]))
    # hand-computed values
    assert row["y1_at_bats"] == 400 and row["y1_hits"] == 120
    assert row["y1_batting_avg"] == pytest.approx(0.3)
    assert row["y1_obp"] == pytest.approx((120 + 40 + 5) / (400 + 40 + 5 + 5))
    assert row["y1_slg"] == pytest.approx((120 + 20 + 4 + 30) / 400)
    assert row["y1_war"] == 1.5 and row["y1_active"] == 1
    assert row["y2_war"] == 0.0 and row["y2_active"] == 1
    assert row["y3_at_bats"] == 0 and row["y3_active"] == 0 and row["y3_batting_avg"] == 0
    assert row["y4_at_bats"] == 500 and row["y4_war"] == 2.0
    assert row["y5_active"] == 0 and row["y6_active"] == 0
    assert row["agg_at_bats"] == 1100
    assert row["agg_hits"] == 320
    assert row["agg_batting_avg"] == pytest.approx(320 / 1100)
    assert row["agg_war"] == pytest.approx(3.5)
    assert row["agg_active_seasons"] == 3
    assert row["age_at_debut"] == 23
    assert row["height"] == 73.0
    assert row["weight"] == 200.0  # median of 180, 200, 220
    assert row["decade_1990"] == 1 and row["decade_1980"] == 0 and row["decade_2000"] == 0
    assert row["pos_CF"] == 1 and row["bats_left"] == 1 and row["throws_right"] == 1
    assert sum(v for k, v in row.items() if k.startswith("pos_")) == 1
    assert len(row) == len(fm.feature_names)


def test_decade_one_hot_and_groups_sum_to_one():
    fm = build_features(build_batting_cohort(batter_league()))
    assert [n for n in fm.feature_names if n.startswith("decade_")] == \
        ["decade_1980", "decade_1990", "decade_2000"]
    for group, cols in fm.one_hot_groups().items():
        np.testing.assert_array_equal(fm.X[:, cols].sum(axis=1), 1.0)
    assert not np.isnan(fm.X).any()


def test_pitcher_features_have_starter_share_and_no_position():
    rows = [pit("p1", y, games=30, games_started=20 if y < 1995 else 0) for y in range(1990, 1999)]
    ds = dataset(pitching=rows, bios=[bio("p1", 1990)])
    fm = build_features(build_pitching_cohort(ds))
    assert "starter_share" in fm.feature_names
    assert not any(n.startswith("pos_") for n in fm.feature_names)
    assert fm.column("starter_share")[0] == pytest.approx(100 / 180)
    assert fm.column("y1_era")[0] == pytest.approx(0.0)


def test_order_independence():
    cohort = build_batting_cohort(batter_league())
    fm = build_features(cohort)
    cohort.careers.reverse()
    flipped = build_features(cohort)
    assert flipped.player_ids == fm.player_ids[::-1]
    np.testing.assert_array_equal(flipped.X, fm.X[::-1])


def test_targets_and_policies():
    cohort = build_batting_cohort(batter_league())
    fix = cohort.player_ids.index("fix")
    t8 = build_targets(cohort, 8)
    assert t8.values[fix] == 0.7  # season 8 = 2002
    t7 = build_targets(cohort, 7)
    assert t7.values[fix] == 2.4
    t10 = build_targets(cohort, 10)
    assert t10.values[fix] == 0.0 and not t10.recorded[fix]
    assert build_targets(cohort, 10, "-0.5").values[fix] == -0.5
    assert build_targets(cohort, 10, "penalty-1").values[fix] == -1.0
    with pytest.raises(ValueError):
        build_targets(cohort, 6)
    with pytest.raises(ValueError):
        build_targets(cohort, 12)
    with pytest.raises(ValueError):
        build_targets(cohort, 7, "median")


def fm_of(values, names=None):
    X = np.asarray(values, dtype=float)
    names = names or [f"f{i}" for i in range(X.shape[1])]
    return FeatureMatrix(names, X, [str(i) for i in range(X.shape[0])])


def test_fit_scaler_definition():
    params = fit_scaler(fm_of([[2, 5], [4, 5], [10, 5]]))
    assert list(params.mins) == [2, 5] and list(params.maxs) == [10, 5]


def test_fit_scaler_matches_column_scan():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(20, 6))
    params = fit_scaler(fm_of(X))
    for j in range(6):
        col = [X[i, j] for i in range(20)]
        lo = hi = col[0]
        for v in col:
            lo, hi = min(lo, v), max(hi, v)
        assert (params.mins[j], params.maxs[j]) == (lo, hi)


def test_fit_scaler_empty():
    with pytest.raises(ValueError):
        fit_scaler(fm_of(np.zeros((0, 2))))


def test_apply_scaler_rules():
    train = fm_of([[2, 5], [4, 5], [10, 5]])
    params = fit_scaler(train)
    scaled = apply_scaler(params, train)
    assert scaled.X[:, 0].min() == 0 and scaled.X[:, 0].max() == 1
    np.testing.assert_array_equal(scaled.X[:, 1], 0)
    test = apply_scaler(params, fm_of([[12, 7]]))
    assert test.X[0, 0] == pytest.approx(1.25)


def test_apply_scaler_name_mismatch():
    params = fit_scaler(fm_of([[1, 2]], ["a", "b"]))
    with pytest.raises(FeatureAlignmentError):
        apply_scaler(params, fm_of([[1, 2]], ["b", "a"]))


def test_one_hot_columns_pass_through():
    fm = build_features(build_batting_cohort(batter_league()))
    scaled = apply_scaler(fit_scaler(fm.rows(fm.player_ids[:2])), fm)
    for name in fm.feature_names:
        if is_one_hot(name):
            np.testing.assert_array_equal(scaled.column(name), fm.column(name))
    for cols in scaled.one_hot_groups().values():
        np.testing.assert_array_equal(scaled.X[:, cols].sum(axis=1), 1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(1, 5), st.integers(0, 10_000))
def test_scale_unscale_roundtrip(n, d, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(scale=rng.uniform(0.1, 100), size=(n, d))
    fm = fm_of(X)
    params = fit_scaler(fm)
    back = invert_scaler(params, apply_scaler(params, fm))
    varying = params.maxs > params.mins
    np.testing.assert_allclose(back.X[:, varying], X[:, varying], rtol=1e-12, atol=1e-12 * np.abs(X).max())


def test_export_csv(tmp_path):
    cohort = build_batting_cohort(batter_league())
    fm = build_features(cohort)
    fm.to_csv(tmp_path / "f.csv")
    header = (tmp_path / "f.csv").read_text().splitlines()[0].split(",")
    assert header == ["player_id", *fm.feature_names]
    build_targets(cohort, 7).to_csv(tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "player_id,war"
