"""Feature vectors from seasons 1-6, WAR targets for seasons 7-11, min-max scaling.

Feature names
-------------
``y{i}_{stat}``
    Season ``i`` (1-6) value: counting stats, recomputed rates, ``war`` and
    ``active`` (1 when the season exists).  Absent seasons contribute 0.
``agg_{stat}``
    Seasons 1-6 combined: summed counts, rates recomputed from the sums,
    ``agg_war`` (cumulative WAR) and ``agg_active_seasons``.
``age_at_debut``, ``height``, ``weight``
    Biographical values; missing height/weight take the cohort median.
``starter_share``
    Pitchers only: games started over games in seasons 1-6.
``decade_{d}``, ``pos_{p}``, ``bats_{h}``, ``throws_{h}``
    One-hot groups.  Position is emitted for batters only.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .cohort import FREE_AGENCY_BOUNDARY, Cohort
from .ingest import BATTING_COUNTS, PITCHING_COUNTS, POSITIONS

ONE_HOT_PREFIXES = ("decade_", "pos_", "bats_", "throws_")
BATS_VALUES = ("right", "left", "switch", "unknown")
THROWS_VALUES = ("right", "left", "unknown")
TARGET_YEARS = range(7, 12)
FEATURE_SEASONS = range(1, FREE_AGENCY_BOUNDARY + 1)


def _ratio(num, den):
    return num / den if den else 0.0


def batting_rates(s):
    ab, h = s["at_bats"], s["hits"]
    pa = ab + s["walks"] + s["hbp"] + s["sac_flies"]
    bases = h + s["doubles"] + 2 * s["triples"] + 3 * s["home_runs"]
    return {"batting_avg": _ratio(h, ab),
            "obp": _ratio(h + s["walks"] + s["hbp"], pa),
            "slg": _ratio(bases, ab)}


def pitching_rates(s):
    outs = s["ipouts"]
    return {"era": _ratio(27 * s["earned_runs"], outs),
            "whip": _ratio(3 * (s["hits"] + s["walks"]), outs),
            "so9": _ratio(27 * s["strikeouts"], outs)}


def is_one_hot(name):
    return name.startswith(ONE_HOT_PREFIXES)


@dataclass
class FeatureMatrix:
    feature_names: list[str]
    X: np.ndarray
    player_ids: list[str]

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float).reshape(len(self.player_ids), len(self.feature_names))

    def column(self, name):
        return self.X[:, self.feature_names.index(name)]

    def rows(self, ids):
        pos = {pid: i for i, pid in enumerate(self.player_ids)}
        idx = [pos[pid] for pid in ids]
        return FeatureMatrix(list(self.feature_names), self.X[idx], list(ids))

    def select(self, names):
        idx = [self.feature_names.index(n) for n in names]
        return FeatureMatrix(list(names), self.X[:, idx], list(self.player_ids))

    def one_hot_groups(self):
        groups: dict[str, list[int]] = {}
        for i, name in enumerate(self.feature_names):
            for prefix in ONE_HOT_PREFIXES:
                if name.startswith(prefix):
                    groups.setdefault(prefix[:-1], []).append(i)
        return groups

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["player_id", *self.feature_names])
            for pid, row in zip(self.player_ids, self.X):
                writer.writerow([pid, *(format(v, ".10g") for v in row)])


def _season_block(kind):
    if kind == "batter":
        return BATTING_COUNTS, ("batting_avg", "obp", "slg"), batting_rates
    return PITCHING_COUNTS, ("era", "whip", "so9"), pitching_rates


def feature_names_for(kind, decades):
    counts, rates, _ = _season_block(kind)
    per_season = [*counts, *rates, "war", "active"]
    names = [f"y{i}_{stat}" for i in FEATURE_SEASONS for stat in per_season]
    names += [f"agg_{stat}" for stat in (*counts, *rates, "war", "active_seasons")]
    names += ["age_at_debut", "height", "weight"]
    if kind == "pitcher":
        names.append("starter_share")
    names += [f"decade_{d}" for d in decades]
    if kind == "batter":
        names += [f"pos_{p}" for p in POSITIONS]
    names += [f"bats_{b}" for b in BATS_VALUES]
    names += [f"throws_{t}" for t in THROWS_VALUES]
    return names


def _decades(cohort):
    debuts = [c.debut_year // 10 * 10 for c in cohort]
    if not debuts:
        return []
    return list(range(min(debuts), max(debuts) + 1, 10))


def _median(values):
    present = [v for v in values if v is not None]
    return float(np.median(present)) if present else 0.0


def player_features(career, kind, height_fill=0.0, weight_fill=0.0):
    """Feature dict for one career; names follow :func:`feature_names_for`."""
    counts, rates, rate_fn = _season_block(kind)
    out: dict[str, float] = {}
    totals = dict.fromkeys(counts, 0.0)
    for i in FEATURE_SEASONS:
        season = career.seasons.get(i)
        if season is None:
            values = dict.fromkeys((*counts, *rates, "war", "active"), 0.0)
        else:
            values = {c: float(season[c]) for c in counts}
            values.update(rate_fn(season))
            values["war"] = float(season.get("war") or 0.0)
            values["active"] = 1.0
            for c in counts:
                totals[c] += season[c]
        for stat, v in values.items():
            out[f"y{i}_{stat}"] = v
    for c in counts:
        out[f"agg_{c}"] = float(totals[c])
    out.update({f"agg_{k}": v for k, v in rate_fn(totals).items()})
    out["agg_war"] = float(sum(out[f"y{i}_war"] for i in FEATURE_SEASONS))
    out["agg_active_seasons"] = float(sum(out[f"y{i}_active"] for i in FEATURE_SEASONS))
    out["age_at_debut"] = float(career.age_at_debut)
    out["height"] = float(career.height) if career.height is not None else height_fill
    out["weight"] = float(career.weight) if career.weight is not None else weight_fill
    if kind == "pitcher":
        out["starter_share"] = _ratio(totals["games_started"], totals["games"])
    out[f"decade_{career.debut_year // 10 * 10}"] = 1.0
    if kind == "batter":
        out[f"pos_{career.position if career.position in POSITIONS else 'unknown'}"] = 1.0
    out[f"bats_{career.bats if career.bats in BATS_VALUES else 'unknown'}"] = 1.0
    out[f"throws_{career.throws if career.throws in THROWS_VALUES else 'unknown'}"] = 1.0
    return out


def build_features(cohort: Cohort, kind: str | None = None) -> FeatureMatrix:
    """One row per career, in the cohort's order."""
    kind = kind or cohort.kind
    names = feature_names_for(kind, _decades(cohort))
    height_fill = _median([c.height for c in cohort])
    weight_fill = _median([c.weight for c in cohort])
    X = np.zeros((len(cohort), len(names)))
    col = {n: j for j, n in enumerate(names)}
    for r, career in enumerate(cohort):
        for name, value in player_features(career, kind, height_fill, weight_fill).items():
            X[r, col[name]] = value
    return FeatureMatrix(names, X, [c.player_id for c in cohort])


POLICIES = {"zero": 0.0, "penalty-0.5": -0.5, "penalty-1": -1.0}


def parse_policy(text) -> str:
    """Accept ``zero``, ``-0.5``, ``-1`` or the canonical ``penalty-*`` names."""
    text = str(text).strip()
    aliases = {"0": "zero", "-0.5": "penalty-0.5", "-1": "penalty-1", "-1.0": "penalty-1"}
    name = aliases.get(text, text)
    if name not in POLICIES:
        raise ValueError(f"unknown missing-WAR policy {text!r}; expected zero, -0.5 or -1")
    return name


@dataclass
class TargetVector:
    target_year: int
    values: np.ndarray
    player_ids: list[str]
    policy: str
    recorded: np.ndarray  # False where the policy value was substituted

    def rows(self, ids):
        pos = {pid: i for i, pid in enumerate(self.player_ids)}
        idx = [pos[pid] for pid in ids]
        return TargetVector(self.target_year, self.values[idx], list(ids), self.policy,
                            self.recorded[idx])

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["player_id", "war"])
            for pid, v in zip(self.player_ids, self.values):
                writer.writerow([pid, format(v, ".10g")])


def build_targets(cohort: Cohort, target_year: int, policy: str = "zero") -> TargetVector:
    """Season ``target_year`` WAR per career; absent seasons take the policy value."""
    if target_year not in TARGET_YEARS:
        raise ValueError(f"target_year must be in 7..11, got {target_year}")
    policy = parse_policy(policy)
    fill = POLICIES[policy]
    values, recorded = [], []
    for career in cohort:
        war = career.war(target_year)
        values.append(fill if war is None else float(war))
        recorded.append(war is not None)
    return TargetVector(target_year, np.asarray(values, dtype=float),
                        [c.player_id for c in cohort], policy, np.asarray(recorded, dtype=bool))


@dataclass
class ScalerParams:
    feature_names: list[str]
    mins: np.ndarray
    maxs: np.ndarray

    @property
    def passthrough(self):
        return np.array([is_one_hot(n) for n in self.feature_names], dtype=bool)


class FeatureAlignmentError(ValueError):
    pass


def fit_scaler(train: FeatureMatrix) -> ScalerParams:
    """Column minima and maxima over the (training) rows given."""
    if train.X.shape[0] == 0:
        raise ValueError("cannot fit a scaler on an empty training set")
    return ScalerParams(list(train.feature_names), train.X.min(axis=0), train.X.max(axis=0))


def _check_names(params, fm):
    if list(fm.feature_names) != list(params.feature_names):
        raise FeatureAlignmentError("feature names do not match the fitted scaler")


def apply_scaler(params: ScalerParams, fm: FeatureMatrix) -> FeatureMatrix:
    """``(x - min) / (max - min)``; constant columns map to 0; one-hot columns pass through.

    Values outside the training range are not clipped.
    """
    _check_names(params, fm)
    span = params.maxs - params.mins
    constant = span == 0
    scaled = (fm.X - params.mins) / np.where(constant, 1.0, span)
    scaled[:, constant] = 0.0
    scaled[:, params.passthrough] = fm.X[:, params.passthrough]
    return FeatureMatrix(list(fm.feature_names), scaled, list(fm.player_ids))


def invert_scaler(params: ScalerParams, fm: FeatureMatrix) -> FeatureMatrix:
    _check_names(params, fm)
    X = fm.X * (params.maxs - params.mins) + params.mins
    X[:, params.passthrough] = fm.X[:, params.passthrough]
    return FeatureMatrix(list(fm.feature_names), X, list(fm.player_ids))
