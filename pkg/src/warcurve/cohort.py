"""Career indexing and the batter/pitcher inclusion rules."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import pandas as pd

from .ingest import Dataset

FREE_AGENCY_BOUNDARY = 6  # seasons of team control


@dataclass
class Career:
    """One player's seasons keyed by calendar offset from debut (debut year = 1)."""

    player_id: str
    debut_year: int
    kind: str
    seasons: dict[int, dict]
    birth_year: int | None = None
    bats: str = "unknown"
    throws: str = "unknown"
    height: float | None = None
    weight: float | None = None
    position: str = "unknown"
    flags: tuple[str, ...] = ()

    @property
    def age_at_debut(self):
        return None if self.birth_year is None else self.debut_year - self.birth_year

    @property
    def span(self):
        return max(self.seasons) if self.seasons else 0

    def age(self, index):
        return self.age_at_debut + index - 1

    def war(self, index):
        """Recorded WAR for a season index, or None when absent."""
        season = self.seasons.get(index)
        return None if season is None else season.get("war")


def _clean(value):
    if value is None or (isinstance(value, float) and math.isnan(value)) or value is pd.NA:
        return None
    return value


def index_seasons(rows, bio, kind="batter") -> Career:
    """Key a player's merged seasons by ``year - debut_year + 1``.

    Seasons before the debut year are dropped.  A missing birth year leaves
    ``age_at_debut`` undefined and flags the career.
    """
    debut = int(bio["debut_year"])
    seasons = {}
    for rec in (rows.to_dict("records") if isinstance(rows, pd.DataFrame) else rows):
        index = int(rec["year"]) - debut + 1
        if index < 1:
            continue
        rec = {k: _clean(v) for k, v in rec.items() if k != "player_id"}
        seasons[index] = rec
    birth = _clean(bio.get("birth_year"))
    return Career(
        player_id=str(bio["player_id"]),
        debut_year=debut,
        kind=kind,
        seasons=dict(sorted(seasons.items())),
        birth_year=None if birth is None else int(birth),
        bats=bio.get("bats", "unknown"),
        throws=bio.get("throws", "unknown"),
        height=_clean(bio.get("height")),
        weight=_clean(bio.get("weight")),
        position=bio.get("primary_position", "unknown"),
        flags=() if birth is not None else ("unknown_birth_year",),
    )


@dataclass
class Cohort:
    """Included careers plus per-rule exclusion tallies over contemporary players."""

    kind: str
    careers: list[Career]
    contemporary: list[str]
    exclusions: Counter = field(default_factory=Counter)

    def __iter__(self):
        return iter(self.careers)

    def __len__(self):
        return len(self.careers)

    @property
    def player_ids(self):
        return [c.player_id for c in self.careers]


@dataclass(frozen=True)
class CohortRules:
    cutoff_year: int = 1970
    min_span: int = 7
    boundary: int = FREE_AGENCY_BOUNDARY


def _contemporary_bios(dataset, table, rules):
    bios = dataset.bios
    bios = bios[bios["debut_year"].notna()]
    bios = bios[bios["debut_year"] >= rules.cutoff_year]
    return bios[bios["player_id"].isin(set(table["player_id"]))].sort_values("player_id")


def _last_years(dataset):
    years = pd.concat([dataset.batting[["player_id", "year"]],
                       dataset.pitching[["player_id", "year"]]])
    return years.groupby("player_id")["year"].max().to_dict()


def _screen(dataset, table, active_mask, kind, rules, extra_rule=None):
    if not dataset.merged:
        raise ValueError("cohorts need merged seasons")
    bios = _contemporary_bios(dataset, table, rules)
    last_year = _last_years(dataset)
    active = table[active_mask].sort_values(["player_id", "year"])
    by_player = {pid: grp for pid, grp in active.groupby("player_id", sort=False)}
    empty = table.iloc[:0]
    careers, tallies = [], Counter()
    for bio in bios.to_dict("records"):
        pid = bio["player_id"]
        career = index_seasons(by_player.get(pid, empty), bio, kind)
        span = last_year.get(pid, bio["debut_year"]) - bio["debut_year"] + 1
        if career.birth_year is None:
            tallies["unknown_birth_year"] += 1
        elif span < rules.min_span:
            tallies["short_span"] += 1
        elif not any(i <= rules.boundary for i in career.seasons):
            tallies["no_season_before_boundary"] += 1
        elif not any(i > rules.boundary for i in career.seasons):
            tallies["no_season_after_boundary"] += 1
        elif extra_rule is not None and extra_rule(pid):
            tallies[extra_rule.__name__] += 1
        else:
            careers.append(career)
    return Cohort(kind, careers, list(bios["player_id"]), tallies)


def build_pitching_cohort(dataset: Dataset, rules: CohortRules = CohortRules()) -> Cohort:
    """Pitchers with at least one game on each side of the free-agency boundary."""
    table = dataset.pitching
    return _screen(dataset, table, table["games"] >= 1, "pitcher", rules)


def build_batting_cohort(dataset: Dataset, rules: CohortRules = CohortRules(),
                         pitching: Cohort | None = None) -> Cohort:
    """Batters with an at-bat on each side of the boundary who are not in the pitching cohort.

    Seasons with zero at-bats are dropped before the boundary checks.
    """
    if pitching is None:
        pitching = build_pitching_cohort(dataset, rules)
    pitcher_ids = set(pitching.player_ids)

    def in_pitching_cohort(pid):
        return pid in pitcher_ids

    table = dataset.batting
    return _screen(dataset, table, table["at_bats"] > 0, "batter", rules, in_pitching_cohort)


@dataclass(frozen=True)
class CohortReport:
    kind: str
    contemporary_players: int
    included_players: int
    volume_contemporary: int
    volume_included: int

    @property
    def volume_name(self):
        return "at_bats" if self.kind == "batter" else "ipouts"

    @property
    def percent_included(self):
        return _percent(self.included_players, self.contemporary_players)

    @property
    def volume_percent(self):
        return _percent(self.volume_included, self.volume_contemporary)

    def rows(self):
        """Table-shaped rows: (label, contemporary, included, percent); volumes in thousands."""
        unit = "Total ABs (K)" if self.kind == "batter" else "Total IPOUTs (K)"
        return [
            ("Unique Players", self.contemporary_players, self.included_players,
             round(self.percent_included, 1)),
            (unit, round(self.volume_contemporary / 1000), round(self.volume_included / 1000),
             round(self.volume_percent, 1)),
        ]


def _percent(part, whole):
    return 100.0 * part / whole if whole else 0.0


def cohort_report(cohort: Cohort, dataset: Dataset) -> CohortReport:
    table = dataset.batting if cohort.kind == "batter" else dataset.pitching
    column = "at_bats" if cohort.kind == "batter" else "ipouts"
    volume = table.groupby("player_id")[column].sum()
    contemporary = volume.reindex(cohort.contemporary, fill_value=0)
    included = volume.reindex(cohort.player_ids, fill_value=0)
    return CohortReport(cohort.kind, len(cohort.contemporary), len(cohort.careers),
                        int(contemporary.sum()), int(included.sum()))
