import numpy as np
import pandas as pd
import pytest

from helpers import bat, bio, career_rows, dataset, pit
from warcurve.cohort import (
    CohortRules,
    build_batting_cohort,
    build_pitching_cohort,
    cohort_report,
    index_seasons,
)


def test_index_contiguous():
    rows = pd.DataFrame(career_rows("a", 1990, range(1990, 1997)))
    career = index_seasons(rows, bio("a", 1990, birth=1968))
    assert list(career.seasons) == [1, 2, 3, 4, 5, 6, 7]
    assert career.age_at_debut == 22


def test_index_gap_years_consume_indices():
    rows = pd.DataFrame(career_rows("a", 1990, [1990, 1992]))
    career = index_seasons(rows, bio("a", 1990))
    assert list(career.seasons) == [1, 3]
    assert 2 not in career.seasons


def test_unknown_birth_flagged():
    b = bio("a", 1990)
    b["birth_year"] = pd.NA
    career = index_seasons(pd.DataFrame(career_rows("a", 1990, [1990])), b)
    assert career.age_at_debut is None
    assert "unknown_birth_year" in career.flags


def league():
    return dataset(
        batting=[
            *career_rows("early", 1965, range(1965, 1975)),
            *career_rows("short", 1980, range(1980, 1986)),       # years 1-6 only
            *career_rows("good", 1980, range(1980, 1990)),
            *career_rows("gap", 1980, [1980, 1987]),
            bat("zeroab", 1980, at_bats=0), *career_rows("zeroab", 1981, range(1981, 1986)),
            bat("zeroab", 1987, at_bats=0), bat("zeroab", 1988, at_bats=0),
            *career_rows("twoway", 1990, range(1990, 2000), at_bats=20),
            *career_rows("nobirth", 1980, range(1980, 1990)),
        ],
        pitching=[
            pit("twoway", 1991), pit("twoway", 1998),
            pit("arm", 1990, games=1), pit("arm", 1997, games=1),
            *[pit("young", y) for y in range(1990, 1995)],
        ],
        bios=[bio("early", 1965), bio("short", 1980), bio("good", 1980), bio("gap", 1980),
              bio("zeroab", 1980), bio("twoway", 1990), bio("arm", 1990), bio("young", 1990),
              {**bio("nobirth", 1980), "birth_year": None}],
    )


def test_batting_rules():
    ds = league()
    cohort = build_batting_cohort(ds)
    assert cohort.player_ids == ["gap", "good"]
    assert "early" not in cohort.contemporary
    assert cohort.exclusions["short_span"] == 1  # short
    assert cohort.exclusions["no_season_after_boundary"] == 1  # zeroab
    assert cohort.exclusions["in_pitching_cohort"] == 1
    assert cohort.exclusions["unknown_birth_year"] == 1
    assert sum(cohort.exclusions.values()) == len(cohort.contemporary) - len(cohort)


def test_pitching_rules():
    cohort = build_pitching_cohort(league())
    assert cohort.player_ids == ["arm", "twoway"]
    assert cohort.exclusions["short_span"] == 1  # young: years 1-5 only


def test_cohorts_disjoint_and_boundary_invariant():
    ds = league()
    p = build_pitching_cohort(ds)
    b = build_batting_cohort(ds, pitching=p)
    assert not set(p.player_ids) & set(b.player_ids)
    for career in [*p, *b]:
        assert any(i <= 6 for i in career.seasons) and any(i >= 7 for i in career.seasons)
        assert career.span >= 7


def test_cutoff_is_configurable():
    cohort = build_batting_cohort(league(), CohortRules(cutoff_year=1960))
    assert "early" in cohort.player_ids


def test_empty_report():
    ds = dataset()
    report = cohort_report(build_batting_cohort(ds), ds)
    assert report.contemporary_players == report.included_players == 0
    assert report.percent_included == 0 and report.volume_percent == 0


def test_report_hand_count():
    ds = league()
    report = cohort_report(build_batting_cohort(ds), ds)
    # contemporary batters: short, good, gap, zeroab, twoway, nobirth
    assert report.contemporary_players == 6
    assert report.included_players == 2
    assert report.volume_contemporary == 600 + 1000 + 200 + 500 + 200 + 1000
    assert report.volume_included == 1200
    assert report.percent_included == pytest.approx(100 * 2 / 6)
    assert report.rows()[0] == ("Unique Players", 6, 2, 33.3)
    p = cohort_report(build_pitching_cohort(ds), ds)
    assert (p.contemporary_players, p.included_players) == (3, 2)
    assert p.volume_included == 30 * (1 + 1 + 10 + 10)
