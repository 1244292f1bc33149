"""Seeded synthetic league written in the same CSV formats ingest reads.

WAR follows a quadratic aging curve around a player-specific talent level::

    war = talent - curvature * (age - peak_age)**2 + noise

Counting stats are derived from the season's noise-free WAR so they carry
signal the way real box-score totals do.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .numerics import seeded_stream

FIELD_POSITIONS = ("C", "1B", "2B", "3B", "SS", "LF", "CF", "RF")

BATTING_HEADER = ["playerID", "yearID", "stint", "teamID", "lgID", "G", "AB", "R", "H", "2B",
                  "3B", "HR", "RBI", "SB", "CS", "BB", "SO", "IBB", "HBP", "SH", "SF", "GIDP"]
PITCHING_HEADER = ["playerID", "yearID", "stint", "teamID", "lgID", "W", "L", "G", "GS", "CG",
                   "SHO", "SV", "IPouts", "H", "ER", "HR", "BB", "SO", "BAOpp", "ERA", "IBB",
                   "WP", "HBP", "BK", "BFP", "GF", "R", "SH", "SF", "GIDP"]
PEOPLE_HEADER = ["playerID", "birthYear", "birthMonth", "nameFirst", "nameLast", "weight",
                 "height", "bats", "throws", "debut"]
FIELDING_HEADER = ["playerID", "yearID", "stint", "teamID", "lgID", "POS", "G"]
WAR_HEADER = ["player_id", "year", "kind", "war"]


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_players: int = 500
    peak_age: float = 28.0
    curvature: float = 0.03
    noise_sd: float = 0.3
    retirement_hazard: float = 0.1
    talent_mean: float = 1.5
    talent_sd: float = 1.5
    pitcher_share: float = 0.45
    short_career_share: float = 0.1
    max_seasons: int = 15

    def __post_init__(self):
        if self.n_players < 10:
            raise ValueError("n_players must be >= 10")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")
        if not 0 <= self.retirement_hazard <= 1:
            raise ValueError("retirement_hazard must be a probability")

    def true_war(self, talent, age):
        return talent - self.curvature * (age - self.peak_age) ** 2

    def true_delta(self, age):
        """Expected WAR change from ``age`` to ``age + 1``."""
        return -self.curvature * (2 * (age - self.peak_age) + 1)


@dataclass
class SynthLeague:
    batting: Path
    pitching: Path
    people: Path
    fielding: Path
    war: list[Path]
    truth: pd.DataFrame

    def paths(self):
        return dict(batting_path=self.batting, pitching_path=self.pitching,
                    people_path=self.people, fielding_path=self.fielding, war_paths=self.war)


def _fmt(x):
    return format(float(x), ".17g")


def _batting_line(war, rng):
    g = int(np.clip(round(120 + 8 * war + rng.integers(-5, 6)), 20, 162))
    ab = int(round(3.6 * g))
    h = int(np.clip(round(ab * (0.250 + 0.008 * war)), 0, ab))
    hr = int(np.clip(round(ab * (0.025 + 0.004 * war)), 0, h))
    d2 = int(min(round(0.2 * h), h - hr))
    d3 = int(min(round(0.02 * h), h - hr - d2))
    bb = max(0, int(round(ab * (0.08 + 0.005 * war))))
    so = int(round(ab * 0.18))
    r = int(round(0.45 * h + 0.3 * hr))
    rbi = int(round(0.4 * h + 0.6 * hr))
    sb = max(0, int(round(5 + 2 * war)))
    cs = sb // 3
    return [g, ab, r, h, d2, d3, hr, rbi, sb, cs, bb, so, 2, 3, 2, 4, 10]


def _pitching_line(war, starter, rng):
    if starter:
        g = gs = 32
        cg = int(np.clip(round(1 + 0.8 * war), 0, gs))
        ipouts = 3 * int(max(10, round(180 + 10 * war)))
        sv = 0
    else:
        g = 60 + int(rng.integers(-5, 6))
        gs = cg = 0
        ipouts = 3 * int(max(10, round(65 + 5 * war)))
        sv = max(0, int(round(5 + 4 * war)))
    sho = min(cg, max(0, int(round(0.3 * war))))
    innings = ipouts / 3
    h = max(0, int(round(innings * (0.95 - 0.03 * war))))
    er = max(0, int(round(innings / 9 * (4.3 - 0.35 * war))))
    hr = max(0, int(round(innings * 0.1)))
    bb = max(0, int(round(innings * (0.35 - 0.02 * war))))
    so = max(0, int(round(innings * (0.75 + 0.05 * war))))
    w = max(0, int(round(innings / 20 + war)))
    losses = max(0, int(round(innings / 22 - 0.5 * war)))
    bfp = ipouts + h + bb + 5
    return dict(W=w, L=losses, G=g, GS=gs, CG=cg, SHO=sho, SV=sv, IPouts=ipouts, H=h, ER=er,
                HR=hr, BB=bb, SO=so, BFP=bfp)


def _split(values, frac):
    first = [int(np.floor(v * frac)) for v in values]
    return first, [v - f for v, f in zip(values, first)]


def _valid_batting(line):
    g, ab, r, h, d2, d3, hr = line[:7]
    return h <= ab and d2 + d3 + hr <= h and min(line) >= 0


def generate_synthetic_league(config: SynthConfig, out_dir) -> SynthLeague:
    """Write Batting/Pitching/People/Fielding CSVs plus two WAR files into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = seeded_stream(config.seed, "synth-league")
    batting, pitching, people, fielding = [], [], [], []
    war_bat, war_pit, truth = [], [], []
    teams = [f"T{k:02d}" for k in range(20)]

    for p in range(config.n_players):
        pid = f"syn{p:05d}"
        pitcher = rng.random() < config.pitcher_share
        starter = bool(rng.random() < 0.5)
        birth = int(rng.integers(1942, 1982))
        debut_age = int(rng.integers(21, 26))
        debut = birth + debut_age
        talent = rng.normal(config.talent_mean, config.talent_sd)
        if rng.random() < config.short_career_share:
            n_seasons = int(rng.integers(1, 7))
        else:
            n_seasons = 6
            while n_seasons < config.max_seasons and rng.random() >= config.retirement_hazard:
                n_seasons += 1
        position = "P" if pitcher else FIELD_POSITIONS[int(rng.integers(len(FIELD_POSITIONS)))]
        bats = "RLB"[int(rng.integers(3))]
        throws = "RL"[int(rng.integers(2))]
        people.append([pid, birth, int(rng.integers(1, 13)), "Syn", f"Player{p}",
                       int(rng.integers(170, 231)), int(rng.integers(69, 78)), bats, throws,
                       f"{debut}-04-15"])
        team = teams[int(rng.integers(len(teams)))]
        for index in range(1, n_seasons + 1):
            year = debut + index - 1
            age = year - birth
            base = config.true_war(talent, age)
            war = base + (rng.normal(0, config.noise_sd) if config.noise_sd > 0 else 0.0)
            truth.append([pid, "pitcher" if pitcher else "batter", year, index, age,
                          talent, base, war])
            split = rng.random() < 0.08
            if pitcher:
                line = _pitching_line(base, starter, rng)
                war_pit.append([pid, year, "pitching", _fmt(war)])
                at_bats = int(rng.integers(0, 40)) if rng.random() < 0.3 else 0
                hits = at_bats // 6
                batting.append([pid, year, 1, team, "NL", line["G"], at_bats, 0, hits,
                                0, 0, 0, 0, 0, 0, 0, at_bats // 3, 0, 0, 0, 0, 0])
                pitching.append([pid, year, 1, team, "NL", *line.values()])
                fielding.append([pid, year, 1, team, "NL", "P", line["G"]])
            else:
                line = _batting_line(base, rng)
                war_bat.append([pid, year, "batting", _fmt(war)])
                stints = [line]
                if split:
                    first, second = _split(line, float(rng.uniform(0.3, 0.7)))
                    if _valid_batting(first) and _valid_batting(second):
                        stints = [first, second]
                for s, stint in enumerate(stints, start=1):
                    stint_team = team if s == len(stints) else teams[(teams.index(team) + 1) % 20]
                    batting.append([pid, year, s, stint_team, "AL", *stint])
                    fielding.append([pid, year, s, stint_team, "AL", position, stint[0]])
            if rng.random() < 0.05:
                team = teams[int(rng.integers(len(teams)))]

    def dump(name, header, rows):
        path = out / name
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        return path

    pitching_rows = []
    for row in pitching:
        pid, year, stint, team, lg, w, l_, g, gs, cg, sho, sv, ipouts, h, er, hr, bb, so, bfp = row
        era = f"{27 * er / ipouts:.2f}" if ipouts else ""
        pitching_rows.append([pid, year, stint, team, lg, w, l_, g, gs, cg, sho, sv, ipouts, h,
                              er, hr, bb, so, "", era, 0, 0, 0, 0, bfp, 0, er, 0, 0, 0])
    league = SynthLeague(
        batting=dump("Batting.csv", BATTING_HEADER, batting),
        pitching=dump("Pitching.csv", PITCHING_HEADER, pitching_rows),
        people=dump("People.csv", PEOPLE_HEADER, people),
        fielding=dump("Fielding.csv", FIELDING_HEADER, fielding),
        war=[dump("war_batting.csv", WAR_HEADER, war_bat),
             dump("war_pitching.csv", WAR_HEADER, war_pit)],
        truth=pd.DataFrame(truth, columns=["player_id", "kind", "year", "season_index", "age",
                                           "talent", "true_war", "war"]),
    )
    league.truth.to_csv(out / "truth.csv", index=False, float_format="%.17g")
    return league
