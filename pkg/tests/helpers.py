"""Small in-memory datasets for unit tests."""
import numpy as np
import pandas as pd

from warcurve.ingest import BATTING_COUNTS, PITCHING_COUNTS, Dataset


def bat(pid, year, at_bats=100, war=np.nan, **counts):
    row = dict.fromkeys(BATTING_COUNTS, 0)
    row.update(games=30, at_bats=at_bats, hits=at_bats // 4)
    row.update(counts)
    return dict(player_id=pid, year=year, team="T", war=war, **row)


def pit(pid, year, games=10, war=np.nan, **counts):
    row = dict.fromkeys(PITCHING_COUNTS, 0)
    row.update(games=games, ipouts=30 * games)
    row.update(counts)
    return dict(player_id=pid, year=year, team="T", war=war, **row)


def bio(pid, debut, birth=None, bats="right", throws="right", pos="SS", height=72.0, weight=190.0):
    return dict(player_id=pid, birth_year=debut - 23 if birth is None else birth,
                debut_year=debut, bats=bats, throws=throws, height=height, weight=weight,
                primary_position=pos)


def dataset(batting=(), pitching=(), bios=()):
    b = pd.DataFrame(list(batting), columns=["player_id", "year", "team", "war", *BATTING_COUNTS])
    p = pd.DataFrame(list(pitching), columns=["player_id", "year", "team", "war", *PITCHING_COUNTS])
    people = pd.DataFrame(list(bios), columns=["player_id", "birth_year", "debut_year", "bats",
                                               "throws", "height", "weight", "primary_position"])
    people["birth_year"] = people["birth_year"].astype("Int64")
    people["debut_year"] = people["debut_year"].astype("Int64")
    return Dataset(b, p, people, pd.DataFrame(), merged=True, war_attached=True)


def career_rows(pid, debut, years, **kw):
    return [bat(pid, y, **kw) for y in years]
