"""Load Lahman-style season tables and WAR files, merge stints, attach WAR."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np
import pandas as pd

from .kvfile import read_kv, parse_kv

logger = logging.getLogger(__name__)

BATTING_COUNTS = (
    "games", "at_bats", "runs", "hits", "doubles", "triples", "home_runs", "rbi",
    "stolen_bases", "caught_stealing", "walks", "strikeouts", "hbp", "sac_flies", "gidp",
)
PITCHING_COUNTS = (
    "wins", "losses", "games", "games_started", "complete_games", "shutouts", "saves",
    "ipouts", "hits", "earned_runs", "home_runs", "walks", "strikeouts", "batters_faced",
)
KEY_FIELDS = ("player_id", "year", "stint_no", "team")

# harder defensive positions first; used to break ties in games played
DEFENSIVE_SPECTRUM = ("P", "C", "SS", "2B", "CF", "3B", "RF", "LF", "1B", "DH")
POSITIONS = DEFENSIVE_SPECTRUM + ("unknown",)
BATS = {"R": "right", "L": "left", "B": "switch", "S": "switch"}
THROWS = {"R": "right", "L": "left"}


class IngestError(Exception):
    """Fatal input problem: missing file or missing required column."""


@dataclass(frozen=True)
class Reject:
    file: str
    line: int
    reason: str


@dataclass
class Dataset:
    """Parsed tables.  Season frames are stint-level until merged."""

    batting: pd.DataFrame
    pitching: pd.DataFrame
    bios: pd.DataFrame
    wars: pd.DataFrame
    rejects: list[Reject] = field(default_factory=list)
    merged: bool = False
    war_attached: bool = False


def default_columns() -> dict[str, str]:
    text = resources.files("warcurve").joinpath("columns.cfg").read_text(encoding="utf-8")
    return parse_kv(text, "columns.cfg")


def load_columns(path=None) -> dict[str, dict[str, str]]:
    """Column mapping grouped by table; a file overrides the defaults key by key."""
    flat = default_columns()
    if path is not None:
        flat.update(read_kv(path))
    tables: dict[str, dict[str, str]] = {}
    for key, header in flat.items():
        table, _, name = key.partition(".")
        tables.setdefault(table, {})[name] = header
    return tables


def _read_raw(path, required: dict[str, str], rejects, optional: dict[str, str] = {}):
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"missing file: {path}")
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if not header:
            raise IngestError(f"{path.name}: no header row")
        rows, lines = [], []
        for record in reader:
            if not record:
                continue
            if len(record) != len(header):
                rejects.append(Reject(path.name, reader.line_num,
                                      f"expected {len(header)} fields, got {len(record)}"))
                continue
            rows.append(record)
            lines.append(reader.line_num)
    position = {h: i for i, h in enumerate(header)}
    out = pd.DataFrame(index=pd.RangeIndex(len(rows)))
    for name, col in required.items():
        if col and col not in position:
            raise IngestError(f"{path.name}: missing required column {col!r}")
    for name, col in {**required, **optional}.items():
        if col and col in position:
            i = position[col]
            out[name] = pd.Series([r[i].strip() for r in rows], dtype=object)
        else:
            out[name] = pd.Series([""] * len(rows), dtype=object)
    out["_line"] = np.asarray(lines, dtype=np.int64)
    return out


def _parse_numbers(df, fields, file, rejects, *, integer=True, blank=0.0):
    """Convert text columns in place; rows with unparseable cells are dropped."""
    bad = pd.Series(False, index=df.index)
    reasons = pd.Series("", index=df.index)
    for name in fields:
        text = df[name]
        values = pd.to_numeric(text, errors="coerce")
        is_blank = text == ""
        broken = values.isna() & ~is_blank
        if integer:
            broken |= values.notna() & (values != np.floor(values))
        new = broken & ~bad
        reasons[new] = [f"{name}: cannot parse {v!r}" for v in text[new]]
        bad |= broken
        df[name] = values.where(~is_blank, blank)
    for line, reason in zip(df.loc[bad, "_line"], reasons[bad]):
        rejects.append(Reject(file, int(line), reason))
    return df.loc[~bad].copy()


def _reject_where(df, mask, reason, file, rejects):
    for line in df.loc[mask, "_line"]:
        rejects.append(Reject(file, int(line), reason))
    return df.loc[~mask]


def _load_stints(path, columns, counts, rejects):
    file = Path(path).name
    df = _read_raw(path, {k: columns[k] for k in KEY_FIELDS + counts}, rejects)
    df = _reject_where(df, df["player_id"] == "", "player_id: blank", file, rejects)
    for name in ("year", "stint_no"):
        df = _reject_where(df, df[name] == "", f"{name}: blank", file, rejects)
    df = _parse_numbers(df, ("year", "stint_no") + counts, file, rejects)
    df = _reject_where(df, (df[list(counts)] < 0).any(axis=1), "negative count", file, rejects)
    df = _reject_where(df, df["stint_no"] < 1, "stint_no below 1", file, rejects)
    dup = df.duplicated(["player_id", "year", "stint_no"], keep="first")
    df = _reject_where(df, dup, "duplicate (player_id, year, stint_no)", file, rejects)
    for name in ("year", "stint_no") + counts:
        df[name] = df[name].astype(np.int64)
    return df.reset_index(drop=True)


def load_batting(path, columns, rejects):
    df = _load_stints(path, columns, BATTING_COUNTS, rejects)
    file = Path(path).name
    df = _reject_where(df, df["hits"] > df["at_bats"], "hits exceed at_bats", file, rejects)
    xbh = df["doubles"] + df["triples"] + df["home_runs"]
    df = _reject_where(df, xbh > df["hits"], "extra-base hits exceed hits", file, rejects)
    return df.reset_index(drop=True)


def load_pitching(path, columns, rejects):
    df = _load_stints(path, columns, PITCHING_COUNTS, rejects)
    file = Path(path).name
    bad = (df["complete_games"] > df["games_started"]) | (df["games_started"] > df["games"])
    df = _reject_where(df, bad, "need complete_games <= games_started <= games", file, rejects)
    return df.reset_index(drop=True)


def load_fielding(path, columns, rejects):
    file = Path(path).name
    df = _read_raw(path, {k: columns[k] for k in ("player_id", "year", "position", "games")},
                   rejects)
    df = _parse_numbers(df, ("year", "games"), file, rejects)
    df = _reject_where(df, df["games"] < 0, "negative count", file, rejects)
    return df.reset_index(drop=True)


def derive_primary_position(fielding, player_id):
    """Position with the most career games; ties go to the harder position.

    Aggregate ``OF`` rows are only used when the player has no LF/CF/RF
    rows, and then count as LF.
    """
    rows = fielding[fielding["player_id"] == player_id]
    return _primary_position(rows["position"], rows["games"])


def _primary_position(positions, games):
    totals: dict[str, float] = {}
    for pos, g in zip(positions, games):
        totals[str(pos).upper()] = totals.get(str(pos).upper(), 0.0) + float(g)
    of_total = totals.pop("OF", None)
    if of_total is not None and not {"LF", "CF", "RF"} & totals.keys():
        totals["LF"] = of_total
    totals = {p: g for p, g in totals.items() if p in DEFENSIVE_SPECTRUM}
    if not totals:
        return "unknown"
    return min(totals, key=lambda p: (-totals[p], DEFENSIVE_SPECTRUM.index(p)))


def load_people(path, columns, rejects, fielding, first_years):
    file = Path(path).name
    cols = columns
    df = _read_raw(path, {k: cols[k] for k in ("player_id", "birth_year", "bats", "throws",
                                               "height", "weight")},
                   rejects, optional={"debut": cols.get("debut", "")})
    df = _reject_where(df, df["player_id"] == "", "player_id: blank", file, rejects)
    df = _reject_where(df, df["player_id"].duplicated(), "duplicate player_id", file, rejects)
    df = _parse_numbers(df, ("birth_year",), file, rejects, blank=np.nan)
    df = _parse_numbers(df, ("height", "weight"), file, rejects, integer=False, blank=np.nan)

    debut = pd.to_numeric(df["debut"].str.slice(0, 4), errors="coerce")
    fallback = df["player_id"].map(first_years)
    df["debut_year"] = debut.fillna(fallback)

    too_young = df["debut_year"] < df["birth_year"] + 15
    for line in df.loc[too_young, "_line"]:
        rejects.append(Reject(file, int(line), "debut_year before birth_year + 15; birth year dropped"))
    df.loc[too_young, "birth_year"] = np.nan

    df["bats"] = df["bats"].str.upper().map(BATS).fillna("unknown")
    df["throws"] = df["throws"].str.upper().map(THROWS).fillna("unknown")
    by_player = fielding.groupby("player_id", sort=False)
    positions = {pid: _primary_position(g["position"], g["games"]) for pid, g in by_player}
    df["primary_position"] = df["player_id"].map(positions).fillna("unknown")
    df["birth_year"] = df["birth_year"].astype("Int64")
    df["debut_year"] = df["debut_year"].astype("Int64")
    keep = ["player_id", "birth_year", "debut_year", "bats", "throws", "height", "weight",
            "primary_position", "_line"]
    return df[keep].reset_index(drop=True)


def load_war(paths, columns, rejects):
    frames = []
    for path in paths:
        file = Path(path).name
        df = _read_raw(path, {k: columns[k] for k in ("player_id", "year", "kind", "war")},
                       rejects)
        df = _reject_where(df, df["player_id"] == "", "player_id: blank", file, rejects)
        df = _reject_where(df, df["war"] == "", "war: blank", file, rejects)
        df = _parse_numbers(df, ("year",), file, rejects)
        df = _parse_numbers(df, ("war",), file, rejects, integer=False)
        kind = df["kind"].str.lower().map({"batting": "batting", "bat": "batting",
                                           "pitching": "pitching", "pitch": "pitching"})
        df = _reject_where(df, kind.isna(), "kind must be batting or pitching", file, rejects)
        df["kind"] = kind[kind.notna()]
        df["file"] = file
        frames.append(df)
    if not frames:
        return pd.DataFrame({"player_id": pd.Series(dtype=str), "year": pd.Series(dtype=np.int64),
                             "kind": pd.Series(dtype=str), "war": pd.Series(dtype=float),
                             "file": pd.Series(dtype=str), "_line": pd.Series(dtype=np.int64)})
    wars = pd.concat(frames, ignore_index=True)
    wars["year"] = wars["year"].astype(np.int64)
    # stint-level WAR rows add up to the season value
    grouped = wars.groupby(["player_id", "year", "kind"], sort=True, as_index=False)
    return grouped.agg(war=("war", "sum"), file=("file", "first"), _line=("_line", "first"))


def load_dataset(batting_path, pitching_path, people_path, fielding_path, war_paths,
                 columns_path=None) -> Dataset:
    """Parse every table.  Malformed rows go to ``Dataset.rejects``; missing files
    and missing columns raise :class:`IngestError`."""
    cols = load_columns(columns_path)
    rejects: list[Reject] = []
    batting = load_batting(batting_path, cols["batting"], rejects)
    pitching = load_pitching(pitching_path, cols["pitching"], rejects)
    fielding = load_fielding(fielding_path, cols["fielding"], rejects)
    years = pd.concat([batting[["player_id", "year"]], pitching[["player_id", "year"]],
                       fielding[["player_id", "year"]]])
    first_years = years.groupby("player_id")["year"].min()
    bios = load_people(people_path, cols["people"], rejects, fielding, first_years)
    wars = load_war(list(war_paths), cols["war"], rejects)

    known = set(bios["player_id"])
    batting = _reject_where(batting, ~batting["player_id"].isin(known), "unknown player_id",
                            Path(batting_path).name, rejects)
    pitching = _reject_where(pitching, ~pitching["player_id"].isin(known), "unknown player_id",
                             Path(pitching_path).name, rejects)
    logger.info("loaded %d batting stints, %d pitching stints, %d players, %d WAR records "
                "(%d rejects)", len(batting), len(pitching), len(bios), len(wars), len(rejects))
    return Dataset(batting.drop(columns="_line").reset_index(drop=True),
                   pitching.drop(columns="_line").reset_index(drop=True),
                   bios.drop(columns="_line"), wars, rejects)


def _merge_frame(df, counts):
    if "stint_no" not in df.columns:
        return df.sort_values(["player_id", "year"], kind="stable").reset_index(drop=True)
    ordered = df.sort_values(["player_id", "year", "stint_no"], kind="stable")
    grouped = ordered.groupby(["player_id", "year"], sort=True)
    merged = grouped[list(counts)].sum()
    merged.insert(0, "team", grouped["team"].last())
    return merged.reset_index()[["player_id", "year", "team", *counts]]


def merge_stints(dataset: Dataset) -> Dataset:
    """Sum stints of one (player, year); the season's team is the last stint's."""
    return replace(dataset,
                   batting=_merge_frame(dataset.batting, BATTING_COUNTS),
                   pitching=_merge_frame(dataset.pitching, PITCHING_COUNTS),
                   merged=True)


def attach_war(dataset: Dataset) -> Dataset:
    """Add a ``war`` column to merged seasons; NaN marks an absent record."""
    if not dataset.merged:
        raise ValueError("merge stints before attaching WAR")
    rejects = list(dataset.rejects)
    wars = dataset.wars
    unknown = ~wars["player_id"].isin(set(dataset.bios["player_id"]))
    for file, line in zip(wars.loc[unknown, "file"], wars.loc[unknown, "_line"]):
        rejects.append(Reject(file, int(line), "WAR record for unknown player_id"))
    wars = wars.loc[~unknown]

    def join(seasons, kind):
        part = wars.loc[wars["kind"] == kind, ["player_id", "year", "war"]]
        base = seasons.drop(columns="war", errors="ignore")
        return base.merge(part, on=["player_id", "year"], how="left")

    return replace(dataset, batting=join(dataset.batting, "batting"),
                   pitching=join(dataset.pitching, "pitching"), wars=wars,
                   rejects=rejects, war_attached=True)


def write_rejects(rejects, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["file", "line", "reason"])
        for r in rejects:
            writer.writerow([r.file, r.line, r.reason])
