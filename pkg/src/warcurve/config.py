"""Run configuration read from a flat ``key = value`` file.

Recognized keys (all optional)::

    data_dir          directory holding the input CSVs            (data)
    batting           batting stints file, relative to data_dir   (Batting.csv)
    pitching          pitching stints file                        (Pitching.csv)
    people            biographical file                           (People.csv)
    fielding          fielding file                               (Fielding.csv)
    war               comma-separated WAR files                   (war_batting.csv, war_pitching.csv)
    columns           column-mapping file overriding columns.cfg  (none)
    out               output directory                            (reports)
    seed              global run seed                             (0)
    cohorts           batters, pitchers or both                   (both)
    years             target seasons, "7..11" or "7, 9"           (7..11)
    policy            missing-WAR value: zero, -0.5 or -1         (zero)
    cutoff_year       earliest debut year kept                    (1970)
    min_span          minimum career span in years                (7)
    retained_features features kept by RFE                        (20)
    train_fraction    share of players in the training split      (0.8)
    folds             cross-validation folds                      (3)
    grid.<model>.<param>  comma list or integer range "a..b"; replaces that
                      model's default values for the parameter
    synth.<field>     synthetic-league settings used by the synth command
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields
from pathlib import Path

from .fixtures import SynthConfig
from .kvfile import read_kv
from .models import MODEL_KINDS
from .selection import DEFAULT_GRIDS

COHORT_CHOICES = {"batters": ("batters",), "pitchers": ("pitchers",),
                  "both": ("batters", "pitchers")}


class ConfigError(ValueError):
    def __init__(self, problems):
        self.problems = problems
        super().__init__("invalid config: " + "; ".join(problems))


def parse_years(text):
    text = str(text).strip()
    if ".." in text:
        lo, hi = (int(p) for p in text.split(".."))
        return list(range(lo, hi + 1))
    return [int(p) for p in text.split(",") if p.strip()]


def parse_value(text):
    text = text.strip()
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    try:
        return int(text)
    except ValueError:
        return float(text)


def parse_grid_values(text):
    text = text.strip()
    if ".." in text and "," not in text:
        lo, hi = (int(p) for p in text.split(".."))
        return list(range(lo, hi + 1))
    return [parse_value(p) for p in text.split(",") if p.strip()]


@dataclass
class RunConfig:
    data_dir: str = "data"
    batting: str = "Batting.csv"
    pitching: str = "Pitching.csv"
    people: str = "People.csv"
    fielding: str = "Fielding.csv"
    war: list = field(default_factory=lambda: ["war_batting.csv", "war_pitching.csv"])
    columns: str = ""
    out: str = "reports"
    seed: int = 0
    cohorts: str = "both"
    years: list = field(default_factory=lambda: list(range(7, 12)))
    policy: str = "zero"
    cutoff_year: int = 1970
    min_span: int = 7
    retained_features: int = 20
    train_fraction: float = 0.8
    folds: int = 3
    grids: dict = field(default_factory=lambda: {k: dict(v) for k, v in DEFAULT_GRIDS.items()})
    synth: dict = field(default_factory=dict)
    source_text: str = ""

    @property
    def cohort_names(self):
        return COHORT_CHOICES[self.cohorts]

    def path(self, name):
        p = Path(name)
        return p if p.is_absolute() else Path(self.data_dir) / p

    def input_paths(self):
        return dict(batting_path=self.path(self.batting), pitching_path=self.path(self.pitching),
                    people_path=self.path(self.people), fielding_path=self.path(self.fielding),
                    war_paths=[self.path(w) for w in self.war],
                    columns_path=self.path(self.columns) if self.columns else None)

    def synth_config(self):
        return SynthConfig(**{"seed": self.seed, **self.synth})

    def digest(self):
        items = [f"{f.name}={getattr(self, f.name)!r}" for f in fields(self)
                 if f.name not in ("source_text", "out")]
        return hashlib.sha256("\n".join(items).encode()).hexdigest()[:16]

    def validate(self):
        problems = []
        if self.policy not in ("zero", "penalty-0.5", "penalty-1"):
            problems.append("policy: expected zero, -0.5 or -1")
        if self.cohorts not in COHORT_CHOICES:
            problems.append("cohorts: expected batters, pitchers or both")
        if not self.years or any(y not in range(7, 12) for y in self.years):
            problems.append("years: every target year must lie in 7..11")
        if self.retained_features < 1:
            problems.append("retained_features: must be >= 1")
        if not 0 < self.train_fraction < 1:
            problems.append("train_fraction: must lie strictly between 0 and 1")
        if self.folds < 2:
            problems.append("folds: must be >= 2")
        if self.min_span < 1:
            problems.append("min_span: must be >= 1")
        for model, grid in self.grids.items():
            if model not in MODEL_KINDS:
                problems.append(f"grid.{model}: unknown model")
            for param, values in grid.items():
                if not values:
                    problems.append(f"grid.{model}.{param}: empty")
        valid_synth = {f.name for f in fields(SynthConfig)}
        for key in self.synth:
            if key not in valid_synth:
                problems.append(f"synth.{key}: unknown setting")
        if problems:
            raise ConfigError(problems)
        return self


_SCALARS = {"data_dir": str, "batting": str, "pitching": str, "people": str, "fielding": str,
            "columns": str, "out": str, "seed": int, "cohorts": str, "cutoff_year": int,
            "min_span": int, "retained_features": int, "train_fraction": float, "folds": int}


def config_from_entries(entries: dict[str, str], source_text="") -> RunConfig:
    from .features import parse_policy

    cfg = RunConfig(source_text=source_text)
    problems = []
    for key, raw in entries.items():
        try:
            if key in _SCALARS:
                setattr(cfg, key, _SCALARS[key](raw))
            elif key == "war":
                cfg.war = [w.strip() for w in raw.split(",") if w.strip()]
            elif key == "years":
                cfg.years = parse_years(raw)
            elif key == "policy":
                cfg.policy = parse_policy(raw)
            elif key.startswith("grid."):
                _, model, param = key.split(".", 2)
                cfg.grids.setdefault(model, {})[param] = parse_grid_values(raw)
            elif key.startswith("synth."):
                cfg.synth[key[len("synth."):]] = parse_value(raw)
            else:
                problems.append(f"{key}: unknown key")
        except ValueError as exc:
            problems.append(f"{key}: {exc}")
    if problems:
        raise ConfigError(problems)
    return cfg


def load_config(path=None) -> RunConfig:
    if path is None:
        return RunConfig()
    text = Path(path).read_text(encoding="utf-8")
    return config_from_entries(read_kv(path), text)
