"""Delta-method aging curve: average year-over-year WAR change by age."""
from __future__ import annotations

import bisect
import csv
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .cohort import FREE_AGENCY_BOUNDARY, Career


@dataclass
class AgingCurve:
    """``deltas[a] = (mean WAR change from age a to a + 1, number of players)``."""

    deltas: dict[int, tuple[float, int]] = field(default_factory=dict)

    def delta(self, age):
        """Delta at ``age``; ages the curve lacks borrow the nearest age (lower on ties)."""
        if not self.deltas:
            return 0.0
        if age in self.deltas:
            return self.deltas[age][0]
        ages = sorted(self.deltas)
        pos = bisect.bisect_left(ages, age)
        if pos == 0:
            return self.deltas[ages[0]][0]
        if pos == len(ages):
            return self.deltas[ages[-1]][0]
        lower, upper = ages[pos - 1], ages[pos]
        nearest = lower if age - lower <= upper - age else upper
        return self.deltas[nearest][0]

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["age", "delta", "n"])
            for age in sorted(self.deltas):
                mean, n = self.deltas[age]
                writer.writerow([age, format(mean, ".10g"), n])


def war_by_age(career: Career):
    if career.birth_year is None:
        return {}
    return {career.age(i): s["war"] for i, s in career.seasons.items() if s.get("war") is not None}


def fit_aging_curve(careers) -> AgingCurve:
    """Unweighted mean of ``WAR(a+1) - WAR(a)`` over players with WAR at both ages."""
    sums: dict[int, float] = defaultdict(float)
    counts: dict[int, int] = defaultdict(int)
    for career in careers:
        wars = war_by_age(career)
        for age, war in wars.items():
            if age + 1 in wars:
                sums[age] += wars[age + 1] - war
                counts[age] += 1
    return AgingCurve({age: (sums[age] / counts[age], counts[age]) for age in sorted(counts)})


def predict_delta_method(career: Career, curve: AgingCurve, target_year: int,
                         base_fill: float = 0.0) -> float:
    """Chain deltas forward from season-6 WAR to season ``target_year``.

    A missing season-6 WAR starts the chain from ``base_fill``; use
    :func:`base_is_imputed` to flag those players.
    """
    if not FREE_AGENCY_BOUNDARY < target_year:
        raise ValueError("target_year must come after the free-agency boundary")
    base = career.war(FREE_AGENCY_BOUNDARY)
    value = base_fill if base is None else float(base)
    age = career.age(FREE_AGENCY_BOUNDARY)
    for step in range(target_year - FREE_AGENCY_BOUNDARY):
        value += curve.delta(age + step)
    return value


def base_is_imputed(career: Career) -> bool:
    return career.war(FREE_AGENCY_BOUNDARY) is None


def delta_predictions(careers, curve, target_year, base_fill=0.0):
    careers = list(careers)
    values = np.array([predict_delta_method(c, curve, target_year, base_fill) for c in careers])
    return values, np.array([base_is_imputed(c) for c in careers], dtype=bool)
