"""Exact optima by exhaustive search, and the structured optima of the
compulsory setting (best adjacent pair for the sum, peak of the center for
the max) that the search is checked against."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import (
    Instance,
    InstanceError,
    Objective,
    Placement,
    Preference,
    SettingError,
    max_cost,
    statistics,
    sum_cost,
)
from .zones import peak_of


@dataclass(frozen=True)
class OptResult:
    placement: Placement
    value: Fraction
    all_optima: tuple[Placement, ...]


def _distance_table(inst: Instance) -> list[list[Fraction]]:
    return [[abs(a - ag.x) for a in inst.alternatives] for ag in inst.agents]


def objective_values(inst: Instance, objective: Objective) -> dict[Placement, Fraction]:
    """Objective value of every ordered pair of distinct slots."""
    if inst.m < 2:
        raise InstanceError("insufficient alternatives")
    dist = _distance_table(inst)
    prefs = [ag.pref for ag in inst.agents]
    out: dict[Placement, Fraction] = {}
    for s1 in range(inst.m):
        for s2 in range(inst.m):
            if s1 == s2:
                continue
            costs = []
            for d, p in zip(dist, prefs):
                if p is Preference.F1:
                    costs.append(d[s1])
                elif p is Preference.F2:
                    costs.append(d[s2])
                else:
                    costs.append(d[s1] if d[s1] >= d[s2] else d[s2])
            out[Placement(s1, s2)] = (
                sum(costs, Fraction(0)) if objective is Objective.SUM else max(costs)
            )
    return out


def brute_force_opt(inst: Instance, objective: Objective) -> OptResult:
    values = objective_values(inst, objective)
    best = min(values.values())
    # dict preserves the (slot1, slot2) lexicographic enumeration order
    optima = tuple(p for p, v in values.items() if v == best)
    return OptResult(optima[0], best, optima)


def _require_compulsory(inst: Instance) -> None:
    if not inst.is_compulsory:
        raise SettingError("compulsory setting required")


def opt_sum_in_ap(inst: Instance) -> OptResult:
    """Best adjacent pair under the sum cost (compulsory setting only)."""
    _require_compulsory(inst)
    cands = [Placement(k, k + 1) for k in range(inst.m - 1)]
    values = [sum_cost(p, inst) for p in cands]
    best = min(values)
    optima = tuple(p for p, v in zip(cands, values) if v == best)
    return OptResult(optima[0], best, optima)


def opt_max_center_peak(inst: Instance) -> OptResult:
    """The adjacent pair whose zone contains the center of the profile."""
    _require_compulsory(inst)
    cen = statistics(inst.locations).cen
    k = peak_of(cen, inst.zone_map)
    p = Placement(k, k + 1)
    return OptResult(p, max_cost(p, inst), (p,))
