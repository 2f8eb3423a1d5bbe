"""Deterministic mechanisms for locating F1 and F2.

Every "break ties deterministically" choice resolves to the left: the zone
containing the statistic for adjacent pairs, and the smallest coordinate
(then smallest slot) for single facilities.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .model import (
    Instance,
    InstanceError,
    Objective,
    Placement,
    SettingError,
    lower_median,
    order_statistic,
    partition_by_preference,
)
from .oracle import brute_force_opt
from .zones import peak_of


def _peak_placement(point: Fraction, inst: Instance) -> Placement:
    k = peak_of(point, inst.zone_map)
    return Placement(k, k + 1)


def _require_compulsory(inst: Instance) -> None:
    if not inst.is_compulsory:
        raise SettingError("compulsory setting required")


def nearest_slot(
    point: Fraction, candidates: Sequence[Fraction], exclude: Optional[int] = None
) -> tuple[Fraction, int]:
    """Leftmost slot of ``candidates`` (sorted) closest to ``point``."""
    best_slot = -1
    best_d: Optional[Fraction] = None
    for slot, a in enumerate(candidates):
        if slot == exclude:
            continue
        d = abs(a - point)
        if best_d is None or d < best_d:
            best_slot, best_d = slot, d
    if best_d is None:
        raise InstanceError("no candidate alternatives")
    return candidates[best_slot], best_slot


def sc_mechanism(
    locations: Sequence[Fraction], candidates: Sequence[Fraction], exclude: Optional[int] = None
) -> tuple[Fraction, int]:
    """Single facility at the alternative nearest the (lower) median."""
    return nearest_slot(lower_median(locations), candidates, exclude)


def mc_mechanism(
    locations: Sequence[Fraction], candidates: Sequence[Fraction], exclude: Optional[int] = None
) -> tuple[Fraction, int]:
    """Single facility at the alternative nearest the leftmost location."""
    if not locations:
        raise ValueError("empty location set")
    return nearest_slot(min(locations), candidates, exclude)


def _fallback_slot(used: int) -> int:
    return 1 if used == 0 else 0


def mechanism_1(inst: Instance) -> Placement:
    _require_compulsory(inst)
    return _peak_placement(lower_median(inst.locations), inst)


def mechanism_2(inst: Instance) -> Placement:
    _require_compulsory(inst)
    return _peak_placement(min(inst.locations), inst)


def order_statistic_mechanism(inst: Instance, i: int) -> Placement:
    _require_compulsory(inst)
    return _peak_placement(order_statistic(inst.locations, i), inst)


SingleRule = Callable[[Sequence[Fraction], Sequence[Fraction], Optional[int]], tuple[Fraction, int]]


def _two_stage(
    inst: Instance, rule: SingleRule, n1: Sequence[int], n2: Sequence[int], f1_first: bool
) -> Placement:
    alts = inst.alternatives
    xs = inst.locations
    first, second = (n1, n2) if f1_first else (n2, n1)
    _, s_first = rule([xs[i] for i in first], alts, None)
    if second:
        _, s_second = rule([xs[i] for i in second], alts, s_first)
    else:
        s_second = _fallback_slot(s_first)
    return Placement(s_first, s_second) if f1_first else Placement(s_second, s_first)


def mechanism_3(inst: Instance) -> Placement:
    n1, n2, n12 = partition_by_preference(inst)
    xs = inst.locations
    if n12:
        return _peak_placement(lower_median([xs[i] for i in n12]), inst)
    return _two_stage(inst, sc_mechanism, n1, n2, f1_first=len(n1) >= len(n2))


def mechanism_4(inst: Instance) -> Placement:
    n1, n2, n12 = partition_by_preference(inst)
    xs = inst.locations
    if n12:
        return _peak_placement(min(xs[i] for i in n12), inst)
    # F1 goes first whenever it has clients; otherwise F2 picks and F1 takes the fallback
    return _two_stage(inst, mc_mechanism, n1, n2, f1_first=bool(n1))


def _single(rule: SingleRule) -> Callable[[Instance], Placement]:
    def run_single(inst: Instance) -> Placement:
        _, slot = rule(list(inst.locations), inst.alternatives, None)
        return Placement(slot, _fallback_slot(slot))

    return run_single


@dataclass(frozen=True)
class Mechanism:
    """Mechanism identifier: ``m1 m2 m3 m4 sc mc opt-sc opt-mc orderstat:<i>``."""

    name: str
    index: int = 0

    NAMES = ("m1", "m2", "m3", "m4", "sc", "mc", "opt-sc", "opt-mc", "orderstat")

    def __post_init__(self):
        if self.name not in self.NAMES:
            raise ValueError(f"unknown mechanism {self.name!r}")
        if self.name == "orderstat" and self.index < 1:
            raise ValueError("orderstat needs a 1-based index")

    @classmethod
    def parse(cls, text: str) -> "Mechanism":
        text = text.strip().lower()
        if text.startswith("orderstat:"):
            try:
                return cls("orderstat", int(text.split(":", 1)[1]))
            except ValueError:
                raise ValueError(f"bad order statistic index in {text!r}") from None
        return cls(text)

    def __str__(self) -> str:
        return f"orderstat:{self.index}" if self.name == "orderstat" else self.name

    @property
    def cell_measurable(self) -> bool:
        """True when the output depends on each report only through its cell
        in the breakpoint arrangement (all mechanisms except the optima)."""
        return not self.name.startswith("opt-")

    def __call__(self, inst: Instance) -> Placement:
        return run(self, inst)


M1, M2, M3, M4 = (Mechanism(n) for n in ("m1", "m2", "m3", "m4"))
SC, MC = Mechanism("sc"), Mechanism("mc")
OPT_SC, OPT_MC = Mechanism("opt-sc"), Mechanism("opt-mc")


def order_stat(i: int) -> Mechanism:
    return Mechanism("orderstat", i)


_DISPATCH: dict[str, Callable[[Instance], Placement]] = {
    "m1": mechanism_1,
    "m2": mechanism_2,
    "m3": mechanism_3,
    "m4": mechanism_4,
    "sc": _single(sc_mechanism),
    "mc": _single(mc_mechanism),
    "opt-sc": lambda inst: brute_force_opt(inst, Objective.SUM).placement,
    "opt-mc": lambda inst: brute_force_opt(inst, Objective.MAX).placement,
}


def run(mech: Mechanism, inst: Instance) -> Placement:
    if mech.name == "orderstat":
        return order_statistic_mechanism(inst, mech.index)
    return _DISPATCH[mech.name](inst)
