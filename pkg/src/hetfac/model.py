"""Instances, placements and Max-variant costs on the real line.

All coordinates are :class:`fractions.Fraction` values, so costs, medians and
zone borders are exact and ties are decided without rounding.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence, Union

RationalLike = Union[Fraction, int, str]


class InstanceError(ValueError):
    """Raised for structurally invalid instances or placements."""


class SettingError(ValueError):
    """Raised when a mechanism is applied outside the setting it is defined for."""


def to_rational(value: RationalLike) -> Fraction:
    """Exact conversion of ints, Fractions, ``"p/q"`` and decimal strings.

    Floats are rejected: they would smuggle rounding error into every audit.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact value {value!r}; pass a string or Fraction")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def format_rational(q: Fraction) -> str:
    """Canonical ``p/q`` rendering (``p`` alone for integers)."""
    return str(q)


class Preference(enum.Enum):
    F1 = "f1"
    F2 = "f2"
    BOTH = "both"

    @property
    def wants_f1(self) -> bool:
        return self is not Preference.F2

    @property
    def wants_f2(self) -> bool:
        return self is not Preference.F1

    @classmethod
    def parse(cls, text: str) -> "Preference":
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"expected one of f1, f2, both; got {text!r}") from None


class Agent(NamedTuple):
    x: Fraction
    pref: Preference


@dataclass(frozen=True)
class Instance:
    """Agents (location, preference) plus the multiset of alternatives.

    Alternatives are stored sorted ascending; agent order is kept, because an
    agent's index is her identity in audits.
    """

    agents: tuple[Agent, ...]
    alternatives: tuple[Fraction, ...]

    def __post_init__(self):
        agents = tuple(Agent(to_rational(a[0]), Preference(a[1])) for a in self.agents)
        alts = tuple(sorted(to_rational(a) for a in self.alternatives))
        if not agents:
            raise InstanceError("instance needs at least one agent")
        if len(alts) < 2:
            raise InstanceError("insufficient alternatives")
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "alternatives", alts)

    @classmethod
    def build(
        cls,
        locations: Iterable[RationalLike],
        alternatives: Iterable[RationalLike],
        prefs: Iterable[Preference] | None = None,
    ) -> "Instance":
        xs = [to_rational(x) for x in locations]
        ps = [Preference.BOTH] * len(xs) if prefs is None else list(prefs)
        if len(ps) != len(xs):
            raise InstanceError("locations and preferences differ in length")
        return cls(tuple(Agent(x, p) for x, p in zip(xs, ps)), tuple(alternatives))

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.alternatives)

    @property
    def locations(self) -> tuple[Fraction, ...]:
        return tuple(a.x for a in self.agents)

    @property
    def prefs(self) -> tuple[Preference, ...]:
        return tuple(a.pref for a in self.agents)

    @property
    def is_compulsory(self) -> bool:
        return all(a.pref is Preference.BOTH for a in self.agents)

    @cached_property
    def zone_map(self):
        from .zones import build_zone_map

        return build_zone_map(self.alternatives)

    def with_locations(self, locations: Sequence[Fraction]) -> "Instance":
        """Same preferences and alternatives, new (reported) locations.

        Skips re-validation and reuses the cached zone map; this sits on the
        hot path of every deviation search.
        """
        if len(locations) != len(self.agents):
            raise InstanceError("profile length mismatch")
        new = object.__new__(Instance)
        object.__setattr__(
            new, "agents", tuple(Agent(x, a.pref) for x, a in zip(locations, self.agents))
        )
        object.__setattr__(new, "alternatives", self.alternatives)
        if "zone_map" in self.__dict__:
            new.__dict__["zone_map"] = self.__dict__["zone_map"]
        return new

    def translated(self, t: Fraction) -> "Instance":
        return Instance(
            tuple(Agent(a.x + t, a.pref) for a in self.agents),
            tuple(a + t for a in self.alternatives),
        )

    def scaled(self, s: Fraction) -> "Instance":
        if s <= 0:
            raise ValueError("scale factor must be positive")
        return Instance(
            tuple(Agent(a.x * s, a.pref) for a in self.agents),
            tuple(a * s for a in self.alternatives),
        )

    def permuted(self, order: Sequence[int]) -> "Instance":
        return Instance(tuple(self.agents[i] for i in order), self.alternatives)


class Placement(NamedTuple):
    """Slots (indices into the sorted alternatives) holding F1 and F2."""

    slot1: int
    slot2: int

    def coords(self, inst: Instance) -> tuple[Fraction, Fraction]:
        return inst.alternatives[self.slot1], inst.alternatives[self.slot2]


def check_placement(placement: Placement, inst: Instance) -> None:
    s1, s2 = placement
    if not (0 <= s1 < inst.m and 0 <= s2 < inst.m):
        raise InstanceError(f"placement {tuple(placement)} out of range for m={inst.m}")
    if s1 == s2:
        raise InstanceError("both facilities placed in the same slot")


class Objective(enum.Enum):
    SUM = "sum"
    MAX = "max"

    def __call__(self, placement: Placement, inst: Instance) -> Fraction:
        return sum_cost(placement, inst) if self is Objective.SUM else max_cost(placement, inst)

    @classmethod
    def parse(cls, text: str) -> "Objective":
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"objective must be 'sum' or 'max', got {text!r}") from None


def _cost_at(y1: Fraction, y2: Fraction, x: Fraction, pref: Preference) -> Fraction:
    if pref is Preference.F1:
        return abs(y1 - x)
    if pref is Preference.F2:
        return abs(y2 - x)
    return max(abs(y1 - x), abs(y2 - x))


def agent_cost(placement: Placement, location: Fraction, pref: Preference, inst: Instance) -> Fraction:
    """Distance from ``location`` to the farthest facility the agent wants."""
    y1, y2 = placement.coords(inst)
    return _cost_at(y1, y2, location, pref)


def agent_costs(placement: Placement, inst: Instance) -> list[Fraction]:
    y1, y2 = placement.coords(inst)
    return [_cost_at(y1, y2, a.x, a.pref) for a in inst.agents]


def sum_cost(placement: Placement, inst: Instance) -> Fraction:
    return sum(agent_costs(placement, inst), Fraction(0))


def max_cost(placement: Placement, inst: Instance) -> Fraction:
    return max(agent_costs(placement, inst))


class PreferenceClasses(NamedTuple):
    f1: tuple[int, ...]
    f2: tuple[int, ...]
    both: tuple[int, ...]


def partition_by_preference(inst: Instance) -> PreferenceClasses:
    """Agent indices of N1, N2 and N12 (in input order)."""
    groups: dict[Preference, list[int]] = {p: [] for p in Preference}
    for i, a in enumerate(inst.agents):
        groups[a.pref].append(i)
    return PreferenceClasses(
        tuple(groups[Preference.F1]), tuple(groups[Preference.F2]), tuple(groups[Preference.BOTH])
    )


class LocationStats(NamedTuple):
    lt: Fraction
    rt: Fraction
    cen: Fraction
    med: Fraction


def order_statistic(locations: Sequence[Fraction], i: int) -> Fraction:
    """The ``i``-th smallest location, 1-based."""
    if not locations:
        raise ValueError("empty location set")
    if not 1 <= i <= len(locations):
        raise ValueError(f"order statistic {i} out of range for {len(locations)} locations")
    return sorted(locations)[i - 1]


def lower_median(locations: Sequence[Fraction]) -> Fraction:
    if not locations:
        raise ValueError("empty location set")
    return sorted(locations)[(len(locations) - 1) // 2]


def statistics(locations: Sequence[Fraction]) -> LocationStats:
    if not locations:
        raise ValueError("empty location set")
    xs = sorted(locations)
    lt, rt = xs[0], xs[-1]
    return LocationStats(lt, rt, (lt + rt) / 2, xs[(len(xs) - 1) // 2])
