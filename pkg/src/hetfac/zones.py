"""Adjacent alternative pairs and the zones of the line they induce.

Pair ``k`` (0-based) is ``(a[k], a[k+1])``. Its zone is the half-open interval
``(b[k-1], b[k]]`` with ``b[k] = (a[k] + a[k+2]) / 2``; the first zone is
unbounded on the left, the last on the right. Zones of duplicate
alternatives can be empty, but they keep their index.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .model import Instance, InstanceError


@dataclass(frozen=True)
class ZoneMap:
    alternatives: tuple[Fraction, ...]
    borders: tuple[Fraction, ...]

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(k, k + 1) for k in range(len(self.alternatives) - 1)]

    def pair_coords(self, k: int) -> tuple[Fraction, Fraction]:
        return self.alternatives[k], self.alternatives[k + 1]

    def __len__(self) -> int:
        return len(self.alternatives) - 1


def build_zone_map(source: Instance | Sequence[Fraction]) -> ZoneMap:
    alts = source.alternatives if isinstance(source, Instance) else tuple(sorted(source))
    if len(alts) < 2:
        raise InstanceError("insufficient alternatives")
    borders = tuple((alts[k] + alts[k + 2]) / 2 for k in range(len(alts) - 2))
    return ZoneMap(tuple(alts), borders)


def pair_cost(point: Fraction, pair: tuple[Fraction, Fraction]) -> Fraction:
    return max(abs(pair[0] - point), abs(pair[1] - point))


def peak_of(point: Fraction, zmap: ZoneMap) -> int:
    """Index of the zone containing ``point``.

    This is always a minimiser of :func:`pair_cost`; among several minimisers
    it is the one whose zone holds the point, which is the leftmost one
    whenever the alternatives are distinct.
    """
    # first border >= point; borders are nondecreasing so this is the zone
    return bisect_left(zmap.borders, point)


def zone_interval(k: int, zmap: ZoneMap) -> tuple[Optional[Fraction], Optional[Fraction]]:
    """``(lo, hi)`` of zone ``k``: open at ``lo``, closed at ``hi``; None is infinite."""
    if not 0 <= k < len(zmap):
        raise IndexError(k)
    lo = zmap.borders[k - 1] if k > 0 else None
    hi = zmap.borders[k] if k < len(zmap.borders) else None
    return lo, hi


def in_zone(point: Fraction, k: int, zmap: ZoneMap) -> bool:
    lo, hi = zone_interval(k, zmap)
    return (lo is None or point > lo) and (hi is None or point <= hi)
