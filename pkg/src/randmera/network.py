"""Ring geometry of the coarse-graining network: sites, pairings, intervals.

Level ``k`` is a periodic ring of ``2**k`` sites.  Each level is produced in
two stages:

* ``after_V``  - every level ``k-1`` site ``s`` has been split into the
  child pair ``(2s, 2s+1)``;
* ``after_W``  - the staggered pairs ``(2j+1, 2j+2 mod 2**k)`` have been
  rotated together, including the pair that wraps around the ring.

Intervals are inclusive index ranges ``i..j`` on the ring.  Because the pair
``(i, j)`` with ``i == j+1 (mod n)`` describes both the empty set and the
whole ring, an interval carries an explicit ``whole`` flag; lengths run over
``0 .. n_sites`` with both extremes representable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import UsageError
from .schedule import DimensionSchedule, solve_schedule

__all__ = [
    "Interval",
    "MeraNetwork",
    "Stage",
    "modular_distance",
    "v_children",
    "v_parent",
    "w_partner",
]


class Stage(str, enum.Enum):
    """Which of the two per-level stages a state or interval refers to."""

    AFTER_V = "after_V"
    AFTER_W = "after_W"


def modular_distance(n_sites: int, a: int, b: int) -> int:
    """Signed distance ``a - b`` on a ring, reduced to the representative of
    smallest absolute value; the tie at ``n_sites/2`` resolves positive."""
    if n_sites < 1:
        raise UsageError("ring must have at least one site")
    r = (a - b) % n_sites
    if 2 * r > n_sites:
        return r - n_sites
    return r


def w_partner(level: int, site: int) -> int:
    """Partner of ``site`` under the staggered pairing ``(2j+1, 2j+2 mod n)``."""
    n = 1 << level
    site %= n
    return (site + 1) % n if site % 2 == 1 else (site - 1) % n


def v_children(level: int, parent_site: int) -> tuple[int, int]:
    """Children at ``level`` of a site at ``level - 1``: ``(2s, 2s+1)``."""
    if level < 1:
        raise UsageError("splitting is defined for level >= 1")
    n_prev = 1 << (level - 1)
    s = parent_site % n_prev
    return (2 * s, 2 * s + 1)


def v_parent(level: int, site: int) -> int:
    """Parent at ``level - 1`` of a site at ``level``."""
    if level < 1:
        raise UsageError("splitting is defined for level >= 1")
    return (site % (1 << level)) // 2


@dataclass(frozen=True)
class Interval:
    """Inclusive interval ``i..j`` on the ring of a given level and stage.

    Construct through `of_length`, `span`, `empty`, or `whole_ring`; the
    ``whole`` flag disambiguates the full ring from the empty set, which
    share the endpoint relation ``i == j+1 (mod n_sites)``.
    """

    level: int
    stage: Stage
    i: int
    j: int
    n_sites: int
    whole: bool = field(default=False)

    def __post_init__(self):
        if self.n_sites != 1 << self.level:
            raise UsageError(
                f"level {self.level} ring has {1 << self.level} sites, got {self.n_sites}"
            )
        if not (0 <= self.i < self.n_sites and 0 <= self.j < self.n_sites):
            raise UsageError(f"endpoints ({self.i}, {self.j}) outside ring of {self.n_sites}")
        if self.whole and (self.j + 1) % self.n_sites != self.i:
            raise UsageError("whole-ring interval must close on itself")

    # -- constructors ------------------------------------------------------

    @classmethod
    def of_length(cls, level: int, stage: Stage, i: int, length: int, *, whole_ok=True) -> "Interval":
        n = 1 << level
        if not (0 <= length <= n):
            raise UsageError(f"length {length} outside 0..{n}")
        i %= n
        if length == n and not whole_ok:
            raise UsageError("whole ring not allowed here")
        j = (i + length - 1) % n
        return cls(level=level, stage=stage, i=i, j=j, n_sites=n, whole=(length == n))

    @classmethod
    def span(cls, level: int, stage: Stage, i: int, j: int) -> "Interval":
        """Interval ``i..j``; ``i == j+1 (mod n)`` means empty (not whole)."""
        n = 1 << level
        return cls(level=level, stage=stage, i=i % n, j=j % n, n_sites=n, whole=False)

    @classmethod
    def empty(cls, level: int, stage: Stage) -> "Interval":
        n = 1 << level
        return cls(level=level, stage=stage, i=0, j=n - 1, n_sites=n, whole=False)

    @classmethod
    def whole_ring(cls, level: int, stage: Stage) -> "Interval":
        n = 1 << level
        return cls(level=level, stage=stage, i=0, j=n - 1, n_sites=n, whole=True)

    # -- queries -----------------------------------------------------------

    @property
    def length(self) -> int:
        if self.whole:
            return self.n_sites
        return (self.j - self.i + 1) % self.n_sites

    @property
    def is_empty(self) -> bool:
        return self.length == 0

    def sites(self) -> list[int]:
        return [(self.i + t) % self.n_sites for t in range(self.length)]

    def shifted(self, offset: int) -> "Interval":
        if self.whole or self.is_empty:
            return self
        return Interval.of_length(
            self.level, self.stage, (self.i + offset) % self.n_sites, self.length
        )


class MeraNetwork:
    """A solved dimension schedule together with the ring geometry per level."""

    def __init__(self, schedule: DimensionSchedule):
        self.schedule = schedule

    @classmethod
    def build(cls, leaf_dim: int, epsilon: float) -> "MeraNetwork":
        return cls(solve_schedule(leaf_dim, epsilon))

    @property
    def levels(self) -> int:
        return self.schedule.levels

    @property
    def n_leaves(self) -> int:
        return 1 << self.schedule.levels

    def n_sites(self, level: int) -> int:
        if not (0 <= level <= self.levels):
            raise UsageError(f"level {level} outside 0..{self.levels}")
        return 1 << level

    def site_dim(self, level: int, stage: Stage) -> int:
        if not (0 <= level <= self.levels):
            raise UsageError(f"level {level} outside 0..{self.levels}")
        if stage == Stage.AFTER_V:
            if level == 0:
                raise UsageError("level 0 has no splitting stage")
            return self.schedule.dims_v[level]
        return self.schedule.dims[level]

    def v_slots(self, level: int) -> list[tuple[int, tuple[int, int]]]:
        """Splitting slots of ``level``: ``(parent_site, (child, child))``."""
        return [(s, v_children(level, s)) for s in range(1 << (level - 1))]

    def w_pairs(self, level: int) -> list[tuple[int, int]]:
        """Rotated pairs of ``level`` in slot order, wrap pair last."""
        n = 1 << level
        return [((2 * j + 1) % n, (2 * j + 2) % n) for j in range(n // 2)]

    def to_json_dict(self) -> dict:
        """Serializable description: levels, dimensions, and pairings."""
        return {
            "leaf_dim": self.schedule.leaf_dim,
            "epsilon": self.schedule.epsilon,
            "levels": self.levels,
            "dims": list(self.schedule.dims),
            "dims_v": list(self.schedule.dims_v),
            "rings": [
                {
                    "level": k,
                    "n_sites": 1 << k,
                    "v_slots": [[s, list(ch)] for s, ch in self.v_slots(k)],
                    "w_pairs": [list(p) for p in self.w_pairs(k)],
                }
                for k in range(1, self.levels + 1)
            ],
        }
