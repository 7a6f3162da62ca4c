"""Shared fixtures and an independently written reduction enumerator.

The enumerator below re-derives the layer-peeling rules as a plain recursion
that lists every legal sequence outright.  It shares no code with the
memoized dynamic program in ``randmera.cutbounds``, so agreement between the
two is a real cross-check rather than a tautology.
"""

from __future__ import annotations

import math

import pytest

from randmera import Interval, MeraNetwork, Stage, find_epsilon

LOG8 = math.log(8.0)


def enumerate_reduction_costs(
    network: MeraNetwork, interval: Interval
) -> list[tuple[float, int]]:
    """(cost, step count) of every legal peeling sequence for ``interval``.

    Rules, restated from first principles: a rotation layer can be undone
    over an interval only when the interval starts on the first member of a
    rotated pair (odd site) and ends on the second (even site); a splitting
    layer only when it starts on a left child (even) and ends on a right
    child (odd), after which indices and lengths halve.  A misaligned
    endpoint must step one site either way, paying the log dimension of a
    site on the current ring.  An interval that covers its whole ring is a
    pure state and climbs one layer per step for free; one that empties
    terminates.  At the top the single remaining site costs its log
    dimension per covered site.
    """
    dims = network.schedule.dims
    dims_v = network.schedule.dims_v
    results: list[tuple[float, int]] = []

    def walk(level: int, stage: Stage, start: int, length: int, cost: float, steps: int):
        n = 1 << level
        if length == 0:
            results.append((cost, steps))
            return
        if level == 0:
            results.append((cost + math.log(dims[0]) * length, steps))
            return
        if length == n:
            if stage is Stage.AFTER_W:
                walk(level, Stage.AFTER_V, 0, n, cost, steps + 1)
            else:
                walk(level - 1, Stage.AFTER_W, 0, n // 2, cost, steps + 1)
            return
        if stage is Stage.AFTER_W:
            price = math.log(dims[level])
            left_ok = start % 2 == 1
            right_ok = (start + length - 1) % 2 == 0
        else:
            price = math.log(dims_v[level])
            left_ok = start % 2 == 0
            right_ok = (start + length - 1) % 2 == 1
        left_moves = [(0, 0.0)] if left_ok else [(-1, price), (1, price)]
        right_moves = [(0, 0.0)] if right_ok else [(-1, price), (1, price)]
        for dl, pl in left_moves:
            for dr, pr in right_moves:
                new_len = length - dl + dr
                new_start = (start + dl) % n
                c = cost + pl + pr
                if new_len <= 0:
                    results.append((c, steps + 1))
                elif stage is Stage.AFTER_W:
                    walk(
                        level,
                        Stage.AFTER_V,
                        0 if new_len >= n else new_start,
                        min(new_len, n),
                        c,
                        steps + 1,
                    )
                elif new_len >= n:
                    walk(level - 1, Stage.AFTER_W, 0, n // 2, c, steps + 1)
                else:
                    walk(level - 1, Stage.AFTER_W, new_start // 2, new_len // 2, c, steps + 1)

    start = 0 if interval.length == 0 else interval.i
    walk(interval.level, interval.stage, start, interval.length, 0.0, 0)
    return results


def brute_cut_stats(network: MeraNetwork, interval: Interval) -> tuple[float, float, float]:
    """(min cost, -log sum exp(-cost), min of cost - log8*steps) by brute force."""
    seqs = enumerate_reduction_costs(network, interval)
    min_cost = min(c for c, _ in seqs)
    top = max(-c for c, _ in seqs)
    lse = -(top + math.log(sum(math.exp(-c - top) for c, _ in seqs)))
    lower = min(c - LOG8 * h for c, h in seqs)
    return min_cost, lse, lower


@pytest.fixture(scope="session")
def net_tiny() -> MeraNetwork:
    """One level, leaf dimension 2, split bond 1: a product state on 2 sites."""
    return MeraNetwork.build(2, math.log(2.0))


@pytest.fixture(scope="session")
def net_single() -> MeraNetwork:
    """One level, leaf dimension 9, split bond 2: entangled ring of 2 sites."""
    return MeraNetwork.build(9, 1.62)


@pytest.fixture(scope="session")
def net_l3() -> MeraNetwork:
    """Three levels on a ring of 8, leaf dimension 2."""
    return MeraNetwork.build(2, find_epsilon(2, 3))


@pytest.fixture(scope="session")
def net_l4() -> MeraNetwork:
    """Four levels on a ring of 16, leaf dimension 2."""
    return MeraNetwork.build(2, find_epsilon(2, 4))


@pytest.fixture(scope="session")
def net_big() -> MeraNetwork:
    """Twelve levels on a ring of 4096; usable for bounds, too big to sample."""
    return MeraNetwork.build(2, 0.05)
