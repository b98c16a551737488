"""Sliding-window butterfly estimators: sequence-based and time-based.

The sequence-based estimator keeps a bounded sample of the last `window`
edges and maintains a running estimate through insert credits and expiry
debits. The time-based estimator keeps a cascade of FIFO reservoirs at
geometrically decreasing sampling rates and answers window queries of any
size given at query time.
"""

from __future__ import annotations

import math
import random
from collections import deque

from .errors import DuplicateEdgeError, NoValidLevelError, TimestampRegressionError
from .exact import count_butterflies_exact, count_per_edge
from .graph import BipartiteAdjacency, Edge, TimedEdge

_FLOAT_EXACT_MAX = 2**53


def _as_float(count: int) -> float:
    assert count <= _FLOAT_EXACT_MAX, "butterfly count exceeds exact float range"
    return float(count)


class SeqWinEstimator:
    """Estimate the butterfly count of the `window` most recent edges.

    Behaves like Fleet1 while the sampling probability is above the floor
    capacity/window; at the floor the probability is pinned and the reservoir
    size is bounded in expectation only. Expired items are debited from the
    estimate (at the current probability) and dropped every tick.
    """

    name = "SeqWin"

    def __init__(self, capacity: int, window: int, gamma: float = 0.5, seed: int = 0):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        if window < capacity:
            raise ValueError("window must be >= capacity")
        if not 0.0 < gamma < 1.0:
            raise ValueError("gamma must be in (0, 1)")
        self.capacity = capacity
        self.window = window
        self.gamma = gamma
        self.p_floor = capacity / window
        self.reservoir = BipartiteAdjacency()
        self.arrivals: dict[Edge, int] = {}  # insertion order == arrival order
        self.p = 1.0
        self.level = 0
        self.t = 0
        self.est = 0.0
        self.rng = random.Random(seed)
        self._inv4 = self.p ** -4
        # telemetry, not part of the estimate
        self.expired_while_adapting = 0
        self.oversize_events = 0

    def estimate(self) -> float:
        return self.est

    def _subsample(self) -> None:
        # next level, clamped so p never drops below capacity/window;
        # a clamped step retains each edge with p_new/p_old instead of gamma
        self.level += 1
        cand = self.gamma ** self.level
        if cand < self.p_floor:
            keep = self.p_floor / self.p
            self.p = self.p_floor
        else:
            keep = self.gamma
            self.p = cand
        self._inv4 = self.p ** -4
        draw = self.rng.random
        res = self.reservoir
        for e in res.sorted_edges():
            if draw() >= keep:
                res.remove(e)
                del self.arrivals[e]

    def process(self, edge: Edge) -> float:
        self.t += 1
        res = self.reservoir
        if self.p > self.p_floor:
            while len(res) >= self.capacity and self.p > self.p_floor:
                self._subsample()
                self.est = self._inv4 * _as_float(count_butterflies_exact(res))
        if self.rng.random() < self.p:
            if not res.insert(edge):
                raise DuplicateEdgeError(f"duplicate edge {edge} in stream")
            self.arrivals[edge] = self.t
            self.est += self._inv4 * _as_float(count_per_edge(edge, res))
        # expiry: debit while the expired edge is still present, then drop it
        cutoff = self.t - self.window
        arrivals = self.arrivals
        while arrivals:
            old, born = next(iter(arrivals.items()))
            if born > cutoff:
                break
            if self.p > self.p_floor:
                self.expired_while_adapting += 1
            self.est -= self._inv4 * _as_float(count_per_edge(old, res))
            res.remove(old)
            del arrivals[old]
        if len(res) >= 2 * self.capacity:
            self.oversize_events += 1
        return self.est


class TimeWinEstimator:
    """Level-sampled FIFO reservoirs answering time-based window queries.

    Every edge enters level 0; it cascades to each next level while a
    gamma-flip keeps coming up heads. Level l therefore holds the most recent
    survivors of an independent gamma^l thinning. A query picks the
    finest-sampled level whose retained history covers the whole window.
    """

    name = "TimeWin"

    def __init__(self, capacity: int, n_max: int, gamma: float = 0.5, seed: int = 0):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        if n_max < 1:
            raise ValueError("n_max must be >= 1")
        if not 0.0 < gamma < 1.0:
            raise ValueError("gamma must be in (0, 1)")
        self.capacity = capacity
        self.n_max = n_max
        self.gamma = gamma
        # levels = ceil(1 + log_gamma(capacity / n_max)), at least 1; the
        # epsilon keeps exact powers of gamma from rounding up a level
        ratio = capacity / n_max
        if ratio >= 1.0:
            self.T = 1
        else:
            self.T = max(1, math.ceil(1.0 + math.log(ratio) / math.log(gamma) - 1e-9))
        self.level_cap = max(1, capacity // self.T)
        self.levels: list[deque[TimedEdge]] = [deque() for _ in range(self.T)]
        self.last_discard = [0] * self.T
        self.last_ts = 0
        self.t = 0
        self.rng = random.Random(seed)

    def process(self, timed_edge: TimedEdge) -> None:
        edge, ts = timed_edge
        if ts < self.last_ts:
            raise TimestampRegressionError(
                f"timestamp {ts} arrived after {self.last_ts}"
            )
        self.last_ts = ts
        self.t += 1
        draw = self.rng.random
        g = self.gamma
        cap = self.level_cap
        lvl = 0
        while True:
            q = self.levels[lvl]
            q.append(timed_edge)
            if len(q) > cap:
                _, t_old = q.popleft()
                self.last_discard[lvl] = t_old
            lvl += 1
            if not (draw() < g and lvl < self.T):
                break

    def query(self, window: int, at: int) -> float:
        """Estimate the butterfly count among edges with timestamps in
        (at - window, at]. Pure read."""
        if window < 1:
            raise ValueError("window must be positive")
        if at < self.last_ts:
            raise ValueError(f"query time {at} precedes last timestamp {self.last_ts}")
        cutoff = at - window
        for lvl in range(self.T):
            if self.last_discard[lvl] <= cutoff:
                adj = BipartiteAdjacency()
                for edge, ts in self.levels[lvl]:
                    if ts > cutoff:
                        adj.insert(edge)
                scale = self.gamma ** (-4 * lvl)
                return scale * _as_float(count_butterflies_exact(adj))
        raise NoValidLevelError(
            f"window {window} at {at} exceeds retained history at all levels"
        )
