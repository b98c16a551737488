"""Exact butterfly counting: global, per-edge, incremental, and brute force.

A butterfly is a 2x2 biclique: two left vertices and two right vertices with
all four crossing edges present. Counts are plain Python ints, so they never
overflow.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DuplicateEdgeError, GraphTooLargeError, MissingEdgeError
from .graph import BipartiteAdjacency, Edge

BRUTE_GUARD = 10**8  # max |L|^2 * |R|^2 enumerated by the brute-force counter


def count_butterflies_exact(adj: BipartiteAdjacency) -> int:
    """Exact number of butterflies via wedge counting.

    For every unordered same-side pair with m common neighbors there are
    C(m, 2) butterflies. Wedges are walked through the side with the smaller
    sum of squared degrees, which bounds the traversal cost.
    """
    left, right = adj.left_index, adj.right_index
    if not left or not right:
        return 0
    sq_left = sum(len(s) * len(s) for s in left.values())
    sq_right = sum(len(s) * len(s) for s in right.values())
    # start side: wedges u-x-w cost sum of d(x)^2 over the mid side
    if sq_right <= sq_left:
        start, mid = left, right
    else:
        start, mid = right, left
    total = 0
    for u, nbrs in start.items():
        paths: dict[int, int] = {}
        get = paths.get
        for x in nbrs:
            for w in mid[x]:
                if w != u:
                    paths[w] = get(w, 0) + 1
        for m in paths.values():
            if m > 1:
                total += m * (m - 1) // 2
    # each same-side pair was visited from both endpoints
    return total // 2


def count_butterflies_brute(adj: BipartiteAdjacency) -> int:
    """Quartic-time oracle: enumerate every left pair x right pair directly."""
    left, right = adj.left_index, adj.right_index
    n_l, n_r = len(left), len(right)
    if (n_l * n_r) ** 2 > BRUTE_GUARD:
        raise GraphTooLargeError(
            f"brute-force guard exceeded: ({n_l}*{n_r})^2 > {BRUTE_GUARD}"
        )
    total = 0
    rights = list(right)
    for a, b in combinations(left, 2):
        na, nb = left[a], left[b]
        for x, y in combinations(rights, 2):
            if x in na and y in na and x in nb and y in nb:
                total += 1
    return total


def count_per_edge(edge: Edge, adj: BipartiteAdjacency) -> int:
    """Number of butterflies of `adj` that contain `edge`.

    The edge must be present. Iterates from the endpoint with the smaller
    degree and intersects neighbor sets (CPython iterates the smaller set).
    """
    l, r = edge
    left, right = adj.left_index, adj.right_index
    nl = left.get(l)
    if nl is None or r not in nl:
        raise MissingEdgeError(f"edge {edge} not in adjacency")
    nr = right[r]
    total = 0
    if len(nr) <= len(nl):
        # other left endpoints l2 ~ r; common right neighbors of l and l2
        # always include r itself, hence the -1
        for l2 in nr:
            if l2 != l:
                total += len(left[l2] & nl) - 1
    else:
        for r2 in nl:
            if r2 != r:
                total += len(right[r2] & nr) - 1
    return total


def max_per_edge(adj: BipartiteAdjacency) -> int:
    """Max over edges of count_per_edge; 0 for an empty graph. Diagnostic."""
    best = 0
    for e in adj.edges():
        c = count_per_edge(e, adj)
        if c > best:
            best = c
    return best


class RunningExactCounter:
    """Exact butterfly count of a growing edge set, maintained incrementally."""

    __slots__ = ("adj", "count")

    def __init__(self):
        self.adj = BipartiteAdjacency()
        self.count = 0

    def add(self, edge: Edge) -> int:
        if not self.adj.insert(edge):
            raise DuplicateEdgeError(f"duplicate edge {edge} in stream")
        self.count += count_per_edge(edge, self.adj)
        return self.count


def exact_running_count(stream: Iterable[Edge]) -> list[int]:
    """Butterfly count after each prefix of a duplicate-free edge stream."""
    counter = RunningExactCounter()
    return [counter.add(e) for e in stream]


class TrailingWindowCounter:
    """Exact butterfly count over the `window` most recent edges."""

    __slots__ = ("window", "adj", "count", "t", "_fifo")

    def __init__(self, window: int):
        if window < 1:
            raise ValueError("window must be positive")
        self.window = window
        self.adj = BipartiteAdjacency()
        self.count = 0
        self.t = 0
        self._fifo: deque[tuple[int, Edge]] = deque()

    def add(self, edge: Edge) -> int:
        self.t += 1
        if not self.adj.insert(edge):
            raise DuplicateEdgeError(f"duplicate edge {edge} within window")
        self.count += count_per_edge(edge, self.adj)
        self._fifo.append((self.t, edge))
        cutoff = self.t - self.window
        while self._fifo and self._fifo[0][0] <= cutoff:
            _, old = self._fifo.popleft()
            self.count -= count_per_edge(old, self.adj)
            self.adj.remove(old)
        return self.count


class TimeWindowCounter:
    """Exact butterfly count over edges with timestamps in (cutoff, now]."""

    __slots__ = ("adj", "count", "_fifo", "last_ts")

    def __init__(self):
        self.adj = BipartiteAdjacency()
        self.count = 0
        self._fifo: deque[tuple[int, Edge]] = deque()
        self.last_ts = 0

    def add(self, edge: Edge, ts: int) -> None:
        if ts < self.last_ts:
            raise ValueError("timestamps must be non-decreasing")
        self.last_ts = ts
        if not self.adj.insert(edge):
            raise DuplicateEdgeError(f"duplicate edge {edge} within window")
        self.count += count_per_edge(edge, self.adj)
        self._fifo.append((ts, edge))

    def count_at(self, window: int, at: int) -> int:
        """Expire everything with ts <= at - window, then return the count."""
        cutoff = at - window
        while self._fifo and self._fifo[0][0] <= cutoff:
            _, old = self._fifo.popleft()
            self.count -= count_per_edge(old, self.adj)
            self.adj.remove(old)
        return self.count
