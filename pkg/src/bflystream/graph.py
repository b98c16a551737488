"""Bipartite vertex/edge types and a dynamic adjacency index.

Left and right vertex ids live in separate key spaces (the partition is part
of a vertex's identity), so raw edge-list ids that collide across partitions
are safe to use unchanged.
"""

from __future__ import annotations

import enum
from typing import Iterable, Iterator, NamedTuple


class Side(enum.Enum):
    LEFT = "L"
    RIGHT = "R"


class VertexId(NamedTuple):
    side: Side
    id: int


class Edge(NamedTuple):
    """An undirected edge between a left-partition and a right-partition vertex.

    `left` and `right` are the integer ids within their respective partitions;
    bipartiteness is enforced structurally (the field determines the side).
    Tuple comparison gives the canonical (left, right) edge order.
    """

    left: int
    right: int


class TimedEdge(NamedTuple):
    edge: Edge
    ts: int


class BipartiteAdjacency:
    """Mutable neighbor index over a set of simple bipartite edges.

    Supports O(1) expected insert/remove/membership and neighbor-set access
    from both sides. One instance is owned by one estimator; instances are
    independent and may run in parallel.
    """

    __slots__ = ("_left", "_right", "_m")

    def __init__(self, edges: Iterable[Edge] = ()):
        self._left: dict[int, set[int]] = {}   # left id -> adjacent right ids
        self._right: dict[int, set[int]] = {}  # right id -> adjacent left ids
        self._m = 0
        for e in edges:
            self.insert(e)

    def insert(self, edge: Edge) -> bool:
        """Add an edge; returns False (and changes nothing) if already present."""
        l, r = edge
        nbrs = self._left.get(l)
        if nbrs is None:
            self._left[l] = {r}
        elif r in nbrs:
            return False
        else:
            nbrs.add(r)
        rset = self._right.get(r)
        if rset is None:
            self._right[r] = {l}
        else:
            rset.add(l)
        self._m += 1
        return True

    def remove(self, edge: Edge) -> bool:
        """Remove an edge; returns False if it was not present."""
        l, r = edge
        nbrs = self._left.get(l)
        if nbrs is None or r not in nbrs:
            return False
        nbrs.discard(r)
        if not nbrs:
            del self._left[l]
        rset = self._right[r]
        rset.discard(l)
        if not rset:
            del self._right[r]
        self._m -= 1
        return True

    def __contains__(self, edge: Edge) -> bool:
        nbrs = self._left.get(edge[0])
        return nbrs is not None and edge[1] in nbrs

    def __len__(self) -> int:
        return self._m

    def __eq__(self, other) -> bool:
        if not isinstance(other, BipartiteAdjacency):
            return NotImplemented
        return self._left == other._left

    def __repr__(self) -> str:
        return f"BipartiteAdjacency({self._m} edges, {len(self._left)}+{len(self._right)} vertices)"

    @property
    def left_index(self) -> dict[int, set[int]]:
        """Left id -> set of right ids. Treat as read-only."""
        return self._left

    @property
    def right_index(self) -> dict[int, set[int]]:
        """Right id -> set of left ids. Treat as read-only."""
        return self._right

    @property
    def n_left(self) -> int:
        return len(self._left)

    @property
    def n_right(self) -> int:
        return len(self._right)

    def edges(self) -> Iterator[Edge]:
        for l, nbrs in self._left.items():
            for r in nbrs:
                yield Edge(l, r)

    def sorted_edges(self) -> list[Edge]:
        """All edges in canonical (left, right) order."""
        return sorted(self.edges())

    def neighbors(self, v: VertexId) -> set[VertexId]:
        """Neighbor set of a vertex; empty if the vertex is absent."""
        if v.side is Side.LEFT:
            return {VertexId(Side.RIGHT, r) for r in self._left.get(v.id, ())}
        return {VertexId(Side.LEFT, l) for l in self._right.get(v.id, ())}

    def copy(self) -> "BipartiteAdjacency":
        dup = BipartiteAdjacency()
        dup._left = {k: set(v) for k, v in self._left.items()}
        dup._right = {k: set(v) for k, v in self._right.items()}
        dup._m = self._m
        return dup
