"""Infinite-window butterfly estimators over a sampled edge reservoir.

All estimators share the same replayable randomness contract:

* one ``random.Random`` (Mersenne Twister) per instance, seeded at
  construction;
* ``flip(p)`` draws one uniform in [0, 1) and succeeds when it is < p;
* a reservoir sub-sample draws one uniform per stored edge, visiting edges
  in canonical sorted (left, right) order, keeping an edge when the draw
  is < gamma.

Draws happen in algorithm order, so a fixed seed yields a scriptable trace.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import DuplicateEdgeError
from .exact import count_butterflies_exact, count_per_edge
from .graph import BipartiteAdjacency, Edge

_FLOAT_EXACT_MAX = 2**53  # largest int a double represents exactly


def _as_float(count: int) -> float:
    assert count <= _FLOAT_EXACT_MAX, "butterfly count exceeds exact float range"
    return float(count)


@dataclass(frozen=True)
class EstimatorParams:
    """Reservoir capacity, sub-sampling probability, and RNG seed."""

    capacity: int
    gamma: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must be in (0, 1)")


class _ReservoirEstimator:
    """State and mechanics shared by the adaptive estimators."""

    #: exponent of the 1/p normalization applied to new detections
    scale_power = 4

    def __init__(self, params: EstimatorParams):
        self.params = params
        self.reservoir = BipartiteAdjacency()
        self.p = 1.0
        self.level = 0          # p == gamma ** level
        self.t = 0
        self.est = 0.0
        self.rng = random.Random(params.seed)
        self._scale = 1.0       # p ** -scale_power, kept in sync with p

    def estimate(self) -> float:
        """Current running estimate; pure read."""
        return self.est

    def subsample(self) -> None:
        """Drop to the next sampling level: p *= gamma, thin the reservoir.

        Each stored edge is kept with probability gamma, one draw per edge in
        canonical sorted order. The running estimate is not touched here; the
        per-variant policy belongs to the caller.
        """
        self.level += 1
        self.p = self.params.gamma ** self.level
        self._scale = self.p ** -self.scale_power
        keep = self.params.gamma
        draw = self.rng.random
        remove = self.reservoir.remove
        for e in self.reservoir.sorted_edges():
            if draw() >= keep:
                remove(e)

    def _sample_in(self, edge: Edge) -> bool:
        """Flip(p); on heads store the edge (rejecting duplicates)."""
        if self.rng.random() < self.p:
            if not self.reservoir.insert(edge):
                raise DuplicateEdgeError(f"duplicate edge {edge} in stream")
            return True
        return False


class Fleet1(_ReservoirEstimator):
    """Adaptive sampling with a from-scratch recount at every sub-sample.

    Per edge: bump t; while the reservoir is at capacity, sub-sample and
    recompute the estimate as p^-4 times the butterflies left in the
    reservoir; then flip(p) and, on heads, insert the edge and credit
    p^-4 times the butterflies it closes (counted with the edge already
    stored).
    """

    name = "Fleet1"
    recompute_on_subsample = True

    def process(self, edge: Edge) -> float:
        self.t += 1
        res = self.reservoir
        cap = self.params.capacity
        while len(res) >= cap:
            self.subsample()
            if self.recompute_on_subsample:
                self.est = self._scale * _as_float(count_butterflies_exact(res))
        if self._sample_in(edge):
            self.est += self._scale * _as_float(count_per_edge(edge, res))
        return self.est


class Fleet2(Fleet1):
    """Fleet1 without the recount: sub-sampling leaves the estimate alone,
    detections at the new level keep accumulating with the new normalization."""

    name = "Fleet2"
    recompute_on_subsample = False


class Fleet3(_ReservoirEstimator):
    """Credit-first variant: every arriving edge updates the estimate before
    any sampling decision.

    The arriving edge is adjoined to the reservoir only for counting (so the
    butterflies it closes are visible), credited with p^-3 at the
    pre-sub-sample p, and kept only if the later flip(p) at the
    post-sub-sample p comes up heads. The estimate never decreases.
    """

    name = "Fleet3"
    scale_power = 3

    def process(self, edge: Edge) -> float:
        self.t += 1
        res = self.reservoir
        if not res.insert(edge):
            raise DuplicateEdgeError(f"duplicate edge {edge} in stream")
        closed = count_per_edge(edge, res)
        res.remove(edge)
        if closed:
            self.est += self._scale * _as_float(closed)
        cap = self.params.capacity
        while len(res) >= cap:
            self.subsample()
        if self.rng.random() < self.p:
            res.insert(edge)
        return self.est


class BernoulliEstimator:
    """Fixed-probability reference sampler: no adaptation, no capacity bound."""

    name = "Bernoulli"

    def __init__(self, p: float, seed: int = 0):
        if not 0.0 < p <= 1.0:
            raise ValueError("p must be in (0, 1]")
        self.p = p
        self.reservoir = BipartiteAdjacency()
        self.t = 0
        self.est = 0.0
        self.rng = random.Random(seed)
        self._scale = p ** -4

    def estimate(self) -> float:
        return self.est

    def process(self, edge: Edge) -> float:
        self.t += 1
        if self.rng.random() < self.p:
            if not self.reservoir.insert(edge):
                raise DuplicateEdgeError(f"duplicate edge {edge} in stream")
            self.est += self._scale * _as_float(count_per_edge(edge, self.reservoir))
        return self.est
