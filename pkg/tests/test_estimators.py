import random
from statistics import fmean, median, stdev

import pytest

from bflystream import (
    BernoulliEstimator,
    DuplicateEdgeError,
    Edge,
    EstimatorParams,
    Fleet1,
    Fleet2,
    Fleet3,
    complete_biclique,
    count_butterflies_exact,
    exact_running_count,
    random_stream,
)

from _support import brute_count_edge_set, brute_per_edge_edge_set

K66 = [te.edge for te in complete_biclique(6, 6).edges]


def run_stream(est, edges):
    return [est.process(e) for e in edges]


def final_estimates(cls, stream, capacity, gamma, seeds):
    out = []
    for s in seeds:
        est = cls(EstimatorParams(capacity, gamma, s))
        for e in stream:
            est.process(e)
        out.append(est.estimate())
    return out


def assert_mean_within_4se(values, target):
    m = fmean(values)
    se = stdev(values) / len(values) ** 0.5
    assert abs(m - target) <= 4 * se, f"mean {m:.2f} vs {target} (se {se:.3f})"


# ---------------------------------------------------------------- subsample

def test_subsample_empty_reservoir_scales_p():
    est = Fleet1(EstimatorParams(capacity=4, gamma=0.5, seed=1))
    est.subsample()
    assert est.p == 0.5 and len(est.reservoir) == 0
    est.subsample()
    assert est.p == 0.25


def test_subsample_deterministic_survivors():
    edges = [Edge(i, j) for i in range(2) for j in range(3)]
    survivors = []
    for _ in range(3):
        est = Fleet1(EstimatorParams(capacity=100, gamma=0.5, seed=99))
        for e in edges:
            est.reservoir.insert(e)
        est.subsample()
        survivors.append(est.reservoir.sorted_edges())
    assert survivors[0] == survivors[1] == survivors[2]


def test_subsample_mean_survival_matches_gamma():
    # 10^4-edge reservoir, 1000 seeds: mean survival within 4 sigma of 0.5
    base = Fleet1(EstimatorParams(capacity=10**6, gamma=0.5, seed=0)).reservoir
    for i in range(100):
        for j in range(100):
            base.insert(Edge(i, j))
    n_edges, n_seeds = len(base), 1000
    assert n_edges == 10**4
    total = 0
    for seed in range(n_seeds):
        est = Fleet1(EstimatorParams(capacity=10**6, gamma=0.5, seed=seed))
        est.reservoir = base.copy()
        est.subsample()
        total += len(est.reservoir)
    frac = total / (n_edges * n_seeds)
    sigma = (0.25 / (n_edges * n_seeds)) ** 0.5
    assert abs(frac - 0.5) <= 4 * sigma, f"survival {frac:.5f}"


def test_subsample_p_is_power_of_gamma():
    est = Fleet1(EstimatorParams(capacity=4, gamma=0.7, seed=2))
    for k in range(1, 6):
        est.subsample()
        assert est.p == 0.7 ** k
        assert est.level == k


# ---------------------------------------------------------------- Bernoulli

def test_bernoulli_p1_is_exact():
    est = BernoulliEstimator(1.0, seed=0)
    stream = [te.edge for te in complete_biclique(2, 2).edges]
    assert run_stream(est, stream) == [0.0, 0.0, 0.0, 1.0]


def test_bernoulli_p1_prefix_equals_running_count():
    stream = [te.edge for te in random_stream(15, 15, 120, seed=4).edges]
    est = BernoulliEstimator(1.0, seed=9)
    assert run_stream(est, stream) == [float(x) for x in exact_running_count(stream)]


def test_bernoulli_unbiased_on_k66():
    finals = []
    for seed in range(10**4):
        est = BernoulliEstimator(0.5, seed=seed)
        for e in K66:
            est.process(e)
        finals.append(est.estimate())
    assert_mean_within_4se(finals, 225)


def test_bernoulli_rejects_duplicates():
    est = BernoulliEstimator(1.0, seed=0)
    est.process(Edge(0, 0))
    with pytest.raises(DuplicateEdgeError):
        est.process(Edge(0, 0))


# ---------------------------------------------------------------- Fleet1

def test_fleet1_large_capacity_is_exact_any_seed():
    stream = [te.edge for te in complete_biclique(2, 2).edges]
    for seed in range(10):
        est = Fleet1(EstimatorParams(capacity=100, gamma=0.5, seed=seed))
        assert run_stream(est, stream) == [0.0, 0.0, 0.0, 1.0]
        assert est.p == 1.0


def test_fleet1_unbiased_on_k66():
    finals = final_estimates(Fleet1, K66, 20, 0.5, range(10**4))
    assert_mean_within_4se(finals, 225)


def test_fleet1_scripted_replay():
    # independent simulator using the documented draw order and brute-force
    # counting over a plain edge set
    stream = [te.edge for te in random_stream(6, 6, 30, seed=1).edges]
    M, gamma, seed = 4, 0.5, 12345
    est = Fleet1(EstimatorParams(M, gamma, seed))
    rng = random.Random(seed)
    held: set = set()
    p, beta = 1.0, 0.0
    for e in stream:
        while len(held) >= M:
            p *= gamma  # exact for gamma = 0.5
            for edge in sorted(held):
                if not rng.random() < gamma:
                    held.discard(edge)
            beta = p**-4 * brute_count_edge_set(held)
        if rng.random() < p:
            held.add(e)
            beta += p**-4 * brute_per_edge_edge_set(e, held)
        got = est.process(e)
        assert est.p == p
        assert set(est.reservoir.edges()) == held
        assert got == pytest.approx(beta, rel=1e-12, abs=1e-12)


# ---------------------------------------------------------------- Fleet2

def test_fleet2_matches_fleet1_when_no_subsample():
    stream = [te.edge for te in random_stream(12, 12, 100, seed=6).edges]
    a = Fleet1(EstimatorParams(capacity=500, gamma=0.5, seed=3))
    b = Fleet2(EstimatorParams(capacity=500, gamma=0.5, seed=3))
    assert run_stream(a, stream) == run_stream(b, stream)


def test_fleet2_unbiased_on_k66():
    finals = final_estimates(Fleet2, K66, 20, 0.5, range(10**4))
    assert_mean_within_4se(finals, 225)


def test_fleet2_keeps_estimate_across_subsample():
    # fill the reservoir at p = 1, then push an edge on fresh vertices: the
    # forced subsample must leave the estimate untouched (the new edge closes
    # nothing, so any change could only come from a recount)
    k33 = [te.edge for te in complete_biclique(3, 3).edges]
    est = Fleet2(EstimatorParams(capacity=8, gamma=0.5, seed=5))
    for e in k33[:8]:
        est.process(e)
    before = est.estimate()
    assert before > 0 and len(est.reservoir) == 8
    est.process(Edge(100, 100))
    assert est.level >= 1  # the subsample really fired
    assert est.estimate() == before
    # same scenario under Fleet1 recomputes at the new level instead
    ref = Fleet1(EstimatorParams(capacity=8, gamma=0.5, seed=5))
    for e in k33[:8]:
        ref.process(e)
    ref.process(Edge(100, 100))
    assert ref.estimate() != before


def paired_median_stream_error(cls, stream, capacity, seeds, probe_every=50):
    """Median over seeds of the per-seed relative error averaged along the
    stream (the whole-stream accuracy a MAPE table reports)."""
    running = exact_running_count(stream)
    probes = range(probe_every, len(stream) + 1, probe_every)
    medians = []
    for seed in seeds:
        est = cls(EstimatorParams(capacity, 0.5, seed))
        errs = []
        for t, e in enumerate(stream, start=1):
            est.process(e)
            if t % probe_every == 0 and running[t - 1] > 0:
                errs.append(abs(est.estimate() - running[t - 1]) / running[t - 1])
        medians.append(fmean(errs))
    return median(medians)


def test_fleet2_paired_error_not_worse_than_fleet1():
    stream = [te.edge for te in random_stream(60, 60, 1500, seed=8).edges]
    seeds = range(150)
    m1 = paired_median_stream_error(Fleet1, stream, 150, seeds)
    m2 = paired_median_stream_error(Fleet2, stream, 150, seeds)
    assert m2 <= m1 * 1.10


# ---------------------------------------------------------------- Fleet3

def test_fleet3_p1_prefix_equals_running_count():
    stream = [te.edge for te in random_stream(15, 15, 150, seed=10).edges]
    for seed in (0, 1, 2):
        est = Fleet3(EstimatorParams(capacity=10**4, gamma=0.5, seed=seed))
        assert run_stream(est, stream) == [float(x) for x in exact_running_count(stream)]


def test_fleet3_unbiased_on_k66():
    finals = final_estimates(Fleet3, K66, 20, 0.5, range(10**4))
    assert_mean_within_4se(finals, 225)


def test_fleet3_estimate_never_decreases():
    stream = [te.edge for te in random_stream(30, 30, 500, seed=12).edges]
    est = Fleet3(EstimatorParams(capacity=40, gamma=0.5, seed=7))
    prev = 0.0
    for e in stream:
        out = est.process(e)
        assert out >= prev
        prev = out


def test_fleet3_paired_error_not_worse_than_fleet1():
    stream = [te.edge for te in random_stream(60, 60, 1500, seed=8).edges]
    seeds = range(150)
    m1 = paired_median_stream_error(Fleet1, stream, 150, seeds)
    m3 = paired_median_stream_error(Fleet3, stream, 150, seeds)
    assert m3 <= m1 * 1.10


def test_fleet3_rejects_duplicate_via_adjoin():
    est = Fleet3(EstimatorParams(capacity=100, gamma=0.5, seed=0))
    est.process(Edge(0, 0))  # p = 1, so the edge is retained
    assert Edge(0, 0) in est.reservoir
    with pytest.raises(DuplicateEdgeError):
        est.process(Edge(0, 0))


# ---------------------------------------------------------------- shared

@pytest.mark.parametrize("cls", [Fleet1, Fleet2, Fleet3])
def test_adaptive_duplicate_raises(cls):
    est = cls(EstimatorParams(capacity=100, gamma=0.5, seed=0))
    est.process(Edge(1, 1))
    with pytest.raises(DuplicateEdgeError):
        est.process(Edge(1, 1))


@pytest.mark.parametrize("cls", [Fleet1, Fleet2, Fleet3])
def test_capacity_never_exceeded(cls):
    stream = [te.edge for te in random_stream(20, 20, 350, seed=14).edges]
    est = cls(EstimatorParams(capacity=10, gamma=0.5, seed=21))
    for e in stream:
        est.process(e)
        assert len(est.reservoir) <= 10
        assert est.p == 0.5 ** est.level


@pytest.mark.parametrize("cls", [Fleet1, Fleet2, Fleet3])
def test_deterministic_replay(cls):
    stream = [te.edge for te in random_stream(20, 20, 300, seed=15).edges]
    runs = []
    for _ in range(2):
        est = cls(EstimatorParams(capacity=25, gamma=0.5, seed=31337))
        runs.append(run_stream(est, stream))
    assert runs[0] == runs[1]


def test_estimate_is_pure():
    est = Fleet1(EstimatorParams(capacity=5, gamma=0.5, seed=1))
    assert est.estimate() == 0.0
    stream = [te.edge for te in complete_biclique(2, 2).edges]
    run_stream(est, stream)
    snapshot = (est.estimate(), est.t, len(est.reservoir))
    for _ in range(3):
        assert est.estimate() == snapshot[0]
    assert (est.estimate(), est.t, len(est.reservoir)) == snapshot
