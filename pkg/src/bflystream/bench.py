"""Experiment runner: replay a stream through an estimator with checkpoints.

Produces per-checkpoint metrics rows (estimate, exact count, relative error,
cumulative estimator-only time) plus a run summary (MAPE, final error,
throughput, butterfly density). Trials run in independent processes when
more than one worker is available; trial i uses seed (base seed + i), so
results do not depend on scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import fmean
from time import perf_counter_ns

from .errors import BflyError, ConfigError, NoValidLevelError
from .estimators import (
    BernoulliEstimator,
    EstimatorParams,
    Fleet1,
    Fleet2,
    Fleet3,
)
from .exact import (
    RunningExactCounter,
    TimeWindowCounter,
    TrailingWindowCounter,
    count_butterflies_exact,
)
from .ingest import EdgeStream
from .windows import SeqWinEstimator, TimeWinEstimator

ALGORITHMS = ("Exact", "Bernoulli", "Fleet1", "Fleet2", "Fleet3", "SeqWin", "TimeWin")
_WINDOWED = ("SeqWin", "TimeWin")

CSV_HEADER = "trial,t,estimate,exact,relative_error,elapsed_ns"
SUMMARY_KEYS = (
    "mape_pct",
    "final_error_pct",
    "throughput_eps",
    "butterfly_density",
    "algorithm",
    "M",
    "gamma",
    "seed",
)


@dataclass
class MetricsRow:
    trial: int
    t: int
    estimate: float
    exact: int | None
    relative_error: float | None
    elapsed_ns: int


@dataclass
class ExperimentConfig:
    algorithm: str
    stream: EdgeStream
    capacity: int | None = None      # reservoir size M
    gamma: float = 0.5
    window: int | None = None        # SeqWin / TimeWin
    n_max: int | None = None         # TimeWin
    sample_p: float | None = None    # Bernoulli
    seed: int = 0
    trials: int = 1
    checkpoint_every: int | None = None  # default: max(1, stream/100)
    ground_truth: str = "inline"     # "inline" | "none" | "file"
    truth_table: dict[int, int] | None = None
    measure_time: bool = True        # wall-clock timing is not replayable

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if len(self.stream) == 0:
            raise ConfigError("empty stream")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.checkpoint_every is not None and self.checkpoint_every < 1:
            raise ConfigError("checkpoint_every must be >= 1")
        if self.algorithm == "Bernoulli":
            if self.sample_p is None or not 0.0 < self.sample_p <= 1.0:
                raise ConfigError("Bernoulli requires --p in (0, 1]")
        elif self.sample_p is not None:
            raise ConfigError("--p applies only to Bernoulli")
        if self.algorithm not in ("Exact", "Bernoulli"):
            if self.capacity is None or self.capacity < 1:
                raise ConfigError(f"{self.algorithm} requires a positive reservoir size")
            if not 0.0 < self.gamma < 1.0:
                raise ConfigError("gamma must be in (0, 1)")
        if self.algorithm in _WINDOWED:
            if self.window is None or self.window < 1:
                raise ConfigError(f"{self.algorithm} requires a positive --window")
        elif self.window is not None:
            raise ConfigError("--window applies only to SeqWin/TimeWin")
        if self.algorithm == "TimeWin":
            if self.n_max is None or self.n_max < 1:
                raise ConfigError("TimeWin requires a positive --nmax")
        elif self.n_max is not None:
            raise ConfigError("--nmax applies only to TimeWin")
        if self.ground_truth not in ("inline", "none", "file"):
            raise ConfigError(f"unknown ground_truth mode {self.ground_truth!r}")
        if self.ground_truth == "file" and self.truth_table is None:
            raise ConfigError("ground_truth 'file' needs a truth table")


@dataclass
class ExperimentResult:
    rows: list[MetricsRow]
    summary: dict = field(default_factory=dict)


class _ExactAdapter:
    """Exact running counter behind the estimator interface."""

    name = "Exact"

    def __init__(self):
        self._counter = RunningExactCounter()

    def process(self, edge):
        return self._counter.add(edge)

    def estimate(self) -> float:
        return float(self._counter.count)


def _make_estimator(cfg: ExperimentConfig, seed: int):
    algo = cfg.algorithm
    if algo == "Exact":
        return _ExactAdapter()
    if algo == "Bernoulli":
        return BernoulliEstimator(cfg.sample_p, seed=seed)
    if algo in ("Fleet1", "Fleet2", "Fleet3"):
        params = EstimatorParams(cfg.capacity, cfg.gamma, seed)
        return {"Fleet1": Fleet1, "Fleet2": Fleet2, "Fleet3": Fleet3}[algo](params)
    if algo == "SeqWin":
        return SeqWinEstimator(cfg.capacity, cfg.window, cfg.gamma, seed)
    if algo == "TimeWin":
        return TimeWinEstimator(cfg.capacity, cfg.n_max, cfg.gamma, seed)
    raise ConfigError(f"unknown algorithm {algo!r}")


def _make_oracle(cfg: ExperimentConfig):
    if cfg.algorithm == "SeqWin":
        return TrailingWindowCounter(cfg.window)
    if cfg.algorithm == "TimeWin":
        return TimeWindowCounter()
    return RunningExactCounter()


def _verify_oracle(oracle) -> None:
    # inline truth must agree with a from-scratch recount at the end
    recount = count_butterflies_exact(oracle.adj)
    if recount != oracle.count:
        raise BflyError(
            f"incremental exact count {oracle.count} != recount {recount}"
        )


def _run_trial(cfg: ExperimentConfig, trial: int, ce: int) -> list[MetricsRow]:
    est = _make_estimator(cfg, cfg.seed + trial)
    oracle = _make_oracle(cfg) if cfg.ground_truth == "inline" else None
    is_timewin = cfg.algorithm == "TimeWin"
    edges = cfg.stream.edges
    n = len(edges)
    rows: list[MetricsRow] = []
    elapsed = 0
    pos = 0
    process = est.process
    while pos < n:
        seg = edges[pos:min(pos + ce, n)]
        pos += len(seg)
        # estimator work is the only timed region
        if cfg.measure_time:
            if is_timewin:
                t0 = perf_counter_ns()
                for te in seg:
                    process(te)
                elapsed += perf_counter_ns() - t0
            else:
                t0 = perf_counter_ns()
                for te in seg:
                    process(te.edge)
                elapsed += perf_counter_ns() - t0
        else:
            if is_timewin:
                for te in seg:
                    process(te)
            else:
                for te in seg:
                    process(te.edge)
        if oracle is not None and not is_timewin:
            for te in seg:
                oracle.add(te.edge)
        elif oracle is not None:
            for te in seg:
                oracle.add(te.edge, te.ts)

        if is_timewin:
            now = seg[-1].ts
            if now < cfg.window:
                continue  # window precedes the stream: no level can cover it
            try:
                value = est.query(cfg.window, now)
            except NoValidLevelError:
                continue
            exact = oracle.count_at(cfg.window, now) if oracle is not None else None
        else:
            value = est.estimate()
            exact = oracle.count if oracle is not None else None
        if exact is None and cfg.truth_table is not None:
            exact = cfg.truth_table.get(pos)
        rel = abs(exact - value) / exact if exact else None
        rows.append(MetricsRow(trial, pos, value, exact, rel, elapsed))
    if oracle is not None:
        _verify_oracle(oracle)
    return rows


def _trial_batch(args) -> list[MetricsRow]:
    cfg, trials, ce = args
    rows: list[MetricsRow] = []
    for trial in trials:
        rows.extend(_run_trial(cfg, trial, ce))
    return rows


def worker_count() -> int:
    env = os.environ.get("BFLY_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    cfg.validate()
    n = len(cfg.stream)
    ce = cfg.checkpoint_every or max(1, n // 100)
    workers = min(worker_count(), cfg.trials)
    if workers > 1:
        chunks = [list(range(w, cfg.trials, workers)) for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_trial_batch, [(cfg, c, ce) for c in chunks]))
        rows = [row for batch in batches for row in batch]
        rows.sort(key=lambda r: (r.trial, r.t))
    else:
        rows = _trial_batch((cfg, list(range(cfg.trials)), ce))
    return ExperimentResult(rows, _summarize(cfg, rows, n))


def mape(rows: list[MetricsRow]) -> float:
    """Mean of the per-checkpoint relative errors, in percent."""
    errors = [r.relative_error for r in rows if r.relative_error is not None]
    if not errors:
        raise ValueError("no rows with a relative error")
    return 100.0 * fmean(errors)


def _summarize(cfg: ExperimentConfig, rows: list[MetricsRow], n: int) -> dict:
    summary = {
        "algorithm": cfg.algorithm,
        "M": cfg.capacity,
        "gamma": cfg.gamma if cfg.algorithm not in ("Exact", "Bernoulli") else None,
        "seed": cfg.seed,
    }
    errors = [r.relative_error for r in rows if r.relative_error is not None]
    summary["mape_pct"] = 100.0 * fmean(errors) if errors else None
    finals = []
    for trial in range(cfg.trials):
        trial_errs = [
            r.relative_error
            for r in rows
            if r.trial == trial and r.relative_error is not None
        ]
        if trial_errs:
            finals.append(trial_errs[-1])
    summary["final_error_pct"] = 100.0 * fmean(finals) if finals else None
    if cfg.measure_time:
        total_ns = sum(r.elapsed_ns for r in rows if r.t == n)
        summary["throughput_eps"] = (
            n * cfg.trials / (total_ns / 1e9) if total_ns else None
        )
    else:
        summary["throughput_eps"] = None
    density = None
    if cfg.algorithm not in _WINDOWED:
        last_exact = next((r.exact for r in reversed(rows) if r.exact is not None), None)
        if last_exact is not None and rows and rows[-1].t == n:
            density = last_exact / float(n) ** 4
    summary["butterfly_density"] = density
    return summary


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(rows: list[MetricsRow], summary: dict | None, path) -> None:
    """Fixed-format CSV: header, one line per row, then '# key=value' summary lines."""
    with open(path, "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in rows:
            fh.write(
                f"{r.trial},{r.t},{_fmt(float(r.estimate))},{_fmt(r.exact)},"
                f"{_fmt(r.relative_error)},{r.elapsed_ns}\n"
            )
        if summary:
            for key in SUMMARY_KEYS:
                if summary.get(key) is not None:
                    fh.write(f"# {key}={_fmt(summary[key])}\n")


def read_csv(path) -> tuple[list[MetricsRow], dict]:
    """Parse a file produced by emit_csv back into rows and summary."""
    rows: list[MetricsRow] = []
    summary: dict = {}
    with open(path, "r", newline="") as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                summary[key] = value
                continue
            trial, t, estimate, exact, rel, elapsed = line.split(",")
            rows.append(
                MetricsRow(
                    int(trial),
                    int(t),
                    float(estimate),
                    int(exact) if exact else None,
                    float(rel) if rel else None,
                    int(elapsed),
                )
            )
    return rows, summary


def truth_from_csv(path) -> dict[int, int]:
    """Checkpoint -> exact count lookup from a previous run's CSV."""
    rows, _ = read_csv(path)
    return {r.t: r.exact for r in rows if r.exact is not None}
