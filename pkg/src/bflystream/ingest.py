"""Edge-list ingestion, deduplication, permutation, and synthetic streams.

Input files follow the KONECT convention: one edge per line, '%' comment
lines, the first column a left-partition vertex id and the second a
right-partition id (both >= 1), optionally followed by a weight and an
integer timestamp. Files may be gzip-compressed (detected by magic bytes).
"""

from __future__ import annotations

import gzip
import io
import random
import struct
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

from .errors import MalformedLineError
from .graph import Edge, TimedEdge

_SEPARATORS = str.maketrans(",\t", "  ")
CACHE_MAGIC = b"BFLYSTR1"


@dataclass(frozen=True)
class RawRecord:
    left_id: int
    right_id: int
    extras: tuple[str, ...] = ()


@dataclass
class StreamMeta:
    source: str | None = None
    dedup_dropped: int = 0
    n_left: int = 0
    n_right: int = 0
    used_file_timestamps: bool = False
    reordered_by_timestamp: bool = False
    permuted: bool = False


@dataclass
class EdgeStream:
    edges: list[TimedEdge] = field(default_factory=list)
    meta: StreamMeta = field(default_factory=StreamMeta)

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[TimedEdge]:
        return iter(self.edges)


def _open_text(path) -> io.TextIOBase:
    with open(path, "rb") as probe:
        magic = probe.read(2)
    if magic == b"\x1f\x8b":
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def parse_konect(path) -> Iterator[RawRecord]:
    """Yield one RawRecord per non-comment, non-blank line.

    Tab, space, and comma all separate fields. The first two fields must be
    positive integers; anything after them is kept as opaque tokens.
    """
    with _open_text(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.startswith("%"):
                continue
            fields = line.translate(_SEPARATORS).split()
            if not fields:
                continue
            if len(fields) < 2:
                raise MalformedLineError(path, lineno, f"expected two fields, got {line!r}")
            try:
                left = int(fields[0])
                right = int(fields[1])
            except ValueError:
                raise MalformedLineError(
                    path, lineno, f"non-integer vertex id in {line!r}"
                ) from None
            if left < 1 or right < 1:
                raise MalformedLineError(path, lineno, f"vertex ids must be >= 1 in {line!r}")
            yield RawRecord(left, right, tuple(fields[2:]))


def _record_timestamp(rec: RawRecord) -> int | None:
    # KONECT temporal files carry "left right weight timestamp"
    if len(rec.extras) >= 2:
        try:
            return int(rec.extras[1])
        except ValueError:
            return None
    return None


def preprocess(
    records: Iterable[RawRecord],
    keep_first: bool = True,
    use_timestamps: bool = True,
    source: str | None = None,
) -> EdgeStream:
    """Deduplicate records into a timestamped edge stream.

    Duplicates keep the first occurrence (the last, when keep_first is
    False). Timestamps come from the file when every kept record carries one
    and use_timestamps is set, in which case the stream is stable-sorted by
    timestamp; otherwise the 1-based arrival index is used.
    """
    kept: dict[Edge, int | None] = {}
    order: dict[Edge, int] = {}
    dropped = 0
    for idx, rec in enumerate(records):
        edge = Edge(rec.left_id, rec.right_id)
        if edge in kept:
            dropped += 1
            if keep_first:
                continue
            del kept[edge]  # reinsert so dict order reflects the later position
            del order[edge]
        kept[edge] = _record_timestamp(rec)
        order[edge] = idx
    have_ts = use_timestamps and kept and all(ts is not None for ts in kept.values())
    if have_ts:
        items = sorted(kept.items(), key=lambda kv: kv[1])
        reordered = [e for e, _ in items] != list(kept)
        edges = [TimedEdge(e, ts) for e, ts in items]
    else:
        reordered = False
        edges = [TimedEdge(e, i) for i, e in enumerate(kept, start=1)]
    meta = StreamMeta(
        source=source,
        dedup_dropped=dropped,
        n_left=len({e.edge.left for e in edges}),
        n_right=len({e.edge.right for e in edges}),
        used_file_timestamps=bool(have_ts),
        reordered_by_timestamp=reordered,
    )
    return EdgeStream(edges, meta)


def load_konect(path, keep_first: bool = True, use_timestamps: bool = True) -> EdgeStream:
    """parse_konect + preprocess in one step."""
    return preprocess(
        parse_konect(path), keep_first=keep_first, use_timestamps=use_timestamps,
        source=str(path),
    )


def permute(stream: EdgeStream, seed: int) -> EdgeStream:
    """Uniform random reorder; timestamps become fresh arrival indices."""
    edges = [te.edge for te in stream.edges]
    random.Random(seed).shuffle(edges)
    timed = [TimedEdge(e, i) for i, e in enumerate(edges, start=1)]
    meta = replace(stream.meta, permuted=True, used_file_timestamps=False,
                   reordered_by_timestamp=False)
    return EdgeStream(timed, meta)


def _stream_of(edges: list[Edge], source: str) -> EdgeStream:
    timed = [TimedEdge(e, i) for i, e in enumerate(edges, start=1)]
    meta = StreamMeta(
        source=source,
        n_left=len({e.left for e in edges}),
        n_right=len({e.right for e in edges}),
    )
    return EdgeStream(timed, meta)


def complete_biclique(a: int, b: int) -> EdgeStream:
    """All a*b edges of K_{a,b} in row-major order."""
    if a < 1 or b < 1:
        raise ValueError("biclique sides must be positive")
    edges = [Edge(i, j) for i in range(a) for j in range(b)]
    return _stream_of(edges, f"complete_biclique({a},{b})")


def random_stream(n_left: int, n_right: int, m: int, seed: int = 0) -> EdgeStream:
    """m distinct edges drawn uniformly from the n_left x n_right grid."""
    if n_left < 1 or n_right < 1 or m < 1:
        raise ValueError("random stream parameters must be positive")
    if m > n_left * n_right:
        raise ValueError(f"m={m} exceeds grid size {n_left * n_right}")
    rng = random.Random(seed)
    cells = rng.sample(range(n_left * n_right), m)
    edges = [Edge(*divmod(c, n_right)) for c in cells]
    return _stream_of(edges, f"random({n_left},{n_right},{m})")


def planted_blocks(count: int, a: int, b: int, noise_edges: int = 0, seed: int = 0) -> EdgeStream:
    """`count` vertex-disjoint K_{a,b} blocks in sequence, with `noise_edges`
    extra random edges (on a disjoint id range) spliced in at random spots."""
    if count < 1 or a < 1 or b < 1 or noise_edges < 0:
        raise ValueError("planted block parameters out of range")
    edges = []
    for k in range(count):
        edges.extend(
            Edge(k * a + i, k * b + j) for i in range(a) for j in range(b)
        )
    rng = random.Random(seed)
    if noise_edges:
        lo_l, lo_r = count * a, count * b
        span = max(4 * noise_edges, 4)
        seen = set()
        while len(seen) < noise_edges:
            seen.add(Edge(lo_l + rng.randrange(span), lo_r + rng.randrange(span)))
        for noise in sorted(seen):
            edges.insert(rng.randrange(len(edges) + 1), noise)
    return _stream_of(edges, f"planted_blocks({count},{a},{b},{noise_edges})")


def synth_stream(spec: str, seed: int = 0) -> EdgeStream:
    """Build a synthetic stream from a "kind:arg,arg,..." spec string.

    Kinds: complete_biclique:a,b | random:n_left,n_right,m |
    planted_blocks:count,a,b,noise_edges
    """
    kind, _, arg_str = spec.partition(":")
    try:
        args = [int(x) for x in arg_str.split(",")] if arg_str else []
    except ValueError:
        raise ValueError(f"non-integer argument in synth spec {spec!r}") from None
    if kind == "complete_biclique" and len(args) == 2:
        return complete_biclique(*args)
    if kind == "random" and len(args) == 3:
        return random_stream(*args, seed=seed)
    if kind == "planted_blocks" and len(args) in (3, 4):
        return planted_blocks(*args, seed=seed)
    raise ValueError(f"unrecognized synth spec {spec!r}")


def write_cache(stream: EdgeStream, path) -> None:
    """Binary cache: magic, little-endian u64 count, then (left, right, ts) u64 triples."""
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<Q", len(stream.edges)))
        for (l, r), ts in stream.edges:
            fh.write(struct.pack("<QQQ", l, r, ts))


def read_cache(path) -> EdgeStream:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != CACHE_MAGIC:
            raise ValueError(f"{path}: not a bflystream cache (bad magic {magic!r})")
        (count,) = struct.unpack("<Q", fh.read(8))
        edges = []
        for _ in range(count):
            l, r, ts = struct.unpack("<QQQ", fh.read(24))
            edges.append(TimedEdge(Edge(l, r), ts))
    meta = StreamMeta(
        source=str(path),
        n_left=len({te.edge.left for te in edges}),
        n_right=len({te.edge.right for te in edges}),
    )
    return EdgeStream(edges, meta)
