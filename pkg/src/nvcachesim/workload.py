"""Deterministic workload generation: op mixes, key distributions, traces.

A workload is a mix of read/update/insert/scan operations over a keyspace,
issued by a fixed number of logical threads.  Each thread owns an
independent random stream derived from (seed, thread index), so the op
sequence is fully determined by the spec and the seed, independent of how
operations interleave in time.

Key distributions: ``uniform``, ``zipfian`` (rank-popularity with exponent
theta, sampled by exact inverse CDF over the initial keyspace), and
``latest`` (the zipfian rank counted back from the newest record).  Inserts
extend the keyspace; the zipfian CDF is not rebuilt on growth, which is a
deliberate desk-scale simplification.

Traces are line-oriented text, one operation per line::

    <virtual-ts> <thread> <kind> <key>

For insert operations the key column records the key that was assigned at
execution time; replay performs a fresh insert.
"""

from __future__ import annotations

import enum
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from typing import Iterator, TextIO

import numpy as np
import yaml

from .engine import DEFAULT_BLOCK_SIZE
from .units import parse_bytes

DEFAULT_ZIPF_THETA = 0.99
DEFAULT_SCAN_LENGTH = 100
DEFAULT_SCALE = 1e-3

_MIX_TOL = 1e-9
_CHUNK = 4096


class OpKind(enum.Enum):
    READ = "read"
    UPDATE = "update"
    INSERT = "insert"
    SCAN = "scan"


_KIND_ORDER = (OpKind.READ, OpKind.UPDATE, OpKind.INSERT, OpKind.SCAN)
_KIND_BY_NAME = {k.value: k for k in OpKind}


@dataclass(frozen=True)
class WorkloadSpec:
    """Everything needed to generate one benchmark's operation streams."""

    name: str
    op_mix: dict[str, float]
    thread_count: int
    record_count: int
    duration: float
    block_size: int = DEFAULT_BLOCK_SIZE
    key_distribution: str = "uniform"  # uniform | zipfian | latest
    zipf_theta: float = DEFAULT_ZIPF_THETA
    populate: bool = True
    scan_length: int = DEFAULT_SCAN_LENGTH

    def __post_init__(self):
        unknown = set(self.op_mix) - set(_KIND_BY_NAME)
        if unknown:
            raise ValueError(f"unknown op kinds in mix: {sorted(unknown)}")
        total = sum(self.op_mix.values())
        if abs(total - 1.0) > _MIX_TOL:
            raise ValueError(f"op mix must sum to 1, got {total}")
        if any(f < 0 for f in self.op_mix.values()):
            raise ValueError("op mix fractions must be non-negative")
        if self.thread_count < 1:
            raise ValueError("thread_count must be >= 1")
        if self.record_count < 1:
            raise ValueError("record_count must be >= 1")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if self.key_distribution not in ("uniform", "zipfian", "latest"):
            raise ValueError(f"unknown key distribution {self.key_distribution!r}")
        if self.key_distribution != "uniform" and self.zipf_theta <= 0:
            raise ValueError("zipf_theta must be positive")
        if self.scan_length < 1:
            raise ValueError("scan_length must be >= 1")

    def dataset_bytes(self) -> int:
        return self.record_count * self.block_size

    def cumulative_mix(self) -> tuple[tuple[float, OpKind], ...]:
        """Thresholds over [0, 1) in fixed kind order, for mapping uniforms."""
        out = []
        acc = 0.0
        for kind in _KIND_ORDER:
            acc += self.op_mix.get(kind.value, 0.0)
            out.append((acc, kind))
        return tuple(out)


def zipf_pmf(n: int, theta: float) -> np.ndarray:
    """Probability of each rank 1..n under a Zipf law with exponent theta."""
    weights = np.arange(1, n + 1, dtype=np.float64) ** -theta
    return weights / weights.sum()


class KeySampler:
    """Maps a uniform draw in [0, 1) to a key, honoring the distribution.

    Zipfian ranks come from exact inverse-CDF lookup; the CDF is built once
    over ``initial_count`` keys.  ``latest`` maps rank r to the r-th newest
    record of the keyspace current at draw time.
    """

    def __init__(self, spec: WorkloadSpec, initial_count: int | None = None):
        self.distribution = spec.key_distribution
        n0 = initial_count if initial_count is not None else spec.record_count
        if n0 < 1:
            raise ValueError("sampler needs at least one record")
        if self.distribution in ("zipfian", "latest"):
            self._cdf = np.cumsum(zipf_pmf(n0, spec.zipf_theta)).tolist()
            self._cdf[-1] = 1.0  # guard against float undershoot
        else:
            self._cdf = None

    def key_for(self, u: float, current_count: int) -> int:
        if self.distribution == "uniform":
            return min(int(u * current_count), current_count - 1)
        rank = bisect_right(self._cdf, u)
        if self.distribution == "zipfian":
            return min(rank, current_count - 1)
        return max(current_count - 1 - rank, 0)


def thread_rng(seed: int, thread_id: int) -> np.random.Generator:
    """The random stream owned by one logical thread."""
    return np.random.default_rng(np.random.SeedSequence([seed, thread_id]))


def next_op(
    spec: WorkloadSpec,
    rng: np.random.Generator,
    current_count: int | None = None,
    sampler: KeySampler | None = None,
) -> tuple[OpKind, int]:
    """Draw one operation: two uniforms, one for the kind, one for the key.

    Insert operations consume the key draw too (the key itself is assigned
    by the engine at execution), which keeps the stream aligned whatever
    the mix.
    """
    if sampler is None:
        sampler = KeySampler(spec)
    n = current_count if current_count is not None else spec.record_count
    u_kind = rng.random()
    u_key = rng.random()
    kind = OpKind.SCAN
    for threshold, k in spec.cumulative_mix():
        if u_kind < threshold:
            kind = k
            break
    return kind, sampler.key_for(u_key, n)


class OpStream:
    """Chunked equivalent of repeated ``next_op`` draws for one thread.

    Produces identical (kind, key-uniform) pairs to calling ``next_op``
    with the same generator; the key is materialized later because the
    keyspace may have grown by dispatch time.
    """

    def __init__(self, spec: WorkloadSpec, seed: int, thread_id: int):
        self._rng = thread_rng(seed, thread_id)
        self._cum = spec.cumulative_mix()
        self._buf: list[float] = []
        self._pos = 0

    def next(self) -> tuple[OpKind, float]:
        pos = self._pos
        buf = self._buf
        if pos >= len(buf):
            # Plain floats: elementwise access on an ndarray is far slower.
            buf = self._buf = self._rng.random(2 * _CHUNK).tolist()
            pos = 0
        u_kind = buf[pos]
        u_key = buf[pos + 1]
        self._pos = pos + 2
        for threshold, kind in self._cum:
            if u_kind < threshold:
                return kind, u_key
        return self._cum[-1][1], u_key


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

# (name, mix, threads, dataset GB at full scale, distribution, desk duration s)
_PRESET_ROWS = [
    ("ycsb-a", {"read": 0.5, "update": 0.5}, 20, 130, "zipfian", 0.05),
    # The published mix for this row duplicates the 50/50 row above; kept as
    # printed rather than the conventional 95/5.
    ("ycsb-b", {"read": 0.5, "update": 0.5}, 20, 194, "zipfian", 0.05),
    ("ycsb-c", {"read": 1.0}, 20, 259, "zipfian", 0.03),
    ("ycsb-d", {"read": 0.95, "insert": 0.05}, 100, 219, "latest", 0.005),
    ("ycsb-e", {"scan": 0.95, "insert": 0.05}, 20, 210, "zipfian", 0.02),
    ("read-only-large", {"read": 1.0}, 16, 120, "zipfian", 0.04),
    ("update-only", {"update": 1.0}, 6, 134, "uniform", 0.10),
]


def presets(scale: float = DEFAULT_SCALE, block_size: int = DEFAULT_BLOCK_SIZE) -> list[WorkloadSpec]:
    """Built-in workload specs, dataset sizes scaled down from their
    full-size definitions by ``scale`` (default 1/1000).

    Durations are desk-scale: virtual time advances at device speed, so a
    few hundredths of a virtual second already covers the scaled dataset
    many times over.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    out = []
    for name, mix, threads, gb, dist, duration in _PRESET_ROWS:
        records = max(1, int(gb * 1e9 * scale) // block_size)
        out.append(
            WorkloadSpec(
                name=name,
                op_mix=dict(mix),
                thread_count=threads,
                record_count=records,
                duration=duration,
                block_size=block_size,
                key_distribution=dist,
            )
        )
    return out


def preset_by_name(name: str, scale: float = DEFAULT_SCALE, block_size: int = DEFAULT_BLOCK_SIZE) -> WorkloadSpec:
    for spec in presets(scale, block_size):
        if spec.name == name:
            return spec
    raise KeyError(f"no preset named {name!r}")


def load_workload(path: str) -> WorkloadSpec:
    """Load a workload spec from a YAML mapping of WorkloadSpec fields.

    ``block_size`` accepts k/M/G suffixes.
    """
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: workload document must be a mapping")
    if "block_size" in doc:
        doc = dict(doc, block_size=parse_bytes(doc["block_size"]))
    try:
        return WorkloadSpec(**doc)
    except TypeError as exc:
        raise ValueError(f"{path}: {exc}") from None


def scale_spec(spec: WorkloadSpec, record_count: int | None = None, duration: float | None = None) -> WorkloadSpec:
    """Copy a spec with a different keyspace or duration."""
    kwargs = {}
    if record_count is not None:
        kwargs["record_count"] = record_count
    if duration is not None:
        kwargs["duration"] = duration
    return replace(spec, **kwargs)


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


class TraceParseError(ValueError):
    def __init__(self, path: str, line_no: int, reason: str):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = path
        self.line_no = line_no


@dataclass
class TraceOp:
    timestamp: float
    thread: int
    kind: OpKind
    key: int


@dataclass
class TraceReplay:
    """Per-thread operation queues reconstructed from a trace file."""

    thread_count: int
    ops_by_thread: list[list[TraceOp]] = field(default_factory=list)

    def total_ops(self) -> int:
        return sum(len(q) for q in self.ops_by_thread)


def format_trace_line(timestamp: float, thread: int, kind: OpKind, key: int) -> str:
    return f"{timestamp!r} {thread} {kind.value} {key}\n"


def write_trace(fh: TextIO, ops: Iterator[tuple[float, int, OpKind, int]]) -> None:
    for ts, thread, kind, key in ops:
        fh.write(format_trace_line(ts, thread, kind, key))


def replay_trace(path: str) -> TraceReplay:
    """Parse a trace file back into per-thread queues.

    Raises :class:`TraceParseError` naming the offending line on any
    malformed input.
    """
    per_thread: dict[int, list[TraceOp]] = {}
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise TraceParseError(path, line_no, f"expected 4 fields, got {len(parts)}")
            try:
                ts = float(parts[0])
                thread = int(parts[1])
                kind = _KIND_BY_NAME[parts[2]]
                key = int(parts[3])
            except (ValueError, KeyError) as exc:
                raise TraceParseError(path, line_no, f"bad field: {exc}") from None
            if thread < 0:
                raise TraceParseError(path, line_no, "negative thread id")
            per_thread.setdefault(thread, []).append(TraceOp(ts, thread, kind, key))
    if not per_thread:
        raise TraceParseError(path, 0, "empty trace")
    thread_count = max(per_thread) + 1
    return TraceReplay(
        thread_count=thread_count,
        ops_by_thread=[per_thread.get(t, []) for t in range(thread_count)],
    )
