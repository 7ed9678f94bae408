"""Closed-loop discrete-event simulator binding workload, engine and devices.

Each logical thread issues its next operation the moment the previous one
completes.  An operation's cost is priced entirely at dispatch: the engine
reports which device accesses the operation performs, and each access is
charged bytes / bandwidth at the per-device writer counts observed at that
instant (a write access counts itself as a writer).  Devices a dispatching
operation writes to hold a writer slot until the operation completes, which
is how admission traffic degrades concurrent cache lookups.

Two recurring background events drive policy machinery: the rate-window
epoch roll (feeding the admission throttle and the OBP time series) and the
eviction scan.  Runs are deterministic: a fixed spec, configs and seed give
identical results, down to the emitted CSV bytes.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import NamedTuple, Optional

from .admission import AdmissionConfig, DatasetTracker
from .cache import BlockCache, CacheConfig, CacheCounters
from .devices import DeviceClock, DeviceProfile, access_cost, default_profiles
from .engine import DramCacheModel, LogicalRecordSpace, StorageEngine
from .eviction import EvictionConfig, EvictionMode, eviction_pass
from .workload import KeySampler, OpKind, OpStream, TraceReplay, WorkloadSpec, format_trace_line

DEFAULT_WARMUP_FRACTION = 0.10
DEFAULT_COST_RATIO = 0.38

_OP_DONE = 0
_EPOCH = 1
_SCAN = 2
_RELEASE = 3
_MEASURE = 4

_KIND_NAMES = ("read", "update", "insert", "scan")
_KIND_VALUE = {k: k.value for k in OpKind}  # skips the enum descriptor in the hot loop


class EpochSample(NamedTuple):
    """One rate-window epoch: its end time, the smoothed ratio at that
    moment, the epoch's raw event counts and cache occupancy."""

    time: float
    obp: float
    looked_up: int
    inserted: int
    removed: int
    used_bytes: int


@dataclass
class SimResult:
    """Everything a run produces; see ``write_csv`` for the file layout."""

    workload: str
    policy: str
    eviction_mode: str
    seed: int
    dram_bytes: int
    nvram_capacity_bytes: int
    block_size: int
    thread_count: int
    duration: float
    populate_seconds: float
    measure_start: float
    end_time: float
    ops_measured: dict[str, int]
    ops_total: dict[str, int]
    ops_per_second: dict[str, float]
    total_ops_per_second: float
    nvcache_hit_ratio: float
    dram_hit_ratio: float
    counters: CacheCounters
    removed_to_inserted: float
    device_bytes: dict[str, dict[str, int]]
    device_seconds: dict[str, dict[str, float]]
    obp_timeseries: list[EpochSample]
    admit_decisions: dict[str, int]
    dataset_bytes_final: int
    thread_busy_seconds: list[float]
    thread_span_seconds: list[float]
    writer_counts_at_end: dict[str, int]
    wall_runtime: float = 0.0

    def measured_seconds(self) -> float:
        return self.end_time - self.measure_start

    def obp_epochs_after_warmup(self) -> list[EpochSample]:
        return [s for s in self.obp_timeseries if s.time >= self.measure_start]

    def finite_obp_mean(self) -> float:
        finite = [s.obp for s in self.obp_timeseries if s.obp != float("inf")]
        return sum(finite) / len(finite) if finite else 0.0

    def saturated_epochs(self) -> int:
        return sum(1 for s in self.obp_timeseries if s.obp == float("inf"))


class _Sim:
    """One run's mutable state; ``run()`` is the event loop."""

    def __init__(
        self,
        spec: WorkloadSpec,
        cache_cfg: CacheConfig,
        admission_cfg: AdmissionConfig,
        eviction_cfg: EvictionConfig,
        profiles: dict[str, DeviceProfile],
        seed: int,
        warmup_fraction: float,
        dataset_slack: float,
        replay: Optional[TraceReplay],
        trace_lines: Optional[list[str]],
    ):
        if not 0.0 <= warmup_fraction < 1.0:
            raise ValueError("warmup_fraction must be in [0, 1)")
        for dev in ("nvram", "dram", "ssd"):
            if dev not in profiles:
                raise ValueError(f"missing device profile: {dev}")
        if replay is not None and replay.thread_count != spec.thread_count:
            raise ValueError(
                f"trace has {replay.thread_count} threads, spec has {spec.thread_count}"
            )
        self.spec = spec
        self.profiles = profiles
        self.nvram = profiles["nvram"]
        self.cache = BlockCache(cache_cfg, removal_write_bytes=self.nvram.per_removal_write_bytes)
        self.admission_cfg = admission_cfg
        self.eviction_cfg = eviction_cfg
        self.seed = seed
        self.warmup_fraction = warmup_fraction
        self.tracker = DatasetTracker(dataset_slack)
        self.records = LogicalRecordSpace(spec.block_size)
        self.dram = DramCacheModel(admission_cfg.dram_bytes)
        self.engine = StorageEngine(self.records, self.dram, self.cache, admission_cfg, self.tracker)
        self.clock = DeviceClock()
        self.replay = replay
        self.trace_lines = trace_lines

        self.heap: list = []
        self.seq = 0
        self.epoch_len = cache_cfg.obp_epoch_seconds
        self.timeseries: list[EpochSample] = []
        self.device_bytes = {d: {"read": 0, "write": 0} for d in profiles}
        self.device_seconds = {d: {"read": 0.0, "write": 0.0} for d in profiles}
        self._read_points = {d: p.read_points for d, p in profiles.items()}
        self._write_points = {d: p.write_points for d, p in profiles.items()}
        self.clock.in_flight_writers = {d: 0 for d in profiles}
        self.ops_total = {k: 0 for k in _KIND_NAMES}
        self.ops_measured = {k: 0 for k in _KIND_NAMES}
        self.t_end = float("inf")  # set once populate finishes
        self.measure_start = float("inf")
        self.measuring_snapshot: Optional[tuple] = None
        self.replay_pos = [0] * spec.thread_count

        if replay is None:
            self.streams = [OpStream(spec, seed, t) for t in range(spec.thread_count)]
            self.sampler = KeySampler(spec)
        else:
            self.streams = []
            self.sampler = None

        self.thread_busy = [0.0] * spec.thread_count
        self.thread_last = [0.0] * spec.thread_count

    # -- event plumbing ----------------------------------------------------

    def _push(self, t: float, tag: int, data) -> None:
        heappush(self.heap, (t, self.seq, tag, data))
        self.seq += 1

    def _price(self, accesses) -> tuple[float, list[str]]:
        """Total service time of an op's accesses; registers writer slots.

        Same math as :func:`devices.access_cost`, inlined with prebuilt
        bandwidth curves for the hot loop.
        """
        total = 0.0
        write_devs: list[str] = []
        in_flight = self.clock.in_flight_writers
        for dev, kind, nbytes in accesses:
            writers = in_flight[dev]
            if kind == "write":
                writers += 1
                if dev not in write_devs:
                    write_devs.append(dev)
                points = self._write_points[dev]
            else:
                points = self._read_points[dev]
            bw = points[-1][1]
            if writers <= points[0][0]:
                bw = points[0][1]
            else:
                for i in range(1, len(points)):
                    w1, bw1 = points[i]
                    if writers <= w1:
                        w0, bw0 = points[i - 1]
                        bw = bw0 + (bw1 - bw0) * (writers - w0) / (w1 - w0)
                        break
            cost = nbytes / (bw * 1e9)
            total += cost
            self.device_bytes[dev][kind] += nbytes
            self.device_seconds[dev][kind] += cost
        for dev in write_devs:
            in_flight[dev] += 1
        return total, write_devs

    # -- op dispatch -------------------------------------------------------

    def _dispatch(self, thread: int, t: float) -> bool:
        """Issue the thread's next operation at time t.  False when the
        thread has no more work (replay queue exhausted)."""
        n = self.records.record_count
        if self.replay is not None:
            queue = self.replay.ops_by_thread[thread]
            pos = self.replay_pos[thread]
            if pos >= len(queue):
                return False
            self.replay_pos[thread] = pos + 1
            op = queue[pos]
            kind = op.kind
            key = op.key % n if n else 0
        else:
            kind, u_key = self.streams[thread].next()
            key = self.sampler.key_for(u_key, n)

        engine = self.engine
        if kind is OpKind.READ:
            _, accesses = engine.read_record(key, t)
        elif kind is OpKind.UPDATE:
            accesses = engine.update_record(key, t)
        elif kind is OpKind.INSERT:
            key, accesses = engine.insert_record(t)
        else:
            accesses = engine.scan_records(key, self.spec.scan_length, t)

        if self.trace_lines is not None:
            self.trace_lines.append(format_trace_line(t, thread, kind, key))
        cost, write_devs = self._price(accesses)
        self._push(t + cost, _OP_DONE, (thread, _KIND_VALUE[kind], cost, write_devs))
        return True

    def _dispatch_populate(self, thread: int, t: float) -> None:
        if self.populate_remaining <= 0:
            return
        self.populate_remaining -= 1
        self.populate_in_flight += 1
        _, accesses = self.engine.insert_record(t)
        cost, write_devs = self._price(accesses)
        self._push(t + cost, _OP_DONE, (thread, "populate", cost, write_devs))

    # -- background events ---------------------------------------------------

    def _on_epoch(self, t: float) -> None:
        obp, looked_up, inserted, removed = self.cache.roll_epoch()
        self.timeseries.append(
            EpochSample(t, obp, looked_up, inserted, removed, self.cache.used_bytes)
        )
        nxt = t + self.epoch_len
        if nxt <= self.t_end + 1e-12:
            self._push(nxt, _EPOCH, None)

    def _on_scan(self, t: float) -> None:
        evicted = eviction_pass(self.cache, self.admission_cfg, t, self.eviction_cfg)
        if evicted:
            nbytes = len(evicted) * self.nvram.per_removal_write_bytes
            if nbytes > 0:
                writers = self.clock.writers("nvram") + 1
                cost = access_cost(self.nvram, "write", nbytes, writers)
                self.device_bytes["nvram"]["write"] += nbytes
                self.device_seconds["nvram"]["write"] += cost
                self.clock.add_writer("nvram")
                self._push(t + cost, _RELEASE, "nvram")
        nxt = t + self.eviction_cfg.scan_interval
        if nxt <= self.t_end + 1e-12:
            self._push(nxt, _SCAN, None)

    def _snapshot_measure_start(self) -> None:
        c = self.cache.counters()
        self.measuring_snapshot = (c.lookup_hits, c.blocks_looked_up, self.dram.hits, self.dram.misses)

    # -- the run -----------------------------------------------------------

    def run(self) -> SimResult:
        wall_start = time.perf_counter()
        spec = self.spec
        clock = self.clock

        self._push(self.epoch_len, _EPOCH, None)
        if self.eviction_cfg.mode is not EvictionMode.NONE:
            self._push(self.eviction_cfg.scan_interval, _SCAN, None)

        # Populate: create the keyspace through the write path, or conjure
        # it silently when the spec says the dataset pre-exists.
        self.populate_remaining = spec.record_count if spec.populate else 0
        self.populate_in_flight = 0
        populate_ops = self.populate_remaining
        if spec.populate:
            for th in range(spec.thread_count):
                self._dispatch_populate(th, 0.0)
            while self.populate_in_flight > 0:
                t, _, tag, data = heappop(self.heap)
                clock.advance(t)
                if tag == _OP_DONE:
                    thread, _, _, write_devs = data
                    for dev in write_devs:
                        clock.release_writer(dev)
                    self.populate_in_flight -= 1
                    self._dispatch_populate(thread, t)
                elif tag == _EPOCH:
                    self._on_epoch(t)
                elif tag == _SCAN:
                    self._on_scan(t)
                elif tag == _RELEASE:
                    clock.release_writer(data)
        else:
            for _ in range(spec.record_count):
                _, block = self.records.append_record()
                self.tracker.grow(block.size)

        t_pop = clock.now
        self.t_end = t_pop + spec.duration
        self.measure_start = t_pop + self.warmup_fraction * spec.duration
        self._push(self.measure_start, _MEASURE, None)
        if self.measure_start == t_pop:
            pass  # snapshot event still fires first at that timestamp

        for th in range(spec.thread_count):
            self.thread_last[th] = t_pop
            self._dispatch(th, t_pop)

        measure_started = False
        while self.heap:
            t, _, tag, data = heappop(self.heap)
            clock.advance(t)
            if tag == _OP_DONE:
                thread, kind_name, cost, write_devs = data
                for dev in write_devs:
                    clock.release_writer(dev)
                self.thread_busy[thread] += cost
                self.thread_last[thread] = t
                self.ops_total[kind_name] += 1
                if measure_started and t <= self.t_end:
                    self.ops_measured[kind_name] += 1
                # Replayed runs execute the recorded stream to exhaustion so
                # the op sequence is policy-independent; generated runs stop
                # issuing at the duration boundary.
                if self.replay is not None or t < self.t_end:
                    self._dispatch(thread, t)
            elif tag == _MEASURE:
                self._snapshot_measure_start()
                measure_started = True
            elif tag == _EPOCH:
                self._on_epoch(t)
            elif tag == _SCAN:
                self._on_scan(t)
            elif tag == _RELEASE:
                clock.release_writer(data)

        return self._result(t_pop, populate_ops, wall_start)

    def _result(self, t_pop: float, populate_ops: int, wall_start: float) -> SimResult:
        leftover = {d: n for d, n in self.clock.in_flight_writers.items() if n != 0}
        if leftover:
            raise RuntimeError(f"writer slots leaked at run end: {leftover}")
        counters = self.cache.counters()
        measured_seconds = self.t_end - self.measure_start
        hits0, lookups0, dhits0, dmiss0 = self.measuring_snapshot or (0, 0, 0, 0)
        lookups_delta = counters.blocks_looked_up - lookups0
        hits_delta = counters.lookup_hits - hits0
        dram_total_delta = (self.dram.hits - dhits0) + (self.dram.misses - dmiss0)
        ops_per_second = {
            k: self.ops_measured[k] / measured_seconds for k in _KIND_NAMES
        }
        return SimResult(
            workload=self.spec.name,
            policy=self.admission_cfg.policy.value,
            eviction_mode=self.eviction_cfg.mode.value,
            seed=self.seed,
            dram_bytes=self.admission_cfg.dram_bytes,
            nvram_capacity_bytes=self.cache.capacity_bytes,
            block_size=self.spec.block_size,
            thread_count=self.spec.thread_count,
            duration=self.spec.duration,
            populate_seconds=t_pop,
            measure_start=self.measure_start,
            end_time=self.t_end,
            ops_measured=dict(self.ops_measured),
            ops_total=dict(self.ops_total),
            ops_per_second=ops_per_second,
            total_ops_per_second=sum(ops_per_second.values()),
            nvcache_hit_ratio=hits_delta / max(lookups_delta, 1),
            dram_hit_ratio=(self.dram.hits - dhits0) / max(dram_total_delta, 1),
            counters=counters,
            removed_to_inserted=counters.blocks_removed / max(counters.blocks_inserted, 1),
            device_bytes=self.device_bytes,
            device_seconds=self.device_seconds,
            obp_timeseries=self.timeseries,
            admit_decisions={d.value: n for d, n in self.engine.admit_decisions.items()},
            dataset_bytes_final=int(self.tracker.aggregate_file_bytes),
            thread_busy_seconds=list(self.thread_busy),
            thread_span_seconds=[last - t_pop for last in self.thread_last],
            writer_counts_at_end=dict(self.clock.in_flight_writers),
            wall_runtime=time.perf_counter() - wall_start,
        )


def run(
    spec: WorkloadSpec,
    cache_cfg: CacheConfig,
    admission_cfg: AdmissionConfig,
    eviction_cfg: EvictionConfig,
    device_profiles: Optional[dict[str, DeviceProfile]] = None,
    seed: int = 0,
    *,
    warmup_fraction: float = DEFAULT_WARMUP_FRACTION,
    dataset_slack: float = 1.0,
    replay: Optional[TraceReplay] = None,
    trace_path: Optional[str] = None,
) -> SimResult:
    """Simulate one workload run and return its metrics.

    ``trace_path`` records the measured-phase operation stream; ``replay``
    substitutes a previously recorded stream for the generator (thread
    counts must match; the populate phase is re-run from the spec).
    """
    profiles = device_profiles if device_profiles is not None else default_profiles()
    trace_lines: Optional[list[str]] = [] if trace_path else None
    sim = _Sim(
        spec,
        cache_cfg,
        admission_cfg,
        eviction_cfg,
        profiles,
        seed,
        warmup_fraction,
        dataset_slack,
        replay,
        trace_lines,
    )
    result = sim.run()
    if trace_path:
        with open(trace_path, "w") as fh:
            fh.writelines(trace_lines)
    return result


# ---------------------------------------------------------------------------
# Reporting
# ---------------------------------------------------------------------------

_CSV_COLUMNS = [
    "row_type", "time", "obp", "epoch_looked_up", "epoch_inserted", "epoch_removed",
    "used_bytes", "workload", "policy", "eviction_mode", "seed", "dram_bytes",
    "nvram_bytes", "block_size", "thread_count", "duration", "populate_seconds",
    "measure_start", "measured_seconds", "ops_read", "ops_update", "ops_insert",
    "ops_scan", "ops_total", "ops_per_sec_total", "ops_per_sec_read",
    "ops_per_sec_update", "ops_per_sec_insert", "ops_per_sec_scan",
    "nvcache_hit_ratio", "dram_hit_ratio", "blocks_inserted", "blocks_removed",
    "removed_invalidation", "removed_eviction", "blocks_looked_up", "lookup_hits",
    "cache_bytes_written", "removed_to_inserted", "obp_mean", "obp_saturated_epochs",
    "nvram_bytes_read", "nvram_bytes_written", "ssd_bytes_read", "ssd_bytes_written",
    "dram_bytes_read", "dram_bytes_written",
]


def _r(x: float) -> str:
    return repr(float(x))


def result_to_csv(result: SimResult) -> str:
    """Render a result as CSV text: one row per epoch, then a summary row.

    Wall runtime is deliberately not included so identical runs emit
    byte-identical files.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    blank_summary = [""] * (len(_CSV_COLUMNS) - 7)
    for s in result.obp_timeseries:
        writer.writerow(
            ["epoch", _r(s.time), _r(s.obp), s.looked_up, s.inserted, s.removed, s.used_bytes]
            + blank_summary
        )
    c = result.counters
    summary = {
        "row_type": "summary",
        "time": _r(result.end_time),
        "obp": "",
        "epoch_looked_up": "",
        "epoch_inserted": "",
        "epoch_removed": "",
        "used_bytes": "",
        "workload": result.workload,
        "policy": result.policy,
        "eviction_mode": result.eviction_mode,
        "seed": result.seed,
        "dram_bytes": result.dram_bytes,
        "nvram_bytes": result.nvram_capacity_bytes,
        "block_size": result.block_size,
        "thread_count": result.thread_count,
        "duration": _r(result.duration),
        "populate_seconds": _r(result.populate_seconds),
        "measure_start": _r(result.measure_start),
        "measured_seconds": _r(result.measured_seconds()),
        "ops_read": result.ops_measured["read"],
        "ops_update": result.ops_measured["update"],
        "ops_insert": result.ops_measured["insert"],
        "ops_scan": result.ops_measured["scan"],
        "ops_total": sum(result.ops_measured.values()),
        "ops_per_sec_total": _r(result.total_ops_per_second),
        "ops_per_sec_read": _r(result.ops_per_second["read"]),
        "ops_per_sec_update": _r(result.ops_per_second["update"]),
        "ops_per_sec_insert": _r(result.ops_per_second["insert"]),
        "ops_per_sec_scan": _r(result.ops_per_second["scan"]),
        "nvcache_hit_ratio": _r(result.nvcache_hit_ratio),
        "dram_hit_ratio": _r(result.dram_hit_ratio),
        "blocks_inserted": c.blocks_inserted,
        "blocks_removed": c.blocks_removed,
        "removed_invalidation": c.removed_by_invalidation,
        "removed_eviction": c.removed_by_eviction,
        "blocks_looked_up": c.blocks_looked_up,
        "lookup_hits": c.lookup_hits,
        "cache_bytes_written": c.bytes_written,
        "removed_to_inserted": _r(result.removed_to_inserted),
        "obp_mean": _r(result.finite_obp_mean()),
        "obp_saturated_epochs": result.saturated_epochs(),
        "nvram_bytes_read": result.device_bytes["nvram"]["read"],
        "nvram_bytes_written": result.device_bytes["nvram"]["write"],
        "ssd_bytes_read": result.device_bytes["ssd"]["read"],
        "ssd_bytes_written": result.device_bytes["ssd"]["write"],
        "dram_bytes_read": result.device_bytes["dram"]["read"],
        "dram_bytes_written": result.device_bytes["dram"]["write"],
    }
    writer.writerow([summary[col] for col in _CSV_COLUMNS])
    return buf.getvalue()


def result_to_summary(result: SimResult) -> str:
    """Human-readable one-screen report."""
    c = result.counters
    lines = [
        f"workload {result.workload}  policy={result.policy}  eviction={result.eviction_mode}  seed={result.seed}",
        f"  dram {result.dram_bytes}  nvram {result.nvram_capacity_bytes}  threads {result.thread_count}  block {result.block_size}",
        f"  populate {result.populate_seconds:.6f}s  measured {result.measured_seconds():.6f}s of {result.duration:.6f}s",
        f"  throughput {result.total_ops_per_second:,.0f} ops/s  ("
        + ", ".join(f"{k} {v:,.0f}" for k, v in result.ops_per_second.items() if v > 0)
        + ")",
        f"  nvcache hit ratio {result.nvcache_hit_ratio:.3f}  dram hit ratio {result.dram_hit_ratio:.3f}",
        f"  obp mean {result.finite_obp_mean():.4f}  saturated epochs {result.saturated_epochs()}",
        f"  blocks inserted {c.blocks_inserted}  removed {c.blocks_removed} "
        f"(invalidation {c.removed_by_invalidation}, eviction {c.removed_by_eviction})",
        f"  removed/inserted {result.removed_to_inserted:.3f}  looked up {c.blocks_looked_up}  hits {c.lookup_hits}",
        f"  bytes written: nvram {result.device_bytes['nvram']['write']}  ssd {result.device_bytes['ssd']['write']}",
        f"  bytes read: nvram {result.device_bytes['nvram']['read']}  ssd {result.device_bytes['ssd']['read']}  dram {result.device_bytes['dram']['read']}",
        f"  admission: " + ", ".join(f"{k} {v}" for k, v in result.admit_decisions.items()),
        f"  wall runtime {result.wall_runtime:.2f}s",
    ]
    return "\n".join(lines) + "\n"


def emit(result: SimResult, fmt: str, path: str) -> None:
    """Write a run report to ``path`` in ``csv`` or ``summary`` format."""
    if fmt == "csv":
        text = result_to_csv(result)
    elif fmt == "summary":
        text = result_to_summary(result)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# Comparison across runs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResultSummary:
    """The slice of a result that cross-run comparison needs."""

    label: str
    workload: str
    ops_per_second: dict[str, float]
    total_ops_per_second: float
    dram_bytes: int
    nvram_bytes: int

    @staticmethod
    def from_result(result: SimResult, label: str = "") -> "ResultSummary":
        return ResultSummary(
            label=label or f"{result.policy}/{result.eviction_mode}",
            workload=result.workload,
            ops_per_second=dict(result.ops_per_second),
            total_ops_per_second=result.total_ops_per_second,
            dram_bytes=result.dram_bytes,
            nvram_bytes=result.nvram_capacity_bytes,
        )


def load_result_csv(path: str) -> ResultSummary:
    """Read back the summary row of an emitted CSV."""
    with open(path) as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            if row.get("row_type") == "summary":
                return ResultSummary(
                    label=path,
                    workload=row["workload"],
                    ops_per_second={
                        k: float(row[f"ops_per_sec_{k}"]) for k in _KIND_NAMES
                    },
                    total_ops_per_second=float(row["ops_per_sec_total"]),
                    dram_bytes=int(row["dram_bytes"]),
                    nvram_bytes=int(row["nvram_bytes"]),
                )
    raise ValueError(f"{path}: no summary row found")


def relative_memory_cost(
    dram_bytes: float,
    nvram_bytes: float,
    baseline_dram_bytes: float,
    baseline_nvram_bytes: float = 0.0,
    cost_ratio: float = DEFAULT_COST_RATIO,
) -> float:
    """Memory cost relative to a baseline, at a second-tier per-byte cost
    ratio (default 0.38x DRAM)."""
    baseline = baseline_dram_bytes + cost_ratio * baseline_nvram_bytes
    if baseline <= 0:
        raise ValueError("baseline memory must be positive")
    return (dram_bytes + cost_ratio * nvram_bytes) / baseline


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    throughput_ratio: dict[str, float]
    total_ratio: float
    relative_cost: float
    perf_per_dollar: float


def compare(
    results: list,
    baseline_index: int = 0,
    cost_ratio: float = DEFAULT_COST_RATIO,
) -> list[ComparisonRow]:
    """Per-op-kind throughput ratios against a baseline run, plus relative
    memory cost and performance-per-dollar.

    All results must come from the same workload; anything else is refused.
    """
    summaries = [
        r if isinstance(r, ResultSummary) else ResultSummary.from_result(r) for r in results
    ]
    if not summaries:
        raise ValueError("nothing to compare")
    base = summaries[baseline_index]
    for s in summaries:
        if s.workload != base.workload:
            raise ValueError(
                f"workload mismatch: {s.label!r} ran {s.workload!r}, "
                f"baseline ran {base.workload!r}"
            )
    rows = []
    for s in summaries:
        ratios = {
            k: s.ops_per_second[k] / base.ops_per_second[k]
            for k in _KIND_NAMES
            if base.ops_per_second.get(k, 0) > 0
        }
        total_ratio = s.total_ops_per_second / base.total_ops_per_second
        cost = relative_memory_cost(
            s.dram_bytes, s.nvram_bytes, base.dram_bytes, base.nvram_bytes, cost_ratio
        )
        rows.append(
            ComparisonRow(
                label=s.label,
                throughput_ratio=ratios,
                total_ratio=total_ratio,
                relative_cost=cost,
                perf_per_dollar=total_ratio / cost,
            )
        )
    return rows


def comparison_table(rows: list[ComparisonRow]) -> str:
    """Plain-text rendering of ``compare`` output."""
    kinds = sorted({k for row in rows for k in row.throughput_ratio})
    header = ["run"] + [f"x_{k}" for k in kinds] + ["x_total", "rel_cost", "perf_per_$"]
    table = [header]
    for row in rows:
        table.append(
            [row.label]
            + [f"{row.throughput_ratio.get(k, float('nan')):.3f}" for k in kinds]
            + [f"{row.total_ratio:.3f}", f"{row.relative_cost:.2f}", f"{row.perf_per_dollar:.3f}"]
        )
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in table]
    return "\n".join(lines) + "\n"
