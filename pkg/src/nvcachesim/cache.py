"""Bucketed block cache: entry storage, lookup/insert/remove, and counters.

The cache is a hash table with a fixed bucket count; colliding blocks share a
bucket.  Every bucket has its own lock, so operations on distinct buckets may
run in parallel while operations on one bucket serialize.  A separate stats
lock makes counter updates and the capacity check atomic.  Lock order is
always bucket -> stats.

Payloads are never materialized: the simulation accounts payload bytes but
stores only metadata.  The cache is volatile by design; there is no
persistence across runs.

The write/lookup balance that admission decisions consume is tracked here in
an epoch window: raw events accumulate into the current epoch, and at each
epoch boundary the history is folded with an exponential decay.  The ratio
(inserted + removed) / looked_up over that window is exposed as ``obp()``.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass
from typing import NamedTuple, Optional


class BlockId(NamedTuple):
    """Identity of an on-disk block: (file, byte offset, size in bytes).

    Two ids are equal iff all three fields are equal; size must be positive.
    """

    file_id: int
    offset: int
    size: int


class CacheEntry:
    """Per-block metadata for a resident block.

    Admission counts as the first access, so ``access_count >= 1`` and
    ``last_access_time >= admit_time`` always hold.
    """

    __slots__ = ("id", "payload_size", "admit_time", "last_access_time", "access_count")

    def __init__(self, block_id: BlockId, now: float):
        self.id = block_id
        self.payload_size = block_id.size
        self.admit_time = now
        self.last_access_time = now
        self.access_count = 1

    def __repr__(self) -> str:
        return (
            f"CacheEntry({self.id}, admitted={self.admit_time}, "
            f"last={self.last_access_time}, count={self.access_count})"
        )


@dataclass(frozen=True)
class CacheCounters:
    """Monotonic event counters; a frozen snapshot copy."""

    blocks_inserted: int = 0
    blocks_removed: int = 0
    removed_by_invalidation: int = 0
    removed_by_eviction: int = 0
    blocks_looked_up: int = 0
    lookup_hits: int = 0
    bytes_written: int = 0
    bytes_read: int = 0


@dataclass(frozen=True)
class CacheStats:
    """Point-in-time view: counters plus occupancy and hit ratio."""

    counters: CacheCounters
    used_bytes: int
    resident_blocks: int
    hit_ratio: float


class InsertOutcome(enum.Enum):
    INSERTED = "inserted"
    REJECTED_FULL = "rejected_full"
    DUPLICATE = "duplicate"


class RemovalCause(enum.Enum):
    INVALIDATION = "invalidation"
    EVICTION = "eviction"


DEFAULT_OBP_EPOCH_SECONDS = 1.0
DEFAULT_OBP_DECAY = 0.5

# Bucket density: one bucket per ~5.5 MB of capacity (32768 buckets per
# 180e9 bytes), rounded up to a power of two.
_BUCKET_BYTES = 180e9 / 32768


def default_bucket_count(capacity_bytes: int) -> int:
    raw = max(1, math.ceil(capacity_bytes / _BUCKET_BYTES))
    return 1 << (raw - 1).bit_length()


@dataclass(frozen=True)
class CacheConfig:
    """Construction parameters for :class:`BlockCache`.

    ``bucket_count`` of 0 selects the default density rule.  The epoch
    length and decay control the admission-facing rate window; defaults are
    a one-virtual-second epoch with 0.5 decay per epoch.  Desk-scale runs,
    which last fractions of a virtual second, shrink the epoch accordingly.
    """

    capacity_bytes: int
    bucket_count: int = 0
    seed: int = 0
    obp_epoch_seconds: float = DEFAULT_OBP_EPOCH_SECONDS
    obp_decay: float = DEFAULT_OBP_DECAY

    def __post_init__(self):
        if self.capacity_bytes <= 0:
            raise ValueError("capacity_bytes must be positive")
        if self.bucket_count < 0:
            raise ValueError("bucket_count must be >= 1 (or 0 for the default rule)")
        if self.obp_epoch_seconds <= 0:
            raise ValueError("obp_epoch_seconds must be positive")
        if not 0.0 <= self.obp_decay < 1.0:
            raise ValueError("obp_decay must be in [0, 1)")


class ObpWindow:
    """Smoothed insert/remove/lookup rates over exponentially decayed epochs.

    The current epoch's raw counts participate at full weight, so the ratio
    updates continuously; each ``roll()`` folds them into the history with
    the decay factor.  Not locked: callers synchronize (BlockCache updates
    it under its stats lock).
    """

    __slots__ = (
        "decay",
        "cur_inserted",
        "cur_removed",
        "cur_looked_up",
        "ew_inserted",
        "ew_removed",
        "ew_looked_up",
    )

    def __init__(self, decay: float = DEFAULT_OBP_DECAY):
        self.decay = decay
        self.cur_inserted = 0
        self.cur_removed = 0
        self.cur_looked_up = 0
        self.ew_inserted = 0.0
        self.ew_removed = 0.0
        self.ew_looked_up = 0.0

    def roll(self) -> None:
        """Close the current epoch.

        A closed epoch at age k contributes with weight decay**k; the open
        epoch counts at full weight, so folding applies the decay on entry.
        """
        d = self.decay
        self.ew_inserted = (self.ew_inserted + self.cur_inserted) * d
        self.ew_removed = (self.ew_removed + self.cur_removed) * d
        self.ew_looked_up = (self.ew_looked_up + self.cur_looked_up) * d
        self.cur_inserted = 0
        self.cur_removed = 0
        self.cur_looked_up = 0

    def value(self) -> float:
        """(inserted + removed) / looked_up over the window.

        Returns ``math.inf`` (saturated: exceeds any finite target) when
        writes occurred but no lookups, and 0.0 when nothing happened.
        """
        num = self.ew_inserted + self.cur_inserted + self.ew_removed + self.cur_removed
        den = self.ew_looked_up + self.cur_looked_up
        if den == 0:
            return math.inf if num > 0 else 0.0
        return num / den


class BlockCache:
    """The second-tier block cache.

    Thread-safe under the bucket-granular contract described in the module
    docstring.  ``removal_write_bytes`` is the allocator metadata charged to
    ``bytes_written`` whenever a resident block is removed.
    """

    def __init__(self, config: CacheConfig, removal_write_bytes: int = 256):
        self.config = config
        self.capacity_bytes = config.capacity_bytes
        self.bucket_count = config.bucket_count or default_bucket_count(config.capacity_bytes)
        self.removal_write_bytes = removal_write_bytes
        self._seed = config.seed
        self._buckets: list[dict[BlockId, CacheEntry]] = [{} for _ in range(self.bucket_count)]
        self._bucket_locks = [threading.Lock() for _ in range(self.bucket_count)]
        self._stats_lock = threading.Lock()
        self._used_bytes = 0
        self._inserted = 0
        self._removed_invalidation = 0
        self._removed_eviction = 0
        self._looked_up = 0
        self._hits = 0
        self._bytes_written = 0
        self._bytes_read = 0
        self.window = ObpWindow(config.obp_decay)
        self.obp_epoch_seconds = config.obp_epoch_seconds

    def bucket_index(self, block_id: BlockId) -> int:
        # Int-tuple hashing is unsalted, so this is deterministic for a
        # fixed seed within one interpreter version.
        return hash((self._seed, block_id)) % self.bucket_count

    @property
    def used_bytes(self) -> int:
        return self._used_bytes

    def lookup(self, block_id: BlockId, now: float) -> Optional[CacheEntry]:
        """Return the resident entry for ``block_id``, or None on miss.

        A hit refreshes the entry's recency and frequency and accounts the
        payload as read.
        """
        idx = self.bucket_index(block_id)
        with self._bucket_locks[idx]:
            entry = self._buckets[idx].get(block_id)
            if entry is not None:
                entry.last_access_time = now
                entry.access_count += 1
            with self._stats_lock:
                self._looked_up += 1
                self.window.cur_looked_up += 1
                if entry is not None:
                    self._hits += 1
                    self._bytes_read += entry.payload_size
        return entry

    def insert(self, block_id: BlockId, now: float) -> InsertOutcome:
        """Store a block the admission policy already approved.

        Rejects without mutation when the block would not fit or is already
        resident; both are normal outcomes, not errors.
        """
        if block_id.size <= 0:
            raise ValueError(f"block size must be positive: {block_id}")
        idx = self.bucket_index(block_id)
        with self._bucket_locks[idx]:
            bucket = self._buckets[idx]
            if block_id in bucket:
                return InsertOutcome.DUPLICATE
            with self._stats_lock:
                if self._used_bytes + block_id.size > self.capacity_bytes:
                    return InsertOutcome.REJECTED_FULL
                self._used_bytes += block_id.size
                self._inserted += 1
                self._bytes_written += block_id.size
                self.window.cur_inserted += 1
            bucket[block_id] = CacheEntry(block_id, now)
        return InsertOutcome.INSERTED

    def remove(self, block_id: BlockId, cause: RemovalCause) -> bool:
        """Delete a block if resident.  Returns True when something was removed.

        Freeing cache memory writes allocator metadata, so a successful
        removal charges ``removal_write_bytes`` to ``bytes_written``.
        """
        idx = self.bucket_index(block_id)
        with self._bucket_locks[idx]:
            entry = self._buckets[idx].pop(block_id, None)
            if entry is None:
                return False
            with self._stats_lock:
                self._used_bytes -= entry.payload_size
                if cause is RemovalCause.EVICTION:
                    self._removed_eviction += 1
                else:
                    self._removed_invalidation += 1
                self._bytes_written += self.removal_write_bytes
                self.window.cur_removed += 1
        return True

    def obp(self) -> float:
        """Current smoothed (inserted + removed) / looked_up ratio."""
        with self._stats_lock:
            return self.window.value()

    def roll_epoch(self) -> tuple[float, int, int, int]:
        """Close the current rate-window epoch (driven by the simulator clock).

        Returns the pre-roll view ``(obp, looked_up, inserted, removed)`` of
        the epoch just closed, for time-series recording.
        """
        with self._stats_lock:
            w = self.window
            snap = (w.value(), w.cur_looked_up, w.cur_inserted, w.cur_removed)
            w.roll()
            return snap

    def counters(self) -> CacheCounters:
        with self._stats_lock:
            removed = self._removed_invalidation + self._removed_eviction
            return CacheCounters(
                blocks_inserted=self._inserted,
                blocks_removed=removed,
                removed_by_invalidation=self._removed_invalidation,
                removed_by_eviction=self._removed_eviction,
                blocks_looked_up=self._looked_up,
                lookup_hits=self._hits,
                bytes_written=self._bytes_written,
                bytes_read=self._bytes_read,
            )

    def stats_snapshot(self) -> CacheStats:
        """Consistent counters copy plus occupancy and hit ratio."""
        with self._stats_lock:
            removed = self._removed_invalidation + self._removed_eviction
            counters = CacheCounters(
                blocks_inserted=self._inserted,
                blocks_removed=removed,
                removed_by_invalidation=self._removed_invalidation,
                removed_by_eviction=self._removed_eviction,
                blocks_looked_up=self._looked_up,
                lookup_hits=self._hits,
                bytes_written=self._bytes_written,
                bytes_read=self._bytes_read,
            )
            used = self._used_bytes
        resident = sum(len(b) for b in self._buckets)
        return CacheStats(
            counters=counters,
            used_bytes=used,
            resident_blocks=resident,
            hit_ratio=counters.lookup_hits / max(counters.blocks_looked_up, 1),
        )

    def resident_snapshot(self) -> list[CacheEntry]:
        """Entries currently resident, gathered bucket by bucket.

        Holds at most one bucket lock at a time, so the result is a
        per-bucket-consistent view, not a global atomic one.
        """
        out: list[CacheEntry] = []
        for idx in range(self.bucket_count):
            with self._bucket_locks[idx]:
                out.extend(self._buckets[idx].values())
        return out

    def __contains__(self, block_id: BlockId) -> bool:
        idx = self.bucket_index(block_id)
        with self._bucket_locks[idx]:
            return block_id in self._buckets[idx]

    def __len__(self) -> int:
        return sum(len(b) for b in self._buckets)
