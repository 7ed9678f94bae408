"""Simplified storage engine: block manager, DRAM front tier, no in-place updates.

Records live in blocks; a block is opaque and identified by (file, offset,
size).  Reads walk DRAM cache -> block cache -> disk.  Updates never touch
the old block: a fresh block is written to disk, offered to the cache's
admission policy, and the obsolete block is freed, which invalidates any
cached copy.  Inserts behave like updates minus the freeing.

Operations return the device accesses they generated as ``(device, kind,
bytes)`` tuples; pricing those accesses into virtual time is the
simulator's job, so the engine stays independent of the cost model.
"""

from __future__ import annotations

import enum
from collections import OrderedDict
from typing import NamedTuple

from .admission import AdmissionConfig, AdmissionPolicy, DatasetTracker, Decision, Origin, should_admit
from .cache import BlockCache, BlockId, InsertOutcome, RemovalCause

DEFAULT_BLOCK_SIZE = 16384


class DeviceAccess(NamedTuple):
    device: str  # nvram | dram | ssd
    kind: str  # read | write
    nbytes: int


class Served(enum.Enum):
    DRAM = "dram"
    NVCACHE = "nvcache"
    SSD = "ssd"


class LogicalRecordSpace:
    """Mapping from logical keys to their current live block.

    Fresh blocks come from a monotonically growing offset allocator, so a
    freed block id can never come back to life.
    """

    def __init__(self, block_size: int = DEFAULT_BLOCK_SIZE, file_id: int = 0):
        if block_size <= 0:
            raise ValueError("block_size must be positive")
        self.block_size = block_size
        self.file_id = file_id
        self.next_block_ordinal = 0
        self._blocks: list[BlockId] = []

    @property
    def record_count(self) -> int:
        return len(self._blocks)

    def live_block(self, key: int) -> BlockId:
        return self._blocks[key]

    def allocate_block(self) -> BlockId:
        block = BlockId(self.file_id, self.next_block_ordinal * self.block_size, self.block_size)
        self.next_block_ordinal += 1
        return block

    def append_record(self) -> tuple[int, BlockId]:
        """Create a new logical record in a fresh block; returns (key, block)."""
        block = self.allocate_block()
        self._blocks.append(block)
        return len(self._blocks) - 1, block

    def replace_record(self, key: int) -> tuple[BlockId, BlockId]:
        """Move a record into a fresh block; returns (freed_old, new)."""
        old = self._blocks[key]
        new = self.allocate_block()
        self._blocks[key] = new
        return old, new

    def live_blocks(self) -> list[BlockId]:
        return list(self._blocks)


class DramCacheModel:
    """Strict-LRU front tier standing in for engine cache plus OS buffer cache."""

    def __init__(self, capacity_bytes: int):
        if capacity_bytes < 0:
            raise ValueError("capacity_bytes must be >= 0")
        self.capacity_bytes = capacity_bytes
        self.used_bytes = 0
        self.hits = 0
        self.misses = 0
        self._resident: OrderedDict[BlockId, int] = OrderedDict()

    def access(self, block_id: BlockId) -> bool:
        """Touch a block; True and refreshed recency on hit."""
        if block_id in self._resident:
            self._resident.move_to_end(block_id)
            self.hits += 1
            return True
        self.misses += 1
        return False

    def insert(self, block_id: BlockId) -> None:
        """Make a block resident, silently displacing LRU blocks as needed."""
        if block_id in self._resident:
            self._resident.move_to_end(block_id)
            return
        self._resident[block_id] = block_id.size
        self.used_bytes += block_id.size
        while self.used_bytes > self.capacity_bytes and self._resident:
            _, size = self._resident.popitem(last=False)
            self.used_bytes -= size

    def drop(self, block_id: BlockId) -> None:
        size = self._resident.pop(block_id, None)
        if size is not None:
            self.used_bytes -= size

    def __contains__(self, block_id: BlockId) -> bool:
        return block_id in self._resident

    def __len__(self) -> int:
        return len(self._resident)

    @property
    def hit_ratio(self) -> float:
        total = self.hits + self.misses
        return self.hits / total if total else 0.0


class StorageEngine:
    """Binds the record space, DRAM tier, block cache and admission policy.

    With the ``disabled`` policy the block cache is bypassed wholesale: no
    lookups, no admissions, no invalidations, so reads are priced DRAM or
    disk only.
    """

    def __init__(
        self,
        records: LogicalRecordSpace,
        dram: DramCacheModel,
        cache: BlockCache,
        admission_cfg: AdmissionConfig,
        tracker: DatasetTracker,
    ):
        self.records = records
        self.dram = dram
        self.cache = cache
        self.admission_cfg = admission_cfg
        self.tracker = tracker
        self.ssd_blocks_written = 0
        self.admit_decisions = {d: 0 for d in Decision}
        self._cache_enabled = admission_cfg.policy is not AdmissionPolicy.DISABLED

    def _offer(self, block_id: BlockId, origin: Origin, now: float, accesses: list) -> None:
        decision = should_admit(block_id, origin, self.cache.window, self.tracker, self.admission_cfg)
        self.admit_decisions[decision] += 1
        if decision is Decision.ADMIT:
            if self.cache.insert(block_id, now) is InsertOutcome.INSERTED:
                accesses.append(DeviceAccess("nvram", "write", block_id.size))

    def _free(self, block_id: BlockId, accesses: list) -> None:
        if self._cache_enabled and self.cache.remove(block_id, RemovalCause.INVALIDATION):
            accesses.append(DeviceAccess("nvram", "write", self.cache.removal_write_bytes))
        self.dram.drop(block_id)

    def read_record(self, key: int, now: float) -> tuple[Served, list[DeviceAccess]]:
        """Serve one record read, reporting where it came from."""
        block_id = self.records.live_block(key)
        if self.dram.access(block_id):
            return Served.DRAM, [DeviceAccess("dram", "read", block_id.size)]
        accesses: list[DeviceAccess] = []
        if self._cache_enabled and self.cache.lookup(block_id, now) is not None:
            served = Served.NVCACHE
            accesses.append(DeviceAccess("nvram", "read", block_id.size))
        else:
            served = Served.SSD
            accesses.append(DeviceAccess("ssd", "read", block_id.size))
            if self._cache_enabled:
                self._offer(block_id, Origin.READ_PATH, now, accesses)
        self.dram.insert(block_id)
        return served, accesses

    def update_record(self, key: int, now: float) -> list[DeviceAccess]:
        """Rewrite one record into a fresh block and free the old one."""
        old, new = self.records.replace_record(key)
        accesses = [DeviceAccess("ssd", "write", new.size)]
        self.ssd_blocks_written += 1
        self.tracker.grow(new.size)
        if self._cache_enabled:
            self._offer(new, Origin.WRITE_PATH, now, accesses)
        self._free(old, accesses)
        self.tracker.shrink(old.size)
        self.dram.insert(new)
        return accesses

    def insert_record(self, now: float) -> tuple[int, list[DeviceAccess]]:
        """Create a new record; like an update with nothing to free."""
        key, new = self.records.append_record()
        accesses = [DeviceAccess("ssd", "write", new.size)]
        self.ssd_blocks_written += 1
        self.tracker.grow(new.size)
        if self._cache_enabled:
            self._offer(new, Origin.WRITE_PATH, now, accesses)
        self.dram.insert(new)
        return key, accesses

    def scan_records(self, start_key: int, length: int, now: float) -> list[DeviceAccess]:
        """Read ``length`` consecutive records, wrapping around the keyspace."""
        n = self.records.record_count
        accesses: list[DeviceAccess] = []
        for i in range(length):
            _, acc = self.read_record((start_key + i) % n, now)
            accesses.extend(acc)
        return accesses

    def populate(self, n_records: int, now: float = 0.0) -> None:
        """Create ``n_records`` through the write path (no cost accounting)."""
        for _ in range(n_records):
            self.insert_record(now)
