"""Simulator for a second-tier block cache on write-limited memory.

The cache sits between a DRAM front tier and disk.  Because writes to the
cache medium disproportionately slow concurrent reads, admission is gated
on the observed balance between write-generating events (insertions and
removals) and lookups, alongside a small-dataset bypass and a throttled
background eviction scan.  A discrete-event harness drives the whole stack
over virtual time and reports throughput, hit ratios and write volumes.
"""

from .admission import (
    AdmissionConfig,
    AdmissionPolicy,
    DatasetTracker,
    Decision,
    Origin,
    should_admit,
    should_evict_now,
)
from .cache import (
    BlockCache,
    BlockId,
    CacheConfig,
    CacheCounters,
    CacheEntry,
    CacheStats,
    InsertOutcome,
    ObpWindow,
    RemovalCause,
)
from .devices import (
    DeviceClock,
    DeviceProfile,
    access_cost,
    default_profiles,
    load_profiles,
    read_bandwidth,
    write_bandwidth,
)
from .engine import DramCacheModel, LogicalRecordSpace, Served, StorageEngine
from .eviction import EvictionConfig, EvictionMode, eviction_pass, select_victims
from .harness import (
    EpochSample,
    SimResult,
    compare,
    emit,
    relative_memory_cost,
    result_to_csv,
    run,
)
from .workload import (
    KeySampler,
    OpKind,
    OpStream,
    WorkloadSpec,
    load_workload,
    next_op,
    preset_by_name,
    presets,
    replay_trace,
)

__version__ = "0.1.0"
