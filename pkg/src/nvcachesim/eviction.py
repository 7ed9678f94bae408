"""Background eviction: periodic scan for stale blocks, least-used out first.

A pass wakes every ``scan_interval`` of virtual time.  Candidates are blocks
not reused within the staleness window; among those, the least frequently
used go first (ties: older last access, then block id, so victim selection
is fully deterministic).  Only enough victims are taken to restore the
configured free-space target.

Modes:
  * ``none``      - eviction disabled entirely;
  * ``eager``     - evict whenever free space is below target, regardless of
                    the write budget;
  * ``throttled`` - consult the admission throttle first and skip the pass
                    when the write/lookup ratio is over target.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .admission import AdmissionConfig, should_evict_now
from .cache import BlockCache, BlockId, CacheEntry, RemovalCause

DEFAULT_SCAN_INTERVAL = 1.0
DEFAULT_STALENESS_WINDOW = 60.0
DEFAULT_TARGET_FREE_FRACTION = 0.05


class EvictionMode(enum.Enum):
    THROTTLED = "throttled"
    EAGER = "eager"
    NONE = "none"


@dataclass(frozen=True)
class EvictionConfig:
    scan_interval: float = DEFAULT_SCAN_INTERVAL
    staleness_window: float = DEFAULT_STALENESS_WINDOW
    target_free_fraction: float = DEFAULT_TARGET_FREE_FRACTION
    mode: EvictionMode = EvictionMode.THROTTLED

    def __post_init__(self):
        if self.scan_interval <= 0:
            raise ValueError("scan_interval must be positive")
        if self.staleness_window <= 0:
            raise ValueError("staleness_window must be positive")
        if not 0.0 <= self.target_free_fraction < 1.0:
            raise ValueError("target_free_fraction must be in [0, 1)")


def select_victims(
    entries: Iterable[CacheEntry],
    now: float,
    cfg: EvictionConfig,
    bytes_needed: int,
) -> list[BlockId]:
    """Pick eviction victims from a resident-set snapshot.

    Victims are exactly the stale entries (idle longer than the staleness
    window), ordered by ascending access count, then older last access, then
    block id; the list is cut to the shortest prefix covering
    ``bytes_needed``.  If all stale bytes together fall short, every stale
    entry is returned.
    """
    if bytes_needed <= 0:
        return []
    stale = [e for e in entries if now - e.last_access_time > cfg.staleness_window]
    stale.sort(key=lambda e: (e.access_count, e.last_access_time, e.id))
    victims: list[BlockId] = []
    covered = 0
    for entry in stale:
        if covered >= bytes_needed:
            break
        victims.append(entry.id)
        covered += entry.payload_size
    return victims


def eviction_pass(
    cache: BlockCache,
    admission_cfg: AdmissionConfig,
    now: float,
    cfg: EvictionConfig,
) -> list[BlockId]:
    """One wakeup of the eviction actor; returns the ids actually evicted.

    Frees space down to ``target_free_fraction`` of capacity.  In throttled
    mode the pass is skipped outright while the write budget is exhausted.
    """
    if cfg.mode is EvictionMode.NONE:
        return []
    if cfg.mode is EvictionMode.THROTTLED and not should_evict_now(cache.window, admission_cfg):
        return []
    free = cache.capacity_bytes - cache.used_bytes
    bytes_needed = int(cfg.target_free_fraction * cache.capacity_bytes) - free
    if bytes_needed <= 0:
        return []
    victims = select_victims(cache.resident_snapshot(), now, cfg, bytes_needed)
    evicted = [vid for vid in victims if cache.remove(vid, RemovalCause.EVICTION)]
    return evicted
