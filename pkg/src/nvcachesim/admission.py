"""Cache admission policy: decide, per candidate block, whether to admit.

Three gates are combined, cheapest and most categorical first:

1. policy gate: a disabled cache, or a write-path candidate under a policy
   that does not allocate on writes, is bypassed outright;
2. small-dataset bypass: while the aggregate size of the workload's files
   still fits in DRAM, nothing is admitted (DRAM-side caches will absorb
   those blocks, so second-tier copies are pure overhead);
3. rate throttle: under the ``obp`` policy, admission pauses whenever the
   smoothed (inserted + removed) / looked_up ratio exceeds its target.

Eviction is gated by the same throttle: evicting frees space that will be
refilled, generating the very writes the throttle exists to limit.

The decision is a pure function of its inputs; the same snapshot always
yields the same answer, and the bypass reason is reported for metrics.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass

from .cache import BlockId, ObpWindow

DEFAULT_OBP_TARGET = 0.10
# Targets in this band behaved acceptably on the reference hardware; the
# config warns outside it but does not refuse.
ACCEPTABLE_OBP_BAND = (0.05, 0.30)


class AdmissionPolicy(enum.Enum):
    ALWAYS_READ_WRITE = "always_read_write"
    NO_WRITE_ALLOCATE = "no_write_allocate"
    OBP = "obp"
    DISABLED = "disabled"


class Origin(enum.Enum):
    READ_PATH = "read_path"
    WRITE_PATH = "write_path"


class Decision(enum.Enum):
    ADMIT = "admit"
    BYPASS_SMALL = "bypass_small"
    BYPASS_OBP = "bypass_obp"
    BYPASS_POLICY = "bypass_policy"


@dataclass(frozen=True)
class AdmissionConfig:
    policy: AdmissionPolicy = AdmissionPolicy.OBP
    obp_target: float = DEFAULT_OBP_TARGET
    dram_bytes: int = 0
    write_path_admission: bool = True

    def __post_init__(self):
        if self.policy is AdmissionPolicy.OBP and self.obp_target <= 0:
            raise ValueError("obp_target must be positive for the obp policy")
        if self.dram_bytes < 0:
            raise ValueError("dram_bytes must be >= 0")


class DatasetTracker:
    """Running aggregate size of all database files, for the small bypass.

    The engine reports growth/shrink as files gain and lose live blocks; the
    slack factor (default 1.0) inflates live bytes to approximate on-disk
    file size including not-yet-reclaimed space.  Updates are atomic.
    """

    def __init__(self, slack_factor: float = 1.0):
        if slack_factor < 1.0:
            raise ValueError("slack_factor must be >= 1.0")
        self.slack_factor = slack_factor
        self._live_bytes = 0
        self._lock = threading.Lock()

    def grow(self, nbytes: int) -> None:
        with self._lock:
            self._live_bytes += nbytes

    def shrink(self, nbytes: int) -> None:
        with self._lock:
            if nbytes > self._live_bytes:
                raise ValueError("file shrink below zero")
            self._live_bytes -= nbytes

    @property
    def aggregate_file_bytes(self) -> float:
        return self._live_bytes * self.slack_factor


def should_admit(
    block_id: BlockId,
    origin: Origin,
    window: ObpWindow,
    tracker: DatasetTracker,
    cfg: AdmissionConfig,
) -> Decision:
    """Admission decision for one candidate block.

    ``window`` is the cache's smoothed rate window at decision time.
    """
    policy = cfg.policy
    if policy is AdmissionPolicy.DISABLED:
        return Decision.BYPASS_POLICY
    if origin is Origin.WRITE_PATH:
        if policy is AdmissionPolicy.NO_WRITE_ALLOCATE or not cfg.write_path_admission:
            return Decision.BYPASS_POLICY
    if tracker.aggregate_file_bytes <= cfg.dram_bytes:
        return Decision.BYPASS_SMALL
    if policy is AdmissionPolicy.OBP and window.value() > cfg.obp_target:
        return Decision.BYPASS_OBP
    return Decision.ADMIT


def should_evict_now(window: ObpWindow, cfg: AdmissionConfig) -> bool:
    """Whether an eviction pass may proceed under the current write budget.

    Only the ``obp`` policy throttles eviction; other policies always
    proceed.
    """
    if cfg.policy is AdmissionPolicy.OBP and window.value() > cfg.obp_target:
        return False
    return True
