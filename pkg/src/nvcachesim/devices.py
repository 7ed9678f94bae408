"""Virtual-time cost model for the three storage devices in the simulation.

Each device carries a read-bandwidth curve sampled at a few calibration
points, indexed by the number of concurrently active writers.  The NVRAM
curve collapses steeply as writers appear; the DRAM curve sags only mildly;
the SSD is flat.  Between calibration points the curves are interpolated
linearly and clamped flat beyond the last point.

Service times are pure transfer times: bytes divided by the effective
bandwidth at the writer count observed when the operation starts.  There is
no re-pricing of an operation mid-flight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import yaml

# Default absolute DRAM read bandwidth in GB/s.  The interference data for
# DRAM is expressed as fractional losses, so an absolute baseline is needed
# to turn them into a curve; 60 GB/s is a stand-in for commodity DDR4, not a
# measured value, and can be overridden via a profile file.
DEFAULT_DRAM_READ_GBPS = 60.0

GB = 1e9


@dataclass(frozen=True)
class DeviceProfile:
    """Bandwidth calibration for one device.

    ``read_points`` and ``write_points`` are ``(active_writers, GB/s)``
    pairs, sorted by writer count, with non-increasing bandwidth.
    ``write_bandwidth`` is the zero-writer write bandwidth; it is also the
    first write point.  ``per_removal_write_bytes`` is the allocator
    metadata written to the device when a cached block is freed.
    """

    name: str
    read_points: tuple[tuple[int, float], ...]
    write_bandwidth: float
    write_points: tuple[tuple[int, float], ...] = ()
    per_removal_write_bytes: int = 0

    def __post_init__(self):
        if not self.read_points:
            raise ValueError(f"{self.name}: at least one read point required")
        if not self.write_points:
            object.__setattr__(self, "write_points", ((0, self.write_bandwidth),))
        for points, label in ((self.read_points, "read"), (self.write_points, "write")):
            last_w = -1
            last_bw = math.inf
            for w, bw in points:
                if w <= last_w:
                    raise ValueError(f"{self.name}: {label} points not sorted by writer count")
                if bw <= 0:
                    raise ValueError(f"{self.name}: {label} bandwidth must be positive")
                if bw > last_bw:
                    raise ValueError(f"{self.name}: {label} bandwidth must be non-increasing")
                last_w, last_bw = w, bw
        if self.per_removal_write_bytes < 0:
            raise ValueError(f"{self.name}: per_removal_write_bytes must be >= 0")


@dataclass
class DeviceClock:
    """Carrier of simulated time and per-device writer concurrency.

    ``now`` is in virtual seconds and never decreases.  ``in_flight_writers``
    counts operations currently writing to each device; the simulator
    increments it when a writing operation dispatches and decrements it when
    the operation completes.
    """

    now: float = 0.0
    in_flight_writers: dict[str, int] = field(default_factory=dict)

    def advance(self, t: float) -> None:
        if t < self.now:
            raise ValueError(f"clock moved backwards: {t} < {self.now}")
        self.now = t

    def writers(self, device: str) -> int:
        return self.in_flight_writers.get(device, 0)

    def add_writer(self, device: str) -> None:
        self.in_flight_writers[device] = self.writers(device) + 1

    def release_writer(self, device: str) -> None:
        n = self.writers(device) - 1
        if n < 0:
            raise ValueError(f"writer count underflow on {device}")
        self.in_flight_writers[device] = n


def _interpolate(points: tuple[tuple[int, float], ...], active_writers: int) -> float:
    """Piecewise-linear bandwidth lookup, exact at calibration points.

    Clamps flat below the first and above the last point.
    """
    if active_writers <= points[0][0]:
        return points[0][1]
    for i in range(1, len(points)):
        w1, bw1 = points[i]
        if active_writers == w1:
            return bw1
        if active_writers < w1:
            w0, bw0 = points[i - 1]
            frac = (active_writers - w0) / (w1 - w0)
            return bw0 + (bw1 - bw0) * frac
    return points[-1][1]


def read_bandwidth(profile: DeviceProfile, active_writers: int) -> float:
    """Effective read bandwidth in GB/s with the given concurrent writer count."""
    if active_writers < 0:
        raise ValueError("active_writers must be >= 0")
    return _interpolate(profile.read_points, active_writers)


def write_bandwidth(profile: DeviceProfile, active_writers: int) -> float:
    """Effective write bandwidth in GB/s with the given concurrent writer count."""
    if active_writers < 0:
        raise ValueError("active_writers must be >= 0")
    return _interpolate(profile.write_points, active_writers)


def access_cost(profile: DeviceProfile, kind: str, nbytes: int, active_writers: int) -> float:
    """Service time, in virtual seconds, of one read or write of ``nbytes``.

    The cost is fixed at dispatch with the writer count at that instant.
    """
    if nbytes <= 0:
        raise ValueError("nbytes must be positive")
    if kind == "read":
        bw = read_bandwidth(profile, active_writers)
    elif kind == "write":
        bw = write_bandwidth(profile, active_writers)
    else:
        raise ValueError(f"unknown access kind {kind!r}")
    return nbytes / (bw * GB)


def default_profiles(dram_read_gbps: float = DEFAULT_DRAM_READ_GBPS) -> dict[str, DeviceProfile]:
    """The built-in calibration set.

    NVRAM reads: 12 GB/s alone, 3.4 GB/s with one concurrent writer, 0.8 GB/s
    with eight.  DRAM reads lose 18% with one writer and 35% with eight,
    relative to the configurable baseline.  SSD: 2.5 GB/s reads, 2.2 GB/s
    writes, no interference modeled.  NVRAM writes scale mildly negatively
    (x0.8 at eight writers); block removals cost 256 bytes of allocator
    metadata written to NVRAM.
    """
    return {
        "nvram": DeviceProfile(
            name="nvram",
            read_points=((0, 12.0), (1, 3.4), (8, 0.8)),
            write_bandwidth=2.0,
            write_points=((0, 2.0), (8, 0.8 * 2.0)),
            per_removal_write_bytes=256,
        ),
        "dram": DeviceProfile(
            name="dram",
            read_points=(
                (0, dram_read_gbps),
                (1, 0.82 * dram_read_gbps),
                (8, 0.65 * dram_read_gbps),
            ),
            write_bandwidth=dram_read_gbps,
        ),
        "ssd": DeviceProfile(
            name="ssd",
            read_points=((0, 2.5),),
            write_bandwidth=2.2,
        ),
    }


def load_profiles(path: str) -> dict[str, DeviceProfile]:
    """Load device profiles from a YAML file, overriding the defaults.

    The document maps device names to fields of :class:`DeviceProfile`;
    omitted devices keep their default profile.  Example::

        nvram:
          read_points: [[0, 10.0], [1, 2.5], [8, 0.5]]
          write_bandwidth: 1.5
          per_removal_write_bytes: 128
    """
    with open(path) as fh:
        doc = yaml.safe_load(fh) or {}
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: device profile document must be a mapping")
    profiles = default_profiles()
    for name, spec in doc.items():
        if name not in profiles:
            raise ValueError(f"{path}: unknown device {name!r} (expected nvram/dram/ssd)")
        if not isinstance(spec, dict):
            raise ValueError(f"{path}: profile for {name!r} must be a mapping")
        base = profiles[name]
        read_points = tuple(
            (int(w), float(bw)) for w, bw in spec.get("read_points", base.read_points)
        )
        wb = float(spec.get("write_bandwidth", base.write_bandwidth))
        if "write_points" in spec:
            write_points = tuple((int(w), float(bw)) for w, bw in spec["write_points"])
        elif "write_bandwidth" in spec:
            write_points = ()  # rebuilt flat from the new write_bandwidth
        else:
            write_points = base.write_points
        profiles[name] = DeviceProfile(
            name=name,
            read_points=read_points,
            write_bandwidth=wb,
            write_points=write_points,
            per_removal_write_bytes=parse_bytes(
                spec.get("per_removal_write_bytes", base.per_removal_write_bytes)
            ),
        )
    return profiles
