"""Command-line front end: run simulations, list presets, compare results.

Desk-scale note: virtual time advances at device speed, so the time-shaped
knobs default here to millisecond-scale values (epoch 1 ms, eviction scan
2 ms, staleness 20 ms) rather than the full-scale one-second/one-minute
library defaults, keeping preset runs meaningful at 1/1000 data scale.
"""

from __future__ import annotations

import argparse
import os
import sys

from .admission import AdmissionConfig, AdmissionPolicy
from .cache import CacheConfig
from .devices import default_profiles, load_profiles
from .eviction import EvictionConfig, EvictionMode
from .harness import (
    DEFAULT_COST_RATIO,
    compare,
    comparison_table,
    emit,
    load_result_csv,
    result_to_summary,
    run,
)
from .units import format_bytes, parse_bytes
from .workload import load_workload, preset_by_name, presets, replay_trace, scale_spec

_POLICIES = {
    "always": AdmissionPolicy.ALWAYS_READ_WRITE,
    "nowrite": AdmissionPolicy.NO_WRITE_ALLOCATE,
    "obp": AdmissionPolicy.OBP,
    "disabled": AdmissionPolicy.DISABLED,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nvcachesim",
        description="Second-tier block cache simulator with rate-balancing admission.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one workload")
    p_run.add_argument("--workload", required=True, help="preset name or workload YAML file")
    p_run.add_argument("--policy", choices=sorted(_POLICIES), default="obp")
    p_run.add_argument("--obp-target", type=float, default=0.10)
    p_run.add_argument("--dram", default="32M", help="DRAM bytes (k/M/G suffixes ok)")
    p_run.add_argument("--nvram", default="180M", help="cache capacity bytes")
    p_run.add_argument("--eviction", choices=["none", "eager", "throttled"], default="throttled")
    p_run.add_argument("--seed", type=int, default=1)
    p_run.add_argument("--scale", type=float, default=1e-3, help="dataset scale for presets")
    p_run.add_argument("--duration", type=float, default=None, help="override measured virtual seconds")
    p_run.add_argument("--warmup", type=float, default=0.1, help="fraction of the run excluded from metrics")
    p_run.add_argument("--epoch", type=float, default=0.001, help="rate-window epoch, virtual seconds")
    p_run.add_argument("--scan-interval", type=float, default=0.002)
    p_run.add_argument("--staleness", type=float, default=0.02)
    p_run.add_argument("--target-free", type=float, default=0.05)
    p_run.add_argument("--buckets", type=int, default=0, help="bucket count (0 = density rule)")
    p_run.add_argument("--devices", default=None, help="device profile YAML overriding defaults")
    p_run.add_argument("--trace-out", default=None, help="record the measured op stream here")
    p_run.add_argument("--replay", default=None, help="replay a recorded trace instead of generating")
    p_run.add_argument("--out", default=None, help="write a CSV report here")
    p_run.add_argument("--format", choices=["csv", "summary"], default="csv", help="--out format")

    p_cmp = sub.add_parser("compare", help="compare result CSVs against a baseline")
    p_cmp.add_argument("--baseline", required=True, help="baseline result CSV")
    p_cmp.add_argument("results", nargs="+", help="result CSVs to compare")
    p_cmp.add_argument("--cost-ratio", type=float, default=DEFAULT_COST_RATIO)

    sub.add_parser("presets", help="list built-in workloads")
    return parser


def _cmd_run(args) -> int:
    if os.path.exists(args.workload):
        spec = load_workload(args.workload)
    else:
        try:
            spec = preset_by_name(args.workload, scale=args.scale)
        except KeyError:
            print(
                f"error: {args.workload!r} is neither a file nor a preset "
                f"(try `nvcachesim presets`)",
                file=sys.stderr,
            )
            return 2
    if args.duration is not None:
        spec = scale_spec(spec, duration=args.duration)

    try:
        cache_cfg = CacheConfig(
            capacity_bytes=parse_bytes(args.nvram),
            bucket_count=args.buckets,
            seed=args.seed,
            obp_epoch_seconds=args.epoch,
        )
        admission_cfg = AdmissionConfig(
            policy=_POLICIES[args.policy],
            obp_target=args.obp_target,
            dram_bytes=parse_bytes(args.dram),
        )
        eviction_cfg = EvictionConfig(
            scan_interval=args.scan_interval,
            staleness_window=args.staleness,
            target_free_fraction=args.target_free,
            mode=EvictionMode(args.eviction),
        )
        profiles = load_profiles(args.devices) if args.devices else default_profiles()
        replay = replay_trace(args.replay) if args.replay else None
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    result = run(
        spec,
        cache_cfg,
        admission_cfg,
        eviction_cfg,
        profiles,
        seed=args.seed,
        warmup_fraction=args.warmup,
        replay=replay,
        trace_path=args.trace_out,
    )
    sys.stdout.write(result_to_summary(result))
    if args.out:
        emit(result, args.format, args.out)
        print(f"wrote {args.format} report to {args.out}")
    return 0


def _cmd_compare(args) -> int:
    try:
        summaries = [load_result_csv(args.baseline)]
        summaries += [load_result_csv(p) for p in args.results]
        rows = compare(summaries, baseline_index=0, cost_ratio=args.cost_ratio)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(comparison_table(rows))
    return 0


def _cmd_presets() -> int:
    for spec in presets():
        mix = ", ".join(f"{int(round(f * 100))}% {k}" for k, f in spec.op_mix.items())
        print(
            f"{spec.name:18s} {mix:28s} threads={spec.thread_count:<4d} "
            f"dataset={format_bytes(spec.dataset_bytes()):>8s} "
            f"keys={spec.key_distribution} duration={spec.duration}s"
        )
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "compare":
        return _cmd_compare(args)
    return _cmd_presets()


if __name__ == "__main__":
    sys.exit(main())
