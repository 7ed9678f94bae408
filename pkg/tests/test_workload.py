"""Workload generation: mixes, key distributions, presets, traces."""

import math

import numpy as np
import pytest

from nvcachesim.workload import (
    KeySampler,
    OpKind,
    OpStream,
    TraceParseError,
    WorkloadSpec,
    load_workload,
    next_op,
    preset_by_name,
    presets,
    replay_trace,
    thread_rng,
    zipf_pmf,
)


def spec_with(mix, record_count=1000, **kw):
    defaults = dict(name="t", thread_count=1, duration=1.0)
    defaults.update(kw)
    return WorkloadSpec(op_mix=mix, record_count=record_count, **defaults)


class TestOpMix:
    def test_pure_read_mix_only_reads(self):
        spec = spec_with({"read": 1.0})
        rng = thread_rng(0, 0)
        for _ in range(500):
            kind, _ = next_op(spec, rng)
            assert kind is OpKind.READ

    def test_fifty_fifty_converges(self):
        spec = preset_by_name("ycsb-a")
        rng = thread_rng(1, 0)
        sampler = KeySampler(spec)
        n = 100_000
        reads = sum(
            1 for _ in range(n) if next_op(spec, rng, sampler=sampler)[0] is OpKind.READ
        )
        assert abs(reads / n - 0.5) < 0.005

    def test_chi_square_sanity_on_four_way_mix(self):
        spec = spec_with({"read": 0.55, "update": 0.25, "insert": 0.15, "scan": 0.05})
        rng = thread_rng(2, 0)
        sampler = KeySampler(spec)
        n = 100_000
        counts = {k: 0 for k in OpKind}
        for _ in range(n):
            kind, _ = next_op(spec, rng, sampler=sampler)
            counts[kind] += 1
        chi2 = sum(
            (counts[k] - spec.op_mix[k.value] * n) ** 2 / (spec.op_mix[k.value] * n)
            for k in OpKind
        )
        assert chi2 < 16.27  # critical value, df=3, p=0.001


class TestZipfian:
    def test_top_rank_frequency_matches_bruteforce_pmf(self):
        # independent oracle: direct summation of the normalized Zipf law
        n, theta = 1000, 0.99
        norm = sum(1.0 / (i**theta) for i in range(1, n + 1))
        p_top = (1.0 / 1**theta) / norm

        spec = spec_with({"read": 1.0}, record_count=n, key_distribution="zipfian", zipf_theta=theta)
        rng = thread_rng(3, 0)
        sampler = KeySampler(spec)
        draws = 100_000
        top = sum(1 for _ in range(draws) if next_op(spec, rng, sampler=sampler)[1] == 0)
        assert abs(top / draws - p_top) / p_top < 0.05

    def test_first_few_ranks_match_pmf(self):
        n, theta = 50, 0.8
        norm = sum(1.0 / (i**theta) for i in range(1, n + 1))
        pmf = zipf_pmf(n, theta)
        for rank in (1, 2, 10, 50):
            assert pmf[rank - 1] == pytest.approx((1.0 / rank**theta) / norm, rel=1e-12)
        assert pmf.sum() == pytest.approx(1.0)

    def test_zipfian_keys_skew_low(self):
        spec = spec_with({"read": 1.0}, record_count=100, key_distribution="zipfian")
        rng = thread_rng(4, 0)
        sampler = KeySampler(spec)
        keys = [next_op(spec, rng, sampler=sampler)[1] for _ in range(20_000)]
        counts = np.bincount(keys, minlength=100)
        assert counts[0] == counts.max()
        assert counts[:10].sum() > counts[50:60].sum()

    def test_latest_biases_to_newest(self):
        spec = spec_with({"read": 1.0}, record_count=100, key_distribution="latest")
        rng = thread_rng(5, 0)
        sampler = KeySampler(spec)
        keys = [next_op(spec, rng, sampler=sampler)[1] for _ in range(20_000)]
        counts = np.bincount(keys, minlength=100)
        assert counts[99] == counts.max()  # newest record is the most popular

    def test_latest_tracks_keyspace_growth(self):
        spec = spec_with({"read": 1.0}, record_count=10, key_distribution="latest")
        sampler = KeySampler(spec)
        assert sampler.key_for(0.0, 10) == 9
        assert sampler.key_for(0.0, 50) == 49

    def test_uniform_covers_range(self):
        spec = spec_with({"read": 1.0}, record_count=10)
        sampler = KeySampler(spec)
        assert sampler.key_for(0.0, 10) == 0
        assert sampler.key_for(0.999999, 10) == 9
        keys = {sampler.key_for(u, 10) for u in np.linspace(0, 0.9999, 200)}
        assert keys == set(range(10))


class TestDeterminism:
    def test_same_seed_same_sequence(self):
        spec = preset_by_name("ycsb-a")
        a = [next_op(spec, thread_rng(7, 0), sampler=KeySampler(spec)) for _ in range(1)]
        seq1 = _draw(spec, seed=7, thread=0, n=2000)
        seq2 = _draw(spec, seed=7, thread=0, n=2000)
        assert seq1 == seq2

    def test_threads_get_distinct_streams(self):
        spec = preset_by_name("ycsb-a")
        assert _draw(spec, 7, 0, 500) != _draw(spec, 7, 1, 500)

    def test_seeds_get_distinct_streams(self):
        spec = preset_by_name("ycsb-a")
        assert _draw(spec, 7, 0, 500) != _draw(spec, 8, 0, 500)

    def test_stream_equals_repeated_next_op(self):
        spec = spec_with(
            {"read": 0.6, "update": 0.3, "scan": 0.1},
            record_count=500,
            key_distribution="zipfian",
        )
        sampler = KeySampler(spec)
        rng = thread_rng(11, 4)
        direct = [next_op(spec, rng, sampler=sampler) for _ in range(9000)]
        stream = OpStream(spec, 11, 4)
        chunked = []
        for _ in range(9000):
            kind, u = stream.next()
            chunked.append((kind, sampler.key_for(u, spec.record_count)))
        assert direct == chunked


def _draw(spec, seed, thread, n):
    rng = thread_rng(seed, thread)
    sampler = KeySampler(spec)
    return [next_op(spec, rng, sampler=sampler) for _ in range(n)]


class TestPresets:
    def test_expected_names_present(self):
        names = {s.name for s in presets()}
        assert {
            "ycsb-a", "ycsb-b", "ycsb-c", "ycsb-d", "ycsb-e",
            "read-only-large", "update-only",
        } <= names

    def test_ycsb_c_is_pure_read(self):
        assert preset_by_name("ycsb-c").op_mix == {"read": 1.0}

    def test_update_only_mix_and_threads(self):
        spec = preset_by_name("update-only")
        assert spec.op_mix == {"update": 1.0}
        assert spec.thread_count == 6

    def test_thread_counts(self):
        by_name = {s.name: s for s in presets()}
        assert by_name["ycsb-a"].thread_count == 20
        assert by_name["ycsb-d"].thread_count == 100
        assert by_name["ycsb-e"].thread_count == 20
        assert by_name["read-only-large"].thread_count == 16

    def test_ycsb_d_mix(self):
        spec = preset_by_name("ycsb-d")
        assert spec.op_mix == {"read": 0.95, "insert": 0.05}

    def test_ycsb_e_is_scan_heavy(self):
        spec = preset_by_name("ycsb-e")
        assert spec.op_mix == {"scan": 0.95, "insert": 0.05}

    def test_scale_arithmetic_on_dataset(self):
        spec = preset_by_name("read-only-large", scale=1e-3)
        # 120 GB at 1/1000 scale, floored to whole 16 KB blocks
        assert spec.record_count == int(120e9 * 1e-3) // 16384
        assert abs(spec.dataset_bytes() - 120e6) <= spec.block_size

    def test_unknown_preset_raises(self):
        with pytest.raises(KeyError):
            preset_by_name("ycsb-z")

    def test_bad_scale_rejected(self):
        with pytest.raises(ValueError):
            presets(scale=0)


class TestSpecValidation:
    def test_mix_must_sum_to_one(self):
        with pytest.raises(ValueError):
            spec_with({"read": 0.6, "update": 0.6})

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            spec_with({"read": 0.5, "erase": 0.5})

    def test_bad_thread_count(self):
        with pytest.raises(ValueError):
            spec_with({"read": 1.0}, thread_count=0)

    def test_bad_distribution(self):
        with pytest.raises(ValueError):
            spec_with({"read": 1.0}, key_distribution="gaussian")

    def test_mix_tolerance(self):
        spec_with({"read": 0.5 + 1e-10, "update": 0.5})  # within tolerance


class TestWorkloadFile:
    def test_yaml_roundtrip(self, tmp_path):
        path = tmp_path / "wl.yaml"
        path.write_text(
            "name: custom\n"
            "op_mix: {read: 0.9, update: 0.1}\n"
            "thread_count: 4\n"
            "record_count: 2000\n"
            "duration: 0.01\n"
            "key_distribution: zipfian\n"
        )
        spec = load_workload(str(path))
        assert spec.name == "custom"
        assert spec.op_mix == {"read": 0.9, "update": 0.1}
        assert spec.thread_count == 4

    def test_unknown_field_reported(self, tmp_path):
        path = tmp_path / "wl.yaml"
        path.write_text("name: x\nop_mix: {read: 1.0}\nbogus: 1\n")
        with pytest.raises(ValueError, match="wl.yaml"):
            load_workload(str(path))

    def test_non_mapping_rejected(self, tmp_path):
        path = tmp_path / "wl.yaml"
        path.write_text("- a\n- b\n")
        with pytest.raises(ValueError):
            load_workload(str(path))


class TestTraceParsing:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "ops.trace"
        path.write_text(
            "0.001 0 read 42\n"
            "0.002 1 update 7\n"
            "0.003 0 scan 100\n"
            "0.004 1 insert 2001\n"
        )
        replay = replay_trace(str(path))
        assert replay.thread_count == 2
        assert replay.total_ops() == 4
        assert [op.kind for op in replay.ops_by_thread[0]] == [OpKind.READ, OpKind.SCAN]
        assert replay.ops_by_thread[1][0].key == 7

    def test_malformed_line_names_line_number(self, tmp_path):
        path = tmp_path / "ops.trace"
        path.write_text("0.001 0 read 42\n0.002 zero read\n")
        with pytest.raises(TraceParseError, match=r":2:"):
            replay_trace(str(path))

    def test_truncated_fields_rejected(self, tmp_path):
        path = tmp_path / "ops.trace"
        path.write_text("0.001 0 read\n")
        with pytest.raises(TraceParseError, match="4 fields"):
            replay_trace(str(path))

    def test_unknown_kind_rejected(self, tmp_path):
        path = tmp_path / "ops.trace"
        path.write_text("0.001 0 erase 5\n")
        with pytest.raises(TraceParseError):
            replay_trace(str(path))

    def test_empty_trace_rejected(self, tmp_path):
        path = tmp_path / "ops.trace"
        path.write_text("# only a comment\n")
        with pytest.raises(TraceParseError):
            replay_trace(str(path))

    def test_comments_and_blanks_skipped(self, tmp_path):
        path = tmp_path / "ops.trace"
        path.write_text("# header\n\n0.001 0 read 1\n")
        assert replay_trace(str(path)).total_ops() == 1
