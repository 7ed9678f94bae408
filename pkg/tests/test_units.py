"""Byte-quantity parsing."""

import pytest

from nvcachesim.units import format_bytes, parse_bytes


def test_suffixes():
    assert parse_bytes("16k") == 16_000
    assert parse_bytes("32M") == 32_000_000
    assert parse_bytes("180G") == 180_000_000_000
    assert parse_bytes("1.5G") == 1_500_000_000
    assert parse_bytes("2T") == 2_000_000_000_000


def test_gb_suffix_form():
    assert parse_bytes("32GB") == 32_000_000_000
    assert parse_bytes("16kb") == 16_000


def test_bare_numbers():
    assert parse_bytes("4096") == 4096
    assert parse_bytes(4096) == 4096
    assert parse_bytes(1e6) == 1_000_000


def test_rejects_garbage():
    for bad in ("", "12Q", "G", "-5M"):
        with pytest.raises(ValueError):
            parse_bytes(bad)


def test_format_roundtrips_readably():
    assert format_bytes(1_500_000) == "1.5MB"
    assert format_bytes(120e9) == "120.0GB"
    assert format_bytes(512) == "512B"
