import os

import numpy as np
import pytest

from cbcdiv.counting import (
    CountTable,
    SegmentSpec,
    checkpoint_read,
    checkpoint_write,
    count_range,
    count_range_bruteforce,
    factorize_segment,
    merge,
    sieve_primes,
)


def test_sieve_primes_small():
    assert list(sieve_primes(30)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_factorize_segment_roundtrip():
    primes = sieve_primes(200)
    seg = SegmentSpec(lo=30000, hi=30200, base_primes=primes)
    for f in factorize_segment(seg):
        n = 1
        for pp in f.factors:
            n *= pp.p**pp.a
        assert n == f.n


def test_counts_match_bruteforce_small():
    fast = count_range(1, 3000, ell_max=3, include_coprime=True)
    slow = count_range_bruteforce(1, 3000, ell_max=3)
    assert fast.counts_by_ell == slow.counts_by_ell
    assert fast.coprime_count == slow.coprime_count


def test_counts_match_bruteforce_offset_range():
    fast = count_range(100000, 100300, ell_max=2, include_coprime=True)
    slow = count_range_bruteforce(100000, 100300, ell_max=2)
    assert fast.counts_by_ell == slow.counts_by_ell
    assert fast.coprime_count == slow.coprime_count


def test_segment_size_and_threads_do_not_change_results():
    ref = count_range(1, 60000, ell_max=3, include_coprime=True)
    for segment_size in (4096, 1 << 14):
        for threads in (1, 4):
            got = count_range(
                1, 60000, ell_max=3, include_coprime=True,
                segment_size=segment_size, threads=threads,
            )
            assert got.counts_by_ell == ref.counts_by_ell
            assert got.coprime_count == ref.coprime_count


def test_merge_adjacent():
    a = count_range(1, 9999, ell_max=2, include_coprime=True)
    b = count_range(10000, 30000, ell_max=2, include_coprime=True)
    whole = count_range(1, 30000, ell_max=2, include_coprime=True)
    m = merge(a, b)
    assert m.counts_by_ell == whole.counts_by_ell
    assert m.coprime_count == whole.coprime_count
    assert (m.range_lo, m.range_hi) == (1, 30000)


def test_merge_rejects_gap():
    a = count_range(1, 100, ell_max=1)
    b = count_range(200, 300, ell_max=1)
    with pytest.raises(ValueError):
        merge(a, b)


def test_checkpoint_roundtrip(tmp_path):
    table = count_range(1, 20000, ell_max=3, include_coprime=True)
    path = str(tmp_path / "cp.bin")
    checkpoint_write(table, path)
    back = checkpoint_read(path)
    assert back == table


def test_checkpoint_rejects_corruption(tmp_path):
    table = count_range(1, 5000, ell_max=1, include_coprime=True)
    path = str(tmp_path / "cp.bin")
    checkpoint_write(table, path)
    raw = bytearray(open(path, "rb").read())

    bad_magic = str(tmp_path / "magic.bin")
    with open(bad_magic, "wb") as fh:
        fh.write(b"XXXX" + raw[4:])
    with pytest.raises(ValueError):
        checkpoint_read(bad_magic)

    truncated = str(tmp_path / "trunc.bin")
    with open(truncated, "wb") as fh:
        fh.write(raw[:-5])
    with pytest.raises(ValueError):
        checkpoint_read(truncated)

    bad_version = str(tmp_path / "ver.bin")
    mangled = bytearray(raw)
    mangled[4] = 99
    with open(bad_version, "wb") as fh:
        fh.write(mangled)
    with pytest.raises(ValueError):
        checkpoint_read(bad_version)


def test_csv_layout():
    table = CountTable(
        range_lo=1, range_hi=10, ell_max=2, counts_by_ell=[4, 1], coprime_count=3
    )
    lines = table.to_csv().strip().split("\n")
    assert lines[0] == "range_lo,range_hi,ell,count"
    assert "1,10,0,3" in lines  # ell = 0 row is the coprime count
    assert "1,10,1,4" in lines
    assert "1,10,2,1" in lines


def test_divisible_density_below_coprime_bound():
    # densities for ell=1 hover near 0.114, far below 1
    t = count_range(1, 200000, ell_max=1, include_coprime=True)
    assert 0.10 < t.counts_by_ell[0] / 200000 < 0.13
    assert 0.12 < t.coprime_count / 200000 < 0.15


def test_range_validation():
    with pytest.raises(ValueError):
        count_range(10, 5)
    with pytest.raises((ValueError, OverflowError)):
        count_range(1, 1 << 63)
