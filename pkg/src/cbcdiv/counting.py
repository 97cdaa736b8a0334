"""Segmented counting of n with n^l | C(2n,n) or gcd(n, C(2n,n)) = 1.

The range [lo, hi] is cut into segments.  Within a segment the work is
organised per prime, not per n: for each base prime p the multiples of p
form a strided slice of the segment buffer, and digit sums, carry counts
and exponents are computed for the whole slice with numpy.  Each n ends up
with

  * minscore[n] = min over p^a || n of carries(n,p) // a
                  (n^l | C(2n,n)  iff  minscore >= l), and
  * carried[n]  = whether any prime of n carries at all
                  (gcd(n, C(2n,n)) = 1  iff  not carried).

Any cofactor left after striking all p <= sqrt(hi) is a prime exceeding
sqrt(hi); it divides n exactly once and its carry count is read off the
two-digit base-q representation.  This is also where the large-prime
filter lives: q^2 > 2n forces a carry-free q, so minscore drops to 0
without any digit loop.

Results are exact, independent of segmentation, and mergeable.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field
from math import isqrt
from typing import Iterator, Optional, Sequence

import numpy as np

from .kummer import MAX_N, Factorization, PrimePower

DEFAULT_SEGMENT = 1 << 20

_CHECKPOINT_MAGIC = b"CBCT"
_CHECKPOINT_VERSION = 1


def sieve_primes(limit: int) -> np.ndarray:
    """All primes <= limit, via an odd-only sieve."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    if limit == 2:
        return np.array([2], dtype=np.int64)
    # index i represents the odd number 2i+1
    half = (limit + 1) // 2
    mask = np.ones(half, dtype=bool)
    mask[0] = False  # 1 is not prime
    for i in range(1, (isqrt(limit) + 1) // 2 + 1):
        if mask[i]:
            p = 2 * i + 1
            mask[(p * p) // 2 :: p] = False
    odds = 2 * np.flatnonzero(mask).astype(np.int64) + 1
    return np.concatenate(([np.int64(2)], odds))


@dataclass(frozen=True)
class SegmentSpec:
    lo: int
    hi: int
    base_primes: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.lo <= self.hi:
            raise ValueError(f"bad segment range [{self.lo}, {self.hi}]")
        if self.hi >= MAX_N:
            raise OverflowError(f"hi out of supported range: {self.hi}")


@dataclass
class CountTable:
    range_lo: int
    range_hi: int
    ell_max: int
    counts_by_ell: list[int] = field(default_factory=list)
    coprime_count: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.counts_by_ell:
            self.counts_by_ell = [0] * self.ell_max
        if len(self.counts_by_ell) != self.ell_max:
            raise ValueError("counts_by_ell length must equal ell_max")

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("range_lo,range_hi,ell,count\n")
        if self.coprime_count is not None:
            out.write(f"{self.range_lo},{self.range_hi},0,{self.coprime_count}\n")
        for ell, cnt in enumerate(self.counts_by_ell, start=1):
            out.write(f"{self.range_lo},{self.range_hi},{ell},{cnt}\n")
        return out.getvalue()


def merge(a: CountTable, b: CountTable) -> CountTable:
    """Counter-wise sum of tables over disjoint adjacent ranges."""
    if a.ell_max != b.ell_max:
        raise ValueError("ell_max mismatch")
    if a.range_lo > b.range_lo:
        a, b = b, a
    if a.range_hi + 1 != b.range_lo:
        raise ValueError(
            f"ranges [{a.range_lo},{a.range_hi}] and [{b.range_lo},{b.range_hi}]"
            " are not disjoint and adjacent"
        )
    coprime = None
    if a.coprime_count is not None and b.coprime_count is not None:
        coprime = a.coprime_count + b.coprime_count
    return CountTable(
        range_lo=a.range_lo,
        range_hi=b.range_hi,
        ell_max=a.ell_max,
        counts_by_ell=[x + y for x, y in zip(a.counts_by_ell, b.counts_by_ell)],
        coprime_count=coprime,
    )


def checkpoint_write(table: CountTable, path: str) -> None:
    """Fixed-width little-endian binary snapshot of a CountTable.

    Layout: magic "CBCT", u32 version, u64 lo, u64 hi, u32 ell_max,
    u8 has_coprime, ell_max * u64 counters, u64 coprime_count (0 if absent).
    """
    with open(path, "wb") as fh:
        fh.write(_CHECKPOINT_MAGIC)
        fh.write(
            struct.pack(
                "<IQQIB",
                _CHECKPOINT_VERSION,
                table.range_lo,
                table.range_hi,
                table.ell_max,
                1 if table.coprime_count is not None else 0,
            )
        )
        fh.write(struct.pack(f"<{table.ell_max}Q", *table.counts_by_ell))
        fh.write(struct.pack("<Q", table.coprime_count or 0))


def checkpoint_read(path: str) -> CountTable:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != _CHECKPOINT_MAGIC:
        raise ValueError("not a checkpoint file")
    version, lo, hi, ell_max, has_cop = struct.unpack_from("<IQQIB", data, 4)
    if version != _CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    need = 4 + struct.calcsize("<IQQIB") + 8 * ell_max + 8
    if len(data) != need:
        raise ValueError("checkpoint truncated or corrupt")
    off = 4 + struct.calcsize("<IQQIB")
    counters = list(struct.unpack_from(f"<{ell_max}Q", data, off))
    (coprime,) = struct.unpack_from("<Q", data, off + 8 * ell_max)
    return CountTable(
        range_lo=lo,
        range_hi=hi,
        ell_max=ell_max,
        counts_by_ell=counters,
        coprime_count=coprime if has_cop else None,
    )


def factorize_segment(seg: SegmentSpec) -> Iterator[Factorization]:
    """Complete factorizations of every n in [lo, hi], in order.

    Reference implementation of the sieve's factor extraction; the counting
    fast path below never materializes factor lists.
    """
    size = seg.hi - seg.lo + 1
    cof = np.arange(seg.lo, seg.hi + 1, dtype=np.int64)
    factors: list[list[PrimePower]] = [[] for _ in range(size)]
    for p in seg.base_primes:
        p = int(p)
        if p * p > seg.hi:
            break
        start = (-seg.lo) % p
        for i in range(start, size, p):
            a = 0
            while cof[i] % p == 0:
                cof[i] //= p
                a += 1
            if a:
                factors[i].append(PrimePower(p, a))
    for i in range(size):
        q = int(cof[i])
        if q > 1:
            # residual cofactor must be a prime > sqrt(hi); a composite one
            # means base_primes was incomplete
            if q <= isqrt(seg.hi) or any(
                q % int(p) == 0 for p in seg.base_primes if int(p) * int(p) <= q
            ):
                raise RuntimeError(f"incomplete base primes: residual {q}")
            factors[i].append(PrimePower(q, 1))
        yield Factorization(seg.lo + i, tuple(factors[i]))


def _digit_sums_doubled(m: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Base-p digit sums of m and of 2m, vectorized."""
    s1 = np.zeros_like(m)
    s2 = np.zeros_like(m)
    r = m.copy()
    while True:
        np.add(s1, r % p, out=s1)
        r //= p
        if not r.any():
            break
    r = 2 * m
    while True:
        np.add(s2, r % p, out=s2)
        r //= p
        if not r.any():
            break
    return s1, s2


def _count_segment(
    lo: int, hi: int, ell_max: int, include_coprime: bool, base_primes: np.ndarray
) -> tuple[list[int], int]:
    """Exact counts over one segment; returns (per-ell counts, coprime count)."""
    size = hi - lo + 1
    n = np.arange(lo, hi + 1, dtype=np.int64)
    cof = n.copy()
    # min over primes of carries // exponent; int32 is plenty (carries < 64)
    big = np.int32(1 << 20)
    minscore = np.full(size, big, dtype=np.int32)
    carried = np.zeros(size, dtype=bool)

    for p in base_primes:
        p = int(p)
        if p * p > hi:
            break
        start = (-lo) % p
        sl = slice(start, size, p)
        sub_cof = cof[sl]
        if sub_cof.size == 0:
            continue
        # exponent of p in each multiple
        a = np.zeros(sub_cof.shape, dtype=np.int32)
        while True:
            q, r = np.divmod(sub_cof, p)
            mask = r == 0
            if not mask.any():
                break
            sub_cof[mask] = q[mask]
            a[mask] += 1
        cof[sl] = sub_cof
        s1, s2 = _digit_sums_doubled(n[sl], p)
        car = ((2 * s1 - s2) // (p - 1)).astype(np.int32)
        np.minimum(minscore[sl], car // a, out=minscore[sl])
        carried[sl] |= car > 0

    # residual large primes: q > sqrt(hi), exponent exactly 1, at most a
    # two-digit carry pattern; q^2 > 2n (the large-prime filter) comes out
    # as zero carries automatically
    rest = cof > 1
    if rest.any():
        q = cof[rest]
        m = n[rest]
        hi_d, lo_d = np.divmod(m, q)
        c0 = (2 * lo_d >= q).astype(np.int32)
        c1 = (2 * hi_d + c0 >= q).astype(np.int32)
        car = c0 + c1
        minscore[rest] = np.minimum(minscore[rest], car)
        carried[rest] |= car > 0

    counts = [int(np.count_nonzero(minscore >= ell)) for ell in range(1, ell_max + 1)]
    coprime = int(np.count_nonzero(~carried)) if include_coprime else 0
    return counts, coprime


def count_range(
    lo: int,
    hi: int,
    ell_max: int = 3,
    include_coprime: bool = True,
    segment_size: int = DEFAULT_SEGMENT,
    threads: int = 1,
) -> CountTable:
    """Exact CountTable over [lo, hi], both endpoints inclusive.

    Deterministic for any segment_size and thread count: segments are
    disjoint, and their tables are summed in segment order.
    """
    if not 1 <= lo <= hi:
        raise ValueError(f"bad range [{lo}, {hi}]")
    if hi >= MAX_N:
        raise OverflowError(f"hi out of supported range: {hi}")
    if not 1 <= ell_max <= 20:
        raise ValueError(f"ell_max must be in [1, 20], got {ell_max}")
    if segment_size < 1:
        raise ValueError("segment_size must be >= 1")

    base = sieve_primes(isqrt(hi))
    spans = []
    s = lo
    while s <= hi:
        e = min(s + segment_size - 1, hi)
        spans.append((s, e))
        s = e + 1

    if threads > 1 and len(spans) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(
                    lambda se: _count_segment(se[0], se[1], ell_max, include_coprime, base),
                    spans,
                )
            )
    else:
        results = [_count_segment(s, e, ell_max, include_coprime, base) for s, e in spans]

    counts = [0] * ell_max
    coprime = 0
    for seg_counts, seg_cop in results:
        for i in range(ell_max):
            counts[i] += seg_counts[i]
        coprime += seg_cop
    return CountTable(
        range_lo=lo,
        range_hi=hi,
        ell_max=ell_max,
        counts_by_ell=counts,
        coprime_count=coprime if include_coprime else None,
    )


def count_range_bruteforce(lo: int, hi: int, ell_max: int) -> CountTable:
    """Big-integer oracle that literally computes C(2n,n); tiny ranges only."""
    from math import comb, gcd

    counts = [0] * ell_max
    coprime = 0
    for n in range(lo, hi + 1):
        c = comb(2 * n, n)
        for ell in range(1, ell_max + 1):
            if c % n**ell == 0:
                counts[ell - 1] += 1
        if gcd(n, c) == 1:
            coprime += 1
    return CountTable(lo, hi, ell_max, counts, coprime)
