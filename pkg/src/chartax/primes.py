"""Prime tables: segmented smallest-prime-factor sieve and prime reciprocal sums."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

DEFAULT_LIMIT_CAP = 10**8
DEFAULT_SEGMENT = 1 << 18
_SPF_MAX = 2**32 - 1


class SieveBudgetError(MemoryError):
    """Requested sieve limit exceeds the configured memory budget."""


def _simple_sieve(n: int) -> np.ndarray:
    """Primes up to ``n`` by a plain Eratosthenes sieve."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return np.flatnonzero(flags).astype(np.int64)


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Primes and smallest prime factors up to ``limit``.

    ``spf[n]`` is the least prime dividing ``n`` for ``2 <= n <= limit``;
    entries 0 and 1 are 0. Immutable after construction.
    """

    limit: int
    primes: np.ndarray
    spf: np.ndarray
    built: bool = field(default=True)

    def __post_init__(self):
        self.primes.flags.writeable = False
        self.spf.flags.writeable = False

    @cached_property
    def logs(self) -> np.ndarray:
        out = np.log(self.primes.astype(np.float64))
        out.flags.writeable = False
        return out

    @cached_property
    def reciprocals(self) -> np.ndarray:
        out = 1.0 / self.primes.astype(np.float64)
        out.flags.writeable = False
        return out

    def prime_slice(self, lo: float, hi: float) -> slice:
        """Index range of primes ``p`` with ``lo < p <= hi``."""
        i = int(np.searchsorted(self.primes, lo, side="right"))
        j = int(np.searchsorted(self.primes, hi, side="right"))
        return slice(i, max(i, j))

    def primes_in(self, lo: float, hi: float) -> np.ndarray:
        return self.primes[self.prime_slice(lo, hi)]

    def index_of(self, p: int) -> int:
        """Position of the prime ``p`` in ``primes``; ValueError if absent."""
        i = int(np.searchsorted(self.primes, p))
        if i >= len(self.primes) or self.primes[i] != p:
            raise ValueError(f"{p} is not a prime in the table")
        return i

    def is_prime(self, n: int) -> bool:
        return 2 <= n <= self.limit and int(self.spf[n]) == n


def build_prime_table(
    limit: int,
    segment: int = DEFAULT_SEGMENT,
    cap: int = DEFAULT_LIMIT_CAP,
) -> PrimeTable:
    """Sieve primes and smallest prime factors up to ``limit``.

    The sieve runs segment by segment over ``[lo, lo + segment)`` blocks;
    within a block each base prime only claims entries that are still
    unset, so the first (smallest) prime to reach ``n`` wins.
    """
    limit = int(limit)
    if limit < 2:
        raise ValueError(f"limit must be >= 2, got {limit}")
    if limit > cap or limit > _SPF_MAX:
        raise SieveBudgetError(f"limit {limit} exceeds sieve budget {min(cap, _SPF_MAX)}")
    if segment < 2:
        raise ValueError("segment size must be >= 2")

    base = _simple_sieve(math.isqrt(limit))
    spf = np.zeros(limit + 1, dtype=np.uint32)
    for lo in range(0, limit + 1, segment):
        hi = min(lo + segment, limit + 1)
        block = spf[lo:hi]
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            sub = block[start - lo :: p]
            sub[sub == 0] = p
            block[start - lo :: p] = sub
    idx = np.arange(limit + 1, dtype=np.uint32)
    unset = spf == 0
    unset[:2] = False
    spf[unset] = idx[unset]
    primes = np.flatnonzero(unset).astype(np.int64)
    return PrimeTable(limit=limit, primes=primes, spf=spf)


def reciprocal_sum(table: PrimeTable, D: int, x: int) -> float:
    """Sum of ``1/p`` over primes ``D < p <= x`` (pairwise summation)."""
    if not (2 <= D <= x <= table.limit):
        raise ValueError(f"need 2 <= D <= x <= {table.limit}, got D={D}, x={x}")
    return float(np.sum(table.reciprocals[table.prime_slice(D, x)]))


def factorize(table: PrimeTable, n: int) -> list[tuple[int, int]]:
    """Factor ``n`` by repeated division by its smallest prime factor."""
    n = int(n)
    if not (1 <= n <= table.limit):
        raise ValueError(f"n must lie in [1, {table.limit}], got {n}")
    out: list[tuple[int, int]] = []
    spf = table.spf
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def prime_power_split(table: PrimeTable, x: int):
    """For every ``2 <= n <= x`` split off the power of its smallest prime.

    Returns arrays ``(p, e, rest)`` of length ``x + 1`` with
    ``n = p**e * rest`` and ``p`` not dividing ``rest``. Entries 0 and 1
    carry ``p = 0, e = 0, rest = 1``.
    """
    if not (1 <= x <= table.limit):
        raise ValueError(f"x must lie in [1, {table.limit}]")
    n = np.arange(x + 1, dtype=np.int64)
    p = table.spf[: x + 1].astype(np.int64)
    e = np.zeros(x + 1, dtype=np.int64)
    rest = np.ones(x + 1, dtype=np.int64)
    live = n >= 2
    e[live] = 1
    rest[live] = n[live] // p[live]
    active = np.flatnonzero(live)
    while active.size:
        r = rest[active]
        pa = p[active]
        hit = (r > 1) & (r % pa == 0)
        active = active[hit]
        rest[active] //= p[active]
        e[active] += 1
    return p, e, rest


def largest_prime_factor(table: PrimeTable, x: int) -> np.ndarray:
    """Largest prime factor of each ``n <= x`` (0 for ``n < 2``)."""
    if not (1 <= x <= table.limit):
        raise ValueError(f"x must lie in [1, {table.limit}]")
    spf = table.spf
    cur = np.arange(x + 1, dtype=np.int64)
    lpf = np.zeros(x + 1, dtype=np.int64)
    active = np.flatnonzero(cur >= 2)
    while active.size:
        q = spf[cur[active]].astype(np.int64)
        lpf[active] = np.maximum(lpf[active], q)
        cur[active] //= q
        active = active[cur[active] >= 2]
    return lpf


def mertens_deviation(table: PrimeTable, x: int) -> float:
    """``sum_{2 < p <= x} 1/p - log log x``; should sit near ``M - 1/2``."""
    return reciprocal_sum(table, 2, x) - math.log(math.log(x))
