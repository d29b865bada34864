"""Multiplicative functions with values in the closed unit disc.

A function is described by its values ``g(p)`` on the primes of a
:class:`PrimeTable`, a prime support mask, and a prime-power rule:

* ``"completely"`` -- ``g(p^k) = g(p)^k``
* ``"squarefree"`` -- ``g(p^k) = 0`` for ``k >= 2`` (Moebius style)

Bulk evaluation walks the smallest-prime-factor table level by level
(``n = p^e * rest``) rather than factoring each ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .characters import DirichletCharacter, build_group
from .primes import PrimeTable, factorize, prime_power_split

MODES = ("completely", "squarefree")
BUILTINS = ("moebius", "liouville", "unit", "character", "random")
RNG_NAME = "numpy.random.Philox"


@dataclass(frozen=True, eq=False)
class SupportSet:
    """Primes of ``table`` in the support, as a boolean mask over prime indices.

    With ``window=(D, x)`` every member lies in ``(D, x]``.
    """

    table: PrimeTable
    mask: np.ndarray
    window: tuple[int, int] | None = None

    def __post_init__(self):
        self.mask.flags.writeable = False
        if self.window is not None:
            lo, hi = self.window
            p = self.table.primes
            if np.any(self.mask & ((p <= lo) | (p > hi))):
                raise ValueError(f"support set leaves the window ({lo}, {hi}]")

    def __contains__(self, p: int) -> bool:
        i = int(np.searchsorted(self.table.primes, p))
        return i < len(self.mask) and self.table.primes[i] == p and bool(self.mask[i])

    def __len__(self) -> int:
        return int(self.mask.sum())

    @property
    def primes(self) -> np.ndarray:
        return self.table.primes[self.mask]

    def restrict(self, D: int, x: int) -> "SupportSet":
        p = self.table.primes
        return SupportSet(self.table, self.mask & (p > D) & (p <= x), (D, x))

    def mass(self) -> float:
        """``sum_{p in S} 1/p``."""
        return float(np.sum(self.table.reciprocals[self.mask]))

    @classmethod
    def from_primes(cls, table: PrimeTable, primes, window=None) -> "SupportSet":
        mask = np.zeros(len(table.primes), dtype=bool)
        idx = np.searchsorted(table.primes, np.asarray(primes, dtype=np.int64))
        mask[idx] = True
        return cls(table, mask, window)

    @classmethod
    def interval(cls, table: PrimeTable, D: int, x: int) -> "SupportSet":
        p = table.primes
        return cls(table, (p > D) & (p <= x), (D, x))


@dataclass(eq=False)
class MultiplicativeFunction:
    table: PrimeTable
    prime_values: np.ndarray  # complex, one per prime of the table; zero off support
    support: SupportSet
    mode: str = "completely"
    name: str = "custom"
    spec: dict[str, Any] = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        vals = np.asarray(self.prime_values, dtype=np.complex128).copy()
        if vals.shape != self.table.primes.shape:
            raise ValueError("prime_values must have one entry per table prime")
        vals[~self.support.mask] = 0
        if np.any(np.abs(vals) > 1 + 1e-12):
            raise ValueError("values must lie in the closed unit disc")
        vals.flags.writeable = False
        self.prime_values = vals

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.prime_values.imag == 0))

    def at_prime(self, p: int) -> complex:
        return complex(self.prime_values[self.table.index_of(p)])

    def prime_power(self, p: int, k: int) -> complex:
        gp = self.at_prime(p)
        if k == 0:
            return 1 + 0j
        if self.mode == "completely":
            return gp**k
        return gp if k == 1 else 0j

    def evaluate(self, n: int) -> complex:
        out = 1 + 0j
        for p, k in factorize(self.table, n):
            out *= self.prime_power(p, k)
        return out

    __call__ = evaluate

    def values(self, x: int) -> np.ndarray:
        """Read-only array ``g(0), g(1), ..., g(x)`` with ``g(0) = 0``."""
        x = int(x)
        if not (1 <= x <= self.table.limit):
            raise ValueError(f"x must lie in [1, {self.table.limit}]")
        cached = self._cache.get("values")
        if cached is not None and len(cached) > x:
            return cached[: x + 1]
        p, e, rest = prime_power_split(self.table, x)
        by_prime = np.zeros(x + 1, dtype=np.complex128)
        sl = self.table.prime_slice(0, x)
        by_prime[self.table.primes[sl]] = self.prime_values[sl]
        g = np.ones(x + 1, dtype=np.complex128)
        g[0] = 0
        cur = np.arange(x + 1, dtype=np.int64)
        active = np.flatnonzero(cur >= 2)
        # peel one prime-power block per pass; at most omega(n) passes
        while active.size:
            c = cur[active]
            gp = by_prime[p[c]]
            ee = e[c]
            if self.mode == "completely":
                f = gp**ee
            else:
                f = np.where(ee == 1, gp, 0)
            g[active] *= f
            cur[active] = rest[c]
            active = active[cur[active] >= 2]
        g.flags.writeable = False
        self._cache["values"] = g
        return g

    def support_in(self, D: int, x: int) -> SupportSet:
        p = self.table.primes
        nz = self.prime_values != 0
        return SupportSet(self.table, nz & (p > D) & (p <= x), (D, x))

    def to_json(self) -> dict:
        return {"name": self.name, "mode": self.mode, **self.spec}


def make_builtin(
    name: str,
    table: PrimeTable,
    window: tuple[int, int] | None = None,
    chi: DirichletCharacter | None = None,
    seed: int = 0,
    density: float = 1.0,
    conjugate: bool = False,
) -> MultiplicativeFunction:
    """Construct one of the named functions.

    ``window=(D, x)`` zeroes ``g(p)`` for primes outside ``(D, x]``.
    ``character`` takes ``chi`` (or its conjugate with ``conjugate=True``).
    ``random`` draws ``g(p) = exp(2 pi i U)`` and keeps ``p`` in the support
    with probability ``density``; the draw for the ``j``-th prime does not
    depend on the table size, so the same seed gives the same function on
    every range.
    """
    p = table.primes
    n = len(p)
    mode = "completely"
    spec: dict[str, Any] = {"window": list(window) if window else None}
    if name == "moebius":
        vals, mode = -np.ones(n, dtype=np.complex128), "squarefree"
    elif name == "liouville":
        vals = -np.ones(n, dtype=np.complex128)
    elif name == "unit":
        vals = np.ones(n, dtype=np.complex128)
    elif name == "character":
        if chi is None:
            raise ValueError("character function needs chi")
        c = chi.conjugate() if conjugate else chi
        vals = c.at(p).astype(np.complex128)
        spec.update(character=chi.to_json(), conjugate=conjugate)
    elif name == "random":
        if not 0 <= density <= 1:
            raise ValueError("density must lie in [0, 1]")
        rng = np.random.Generator(np.random.Philox(seed))
        draws = rng.random((n, 2))
        vals = np.exp(2j * np.pi * draws[:, 0])
        vals[draws[:, 1] >= density] = 0
        spec.update(seed=seed, density=density, rng=RNG_NAME)
    else:
        raise ValueError(f"unknown function {name!r}; expected one of {BUILTINS}")
    mask = vals != 0
    if window is not None:
        lo, hi = window
        mask &= (p > lo) & (p <= hi)
    support = SupportSet(table, mask, tuple(window) if window else None)
    return MultiplicativeFunction(table, vals, support, mode, name, spec)


def function_from_json(obj: dict, table: PrimeTable) -> MultiplicativeFunction:
    chi = None
    if obj.get("character"):
        c = obj["character"]
        chi = build_group(c["modulus"]).character(c["exponents"])
    window = tuple(obj["window"]) if obj.get("window") else None
    return make_builtin(
        obj["name"], table, window, chi=chi,
        seed=obj.get("seed", 0), density=obj.get("density", 1.0),
        conjugate=obj.get("conjugate", False),
    )


def _check_x(g: MultiplicativeFunction, x: int):
    if not (0 <= x <= g.table.limit):
        raise ValueError(f"x must lie in [0, {g.table.limit}]")


def progression_sum(g: MultiplicativeFunction, x: int, D: int, a: int) -> complex:
    """``sum_{n <= x, n == a (mod D)} g(n)``."""
    _check_x(g, x)
    if D < 1 or not 0 <= a < D:
        raise ValueError("need D >= 1 and 0 <= a < D")
    if x < 1:
        return 0j
    vals = g.values(x)
    start = a if a >= 1 else D
    return complex(np.sum(vals[start::D]))


def coprime_sum(g: MultiplicativeFunction, x: int, D: int) -> complex:
    """``sum_{n <= x, (n, D) = 1} g(n)``."""
    _check_x(g, x)
    if x < 1:
        return 0j
    vals = g.values(x)
    n = np.arange(x + 1)
    return complex(np.sum(vals[np.gcd(n, D) == 1]))


def twisted_sum(g: MultiplicativeFunction, chi: DirichletCharacter, t: float, x: int) -> complex:
    """``sum_{n <= x} g(n) chi(n) n^{-it}``."""
    _check_x(g, x)
    if x < 1:
        return 0j
    vals = g.values(x)
    n = np.arange(x + 1)
    terms = vals * chi.at(n)
    if t:
        logs = np.log(np.maximum(n, 1).astype(np.float64))
        terms = terms * np.exp(-1j * t * logs)
    return complex(np.sum(terms))


def density_check(g: MultiplicativeFunction, lo: int, hi: int) -> float:
    """Fraction of primes in ``(lo, hi]`` lying in the support."""
    sl = g.table.prime_slice(lo, hi)
    m = g.support.mask[sl]
    return float(m.mean()) if m.size else math.nan
