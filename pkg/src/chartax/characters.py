"""Dirichlet character groups built from the CRT decomposition of (Z/DZ)*.

A character is stored as an exponent vector over the cyclic components of
the unit group: if ``g_j`` generates component ``j`` (of order ``o_j``) then
``chi(g_j) = exp(2 pi i e_j / o_j)``. Values are looked up from a per-modulus
residue table, so evaluation inside prime loops is a single gather.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, reduce

import numpy as np

from .primes import PrimeTable

DEFAULT_MODULUS_CAP = 10**6


def _factor_small(n: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def _lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


def euler_phi(n: int) -> int:
    out = n
    for p, _ in _factor_small(n):
        out -= out // p
    return out


def least_primitive_root(p: int, a: int) -> int:
    """Least primitive root modulo the odd prime power ``p**a``."""
    q = p**a
    phi = q - q // p
    divisors = [phi // ell for ell, _ in _factor_small(phi)]
    for g in range(2, q):
        if g % p == 0:
            continue
        if all(pow(g, d, q) != 1 for d in divisors):
            return g
    raise ArithmeticError(f"no primitive root mod {q}")  # unreachable for odd p


def _exact_root(k: int, n: int) -> complex:
    """``exp(2 pi i k / n)`` with exact values at multiples of a quarter turn."""
    k %= n
    if (4 * k) % n == 0:
        return (1 + 0j, 1j, -1 + 0j, -1j)[(4 * k) // n]
    return cmath.exp(2j * math.pi * k / n)


@dataclass(frozen=True)
class Component:
    """One cyclic factor of (Z/DZ)*, living on the prime power ``q``."""

    prime: int
    q: int
    local_generator: int  # generator modulo q
    generator: int  # CRT lift: == local_generator mod q, == 1 mod D/q
    order: int
    dlog: np.ndarray = field(repr=False, compare=False)  # residue mod q -> exponent, -1 off units


@dataclass(eq=False)
class GroupStructure:
    modulus: int
    factors: list[tuple[int, int]]
    components: list[Component]

    @cached_property
    def phi(self) -> int:
        return reduce(lambda a, c: a * c.order, self.components, 1)

    @cached_property
    def exponent(self) -> int:
        return reduce(lambda a, c: _lcm(a, c.order), self.components, 1)

    @cached_property
    def orders(self) -> tuple[int, ...]:
        return tuple(c.order for c in self.components)

    @cached_property
    def unit_mask(self) -> np.ndarray:
        n = np.arange(self.modulus)
        return np.gcd(n, self.modulus) == 1

    @cached_property
    def residue_dlogs(self) -> np.ndarray:
        """``(ncomp, D)`` array of component discrete logs of each residue."""
        n = np.arange(self.modulus)
        if not self.components:
            return np.zeros((0, self.modulus), dtype=np.int64)
        return np.stack([c.dlog[n % c.q] for c in self.components])

    @cached_property
    def roots(self) -> np.ndarray:
        E = self.exponent
        return np.array([_exact_root(k, E) for k in range(E)], dtype=np.complex128)

    @cached_property
    def _value_cache(self) -> dict:
        return {}

    def dlog(self, n: int) -> tuple[int, ...]:
        """Component exponents of the unit ``n`` (ValueError if not a unit)."""
        n %= self.modulus
        if math.gcd(n, self.modulus) != 1:
            raise ValueError(f"{n} is not a unit mod {self.modulus}")
        return tuple(int(c.dlog[n % c.q]) for c in self.components)

    def character(self, exponents) -> "DirichletCharacter":
        exps = tuple(int(e) % o for e, o in zip(exponents, self.orders))
        if len(exps) != len(self.components):
            raise ValueError("exponent vector length must match component count")
        return DirichletCharacter(self, exps)

    def principal(self) -> "DirichletCharacter":
        return DirichletCharacter(self, (0,) * len(self.components))


def build_group(D: int, cap: int = DEFAULT_MODULUS_CAP) -> GroupStructure:
    """Decompose (Z/DZ)* into cyclic components with full dlog tables."""
    D = int(D)
    if D < 1 or D > cap:
        raise ValueError(f"modulus must lie in [1, {cap}], got {D}")
    factors = _factor_small(D) if D > 1 else []
    comps: list[Component] = []
    for p, a in factors:
        q = p**a
        rest = D // q
        lift_coef = rest * pow(rest, -1, q) if rest > 1 else 1

        def lift(g_local: int) -> int:
            if rest == 1:
                return g_local % D
            return (g_local * lift_coef + (1 - lift_coef)) % D

        if p == 2:
            if a == 1:
                continue
            if a == 2:
                dl = np.full(4, -1, dtype=np.int64)
                dl[1], dl[3] = 0, 1
                comps.append(Component(2, 4, 3, lift(3), 2, dl))
                continue
            half = q >> 2
            d0 = np.full(q, -1, dtype=np.int64)
            d1 = np.full(q, -1, dtype=np.int64)
            v = 1
            for e1 in range(half):
                d0[v], d1[v] = 0, e1
                d0[q - v], d1[q - v] = 1, e1
                v = v * 5 % q
            comps.append(Component(2, q, q - 1, lift(q - 1), 2, d0))
            comps.append(Component(2, q, 5, lift(5), half, d1))
            continue
        g = least_primitive_root(p, a)
        order = q - q // p
        dl = np.full(q, -1, dtype=np.int64)
        v = 1
        for k in range(order):
            dl[v] = k
            v = v * g % q
        comps.append(Component(p, q, g, lift(g), order, dl))
    return GroupStructure(D, factors, comps)


@dataclass(frozen=True)
class DirichletCharacter:
    group: GroupStructure = field(compare=False, repr=False)
    exponents: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return self.group.modulus

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return self.modulus == other.modulus and self.exponents == other.exponents

    def __hash__(self):
        return hash((self.modulus, self.exponents))

    def __repr__(self):
        return f"DirichletCharacter(mod {self.modulus}, {list(self.exponents)})"

    @property
    def index(self) -> int:
        """Position in ``enumerate_characters`` (mixed-radix, last component fastest)."""
        idx = 0
        for e, o in zip(self.exponents, self.group.orders):
            idx = idx * o + e
        return idx

    def phase(self, n: int) -> int | None:
        """``k`` with ``chi(n) = exp(2 pi i k / E)``, ``E`` the group exponent; None off units."""
        G = self.group
        n %= G.modulus
        if not G.unit_mask[n]:
            return None
        E = G.exponent
        return sum(e * int(c.dlog[n % c.q]) * (E // c.order) for e, c in zip(self.exponents, G.components)) % E

    def phases(self) -> np.ndarray:
        """Table of ``k`` with ``chi(n) = exp(2 pi i k / E)``, ``n = 0 .. D-1``; -1 off units."""
        G = self.group
        E = G.exponent
        k = np.zeros(G.modulus, dtype=np.int64)
        for e, c, dl in zip(self.exponents, G.components, G.residue_dlogs):
            if e:
                k += e * (E // c.order) * dl
        k %= E
        k[~G.unit_mask] = -1
        return k

    def values(self) -> np.ndarray:
        """Read-only table of ``chi(n)`` for ``n = 0 .. D-1``."""
        cache = self.group._value_cache
        vals = cache.get(self.exponents)
        if vals is None:
            k = self.phases()
            vals = self.group.roots[np.maximum(k, 0)]
            vals[k < 0] = 0
            vals.flags.writeable = False
            cache[self.exponents] = vals
        return vals

    def evaluate(self, n: int) -> complex:
        if n < 0:
            raise ValueError("n must be non-negative")
        return complex(self.values()[n % self.modulus])

    __call__ = evaluate

    def at(self, n) -> np.ndarray:
        """Vectorised evaluation at an integer array."""
        return self.values()[np.asarray(n) % self.modulus]

    @cached_property
    def order(self) -> int:
        return reduce(
            _lcm,
            (o // math.gcd(o, e) for e, o in zip(self.exponents, self.group.orders)),
            1,
        )

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    def _check_same(self, other: "DirichletCharacter"):
        if self.modulus != other.modulus:
            raise ValueError(f"characters have different moduli {self.modulus} and {other.modulus}")

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        self._check_same(other)
        return self.group.character(a + b for a, b in zip(self.exponents, other.exponents))

    def __pow__(self, k: int) -> "DirichletCharacter":
        return self.group.character(k * e for e in self.exponents)

    def conjugate(self) -> "DirichletCharacter":
        return self.group.character(-e for e in self.exponents)

    def to_json(self) -> dict:
        return {"modulus": self.modulus, "exponents": list(self.exponents)}


def product(chi1: DirichletCharacter, chi2: DirichletCharacter) -> DirichletCharacter:
    return chi1 * chi2


def conjugate(chi: DirichletCharacter) -> DirichletCharacter:
    return chi.conjugate()


def order(chi: DirichletCharacter) -> int:
    return chi.order


def evaluate(chi: DirichletCharacter, n: int) -> complex:
    return chi.evaluate(n)


def enumerate_characters(group: GroupStructure) -> list[DirichletCharacter]:
    """All ``phi(D)`` characters, principal first."""
    return [DirichletCharacter(group, tuple(e)) for e in itertools.product(*(range(o) for o in group.orders))]


def characters_of_order(group: GroupStructure, r: int) -> list[DirichletCharacter]:
    return [chi for chi in enumerate_characters(group) if chi.order == r]


def character_from_json(obj: dict, group: GroupStructure | None = None) -> DirichletCharacter:
    G = group if group is not None and group.modulus == obj["modulus"] else build_group(obj["modulus"])
    return G.character(obj["exponents"])


def induce(chi: DirichletCharacter, group: GroupStructure) -> DirichletCharacter:
    """The character mod ``group.modulus`` induced by ``chi``.

    Requires ``chi.modulus`` to divide the new modulus; the result agrees
    with ``chi`` on integers coprime to the new modulus and vanishes elsewhere.
    """
    D1, D2 = chi.modulus, group.modulus
    if D2 % D1:
        raise ValueError(f"{D1} does not divide {D2}")
    E1 = chi.group.exponent
    exps = []
    for c in group.components:
        k = chi.phase(c.generator)
        # chi(g)^order == 1, so k * order / E1 is an integer
        exps.append(k * c.order // E1)
    return group.character(exps)


def char_prime_sum(
    table: PrimeTable,
    chi: DirichletCharacter,
    w: int,
    y: int,
    sigma: float = 1.0,
    t: float = 0.0,
) -> float:
    """``Re sum_{w < p <= y} chi(p) p^{-sigma - it}``."""
    if sigma < 1:
        raise ValueError("sigma must be >= 1")
    if not (chi.modulus <= w <= y <= table.limit):
        raise ValueError(f"need D <= w <= y <= {table.limit}")
    sl = table.prime_slice(w, y)
    p = table.primes[sl]
    u = table.logs[sl]
    terms = chi.at(p) * np.exp(-sigma * u - 1j * t * u)
    return float(np.sum(terms.real))
