"""Slow, independent reference implementations used as test oracles."""

from __future__ import annotations

import cmath
import itertools
import math

import numpy as np


def trial_division_primes(limit: int) -> list[int]:
    return [n for n in range(2, limit + 1) if all(n % d for d in range(2, math.isqrt(n) + 1))]


def factor(n: int) -> list[tuple[int, int]]:
    out, d = [], 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def mobius(n: int) -> int:
    f = factor(n)
    return 0 if any(e > 1 for _, e in f) else (-1) ** len(f)


def liouville(n: int) -> int:
    return (-1) ** sum(e for _, e in factor(n))


def mertens(x: int) -> int:
    """``M(x)`` by a linear sieve."""
    mu = [0, 1] + [1] * (x - 1) if x >= 1 else [0]
    is_comp = bytearray(x + 1)
    primes: list[int] = []
    for i in range(2, x + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            if i * p > x:
                break
            is_comp[i * p] = 1
            if i % p == 0:
                mu[i * p] = 0
                break
            mu[i * p] = -mu[i]
    return sum(mu[1:])


def units(D: int) -> list[int]:
    return [a for a in range(D) if math.gcd(a, D) == 1]


def brute_characters(D: int) -> list[np.ndarray]:
    """Every homomorphism (Z/DZ)* -> C*, found from scratch.

    A generating set of the unit group is chosen greedily, and each
    assignment of roots of unity to generators that respects every
    relation among units is kept.
    """
    if D == 1:
        return [np.array([1 + 0j])]
    U = units(D)
    tables = []
    gens: list[int] = []
    span = {1}
    for u in U:
        if u not in span:
            gens.append(u)
            new = set(span)
            frontier = set(span)
            while frontier:
                nxt = {(a * g) % D for a in frontier for g in gens} - new
                new |= nxt
                frontier = nxt
            span = new

    def ordr(g):
        k, v = 1, g
        while v != 1:
            v = v * g % D
            k += 1
        return k

    orders = [ordr(g) for g in gens]
    for ks in itertools.product(*(range(o) for o in orders)):
        vals = {1: 1 + 0j}
        frontier = [1]
        ok = True
        while frontier and ok:
            nxt = []
            for a in frontier:
                for g, k, o in zip(gens, ks, orders):
                    b = a * g % D
                    v = vals[a] * cmath.exp(2j * math.pi * k / o)
                    if b in vals:
                        if abs(vals[b] - v) > 1e-9:
                            ok = False
                            break
                    else:
                        vals[b] = v
                        nxt.append(b)
                if not ok:
                    break
            frontier = nxt
        if ok:
            row = np.zeros(D, dtype=complex)
            for a, v in vals.items():
                row[a] = v
            tables.append(row)
    return tables


def selberg_brute(Q: int, z: float) -> tuple[dict[int, float], float]:
    """Minimise the Selberg form with ``lambda_1 = 1`` by solving the KKT system."""
    ps = [p for p, _ in factor(Q)] if Q > 1 else []
    divs = [1]
    for p in ps:
        divs += [d * p for d in divs]
    divs = sorted(d for d in divs if d <= z)
    n = len(divs)
    M = np.array([[1 / (a * b // math.gcd(a, b)) for b in divs] for a in divs])
    # minimise l^T M l subject to l_0 = 1: l_rest = -M_rr^{-1} M_r0
    if n == 1:
        return {1: 1.0}, 1.0
    Mrr, Mr0 = M[1:, 1:], M[1:, 0]
    rest = -np.linalg.solve(Mrr, Mr0)
    lam = np.concatenate(([1.0], rest))
    return dict(zip(divs, lam.tolist())), float(lam @ M @ lam)


def smooth_count_naive(x: int, D: int, bound: float, a: int) -> int:
    lo = math.isqrt(x)
    out = 0
    for n in range(lo + 1, x + 1):
        if n % D == a % D and all(p <= bound for p, _ in factor(n)):
            out += 1
    return out


def interval_max_naive(values, H: int) -> float:
    """``max_{v - u <= H} |sum_{u < n <= v} b_n|^2`` by double loop."""
    best = 0.0
    n = len(values)
    for u in range(n):
        s = 0j
        for v in range(u, min(n, u + H)):
            s += values[v]
            best = max(best, abs(s) ** 2)
    return best
