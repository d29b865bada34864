"""Fejer-kernel dichotomy: either S carries little prime mass or chi has small order.

Every step of the argument is exposed as a separately checkable quantity:
the small-angle Fejer lower bound, the expansion of the Fejer-weighted prime
sum into character sums, and the quadratic bound on large-angle primes.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .characters import DirichletCharacter, build_group, characters_of_order
from .distance import char_delta, window_L
from .multiplicative import SupportSet
from .primes import PrimeTable

NEAR_INTEGER = 1e-6
MAX_N = 256
RENORM_EVERY = 64
TWO_PI = 2 * math.pi


def nearest_integer_distance(theta):
    """``||theta||``, the distance to a nearest integer."""
    th = np.asarray(theta, dtype=np.float64)
    out = np.abs(th - np.round(th))
    return float(out) if out.ndim == 0 else out


def fejer_sum_form(N: int, theta):
    """``sum_{|m| < N} (1 - |m|/N) e^{2 pi i m theta}`` evaluated as a cosine sum."""
    th = np.asarray(theta, dtype=np.float64)
    out = np.ones_like(th)
    for m in range(1, N):
        out = out + 2 * (1 - m / N) * np.cos(TWO_PI * m * th)
    return float(out) if out.ndim == 0 else out


def fejer(N: int, theta):
    """``(1/N) (sin(pi N theta) / sin(pi theta))^2``.

    Closed form away from the integers, cosine-sum form within
    ``NEAR_INTEGER`` of one (where ``sin(pi theta)`` cancels).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    th = np.asarray(theta, dtype=np.float64)
    scalar = th.ndim == 0
    th = np.atleast_1d(th)
    out = np.empty_like(th)
    near = nearest_integer_distance(th) < NEAR_INTEGER
    far = ~near
    s = np.sin(np.pi * th[far])
    out[far] = (np.sin(np.pi * N * th[far]) / s) ** 2 / N
    if near.any():
        out[near] = fejer_sum_form(N, th[near])
    return float(out[0]) if scalar else out


def fejer_lower_bound(r: int, theta):
    """``r (1 - (pi r ||theta||)^2 / 6)^2``, valid where ``2 r ||theta|| <= 1``.

    Follows from ``sin y >= y - y^3/6`` on ``[0, pi/2]`` and ``|sin y| <= |y|``.
    """
    d = nearest_integer_distance(theta)
    return r * (1 - (np.pi * r * d) ** 2 / 6) ** 2


def fejer_unsquared_bound(r: int, theta):
    """``r (1 - (pi r ||theta||)^2 / 6)``.

    Not a lower bound on all of ``2 r ||theta|| <= 1``: at ``||theta|| = 1/(2r)``
    the kernel is about ``4r / pi^2`` while this is ``r (1 - pi^2/24)``.
    Kept so its failures can be counted.
    """
    d = nearest_integer_distance(theta)
    return r * (1 - (np.pi * r * d) ** 2 / 6)


def sin_cubic_bound_ok(points: int = 10_000) -> bool:
    """``sin th >= th - th^3/6`` on a grid of ``[0, pi/2]``."""
    th = np.linspace(0, np.pi / 2, points)
    return bool(np.all(np.sin(th) >= th - th**3 / 6 - 1e-15))


def _gammas(chi: DirichletCharacter, p: np.ndarray, u: np.ndarray, t: float) -> np.ndarray:
    k = chi.phases()[p % chi.modulus]
    if np.any(k < 0):
        raise ValueError("chi vanishes at a prime in S (p divides D)")
    g = k / chi.group.exponent + t * u / TWO_PI
    return g - np.floor(g)


def gamma_angles(S: SupportSet, chi: DirichletCharacter, t: float, table: PrimeTable) -> list[tuple[int, float]]:
    """``(p, gamma_p)`` with ``2 pi gamma_p = arg chi(p) + t log p``, reduced to [0, 1)."""
    p = table.primes[S.mask]
    u = table.logs[S.mask]
    return list(zip(p.tolist(), _gammas(chi, p, u, t).tolist()))


def power_sums(z: np.ndarray, w: np.ndarray, M: int) -> np.ndarray:
    """``P_m = sum_j w_j z_j^m`` for ``m = 1 .. M`` by repeated multiplication.

    The running power is renormalised to the unit circle every
    ``RENORM_EVERY`` steps to shed rounding drift.
    """
    out = np.empty(M, dtype=np.complex128)
    pw = np.ones_like(z)
    for m in range(1, M + 1):
        pw = pw * z
        if m % RENORM_EVERY == 0:
            pw = pw / np.abs(pw)
        out[m - 1] = np.sum(w * pw)
    return out


@dataclass
class ChainDiagnostics:
    N: int
    small_mass: float
    large_mass: float
    large_count: int
    fejer_total: float
    expansion_total: float
    small_gamma_lhs: float  # 4 N / pi^2 * small_mass
    large_gamma_rhs: float  # N^2 / 4 * raw
    char_sums: list[tuple[float, float]]  # P_m for m = 1 .. N-1
    assembled_bound: float
    assembled_slack: float
    proof_budget: float  # pi^2/(4N) sum_{m != 0} (1 - |m|/N) Re P_m
    bookkeeping_budget: float  # (number of m != 0 terms) * max |P_m|

    @property
    def small_gamma_ok(self) -> bool:
        return self.small_gamma_lhs <= self.fejer_total + 1e-12 * max(1.0, self.fejer_total)

    @property
    def expansion_error(self) -> float:
        return abs(self.expansion_total - self.fejer_total)

    @property
    def expansion_ok(self) -> bool:
        return self.expansion_error <= 1e-8

    @property
    def large_gamma_ok(self) -> bool:
        if self.large_count == 0:
            return self.large_mass == 0
        return self.large_mass < self.large_gamma_rhs

    @property
    def assembled_ok(self) -> bool:
        return self.assembled_slack <= self.proof_budget + 1e-9 and self.assembled_slack <= self.bookkeeping_budget + 1e-6

    @property
    def ok(self) -> bool:
        return self.small_gamma_ok and self.expansion_ok and self.large_gamma_ok and self.assembled_ok


def proof_chain(S: SupportSet, chi: DirichletCharacter, t: float, table: PrimeTable, D: int, x: int, N: int, raw: float) -> ChainDiagnostics:
    sl = table.prime_slice(D, x)
    p, u, w = table.primes[sl], table.logs[sl], table.reciprocals[sl]
    L = float(np.sum(w))
    gam = _gammas(chi, p, u, t)
    ing = S.mask[sl]
    small = ing & (2 * N * nearest_integer_distance(gam) <= 1)
    large = ing & ~small
    small_mass = float(np.sum(w[small]))
    large_mass = float(np.sum(w[large]))
    fejer_total = float(np.sum(fejer(N, gam) * w))
    z = np.exp(1j * TWO_PI * gam)
    P = power_sums(z, w, N - 1) if N > 1 else np.zeros(0, dtype=np.complex128)
    m = np.arange(1, N)
    weighted = float(np.sum((1 - m / N) * P.real))
    expansion = L + 2 * weighted
    mass = small_mass + large_mass
    delta = raw / L if L > 0 else math.inf
    assembled = (N * N * delta / 4 + math.pi**2 / (4 * N)) * L
    maxP = float(np.max(np.abs(P))) if P.size else 0.0
    return ChainDiagnostics(
        N=N,
        small_mass=small_mass,
        large_mass=large_mass,
        large_count=int(large.sum()),
        fejer_total=fejer_total,
        expansion_total=expansion,
        small_gamma_lhs=4 * N / math.pi**2 * small_mass,
        large_gamma_rhs=N * N / 4 * raw,
        char_sums=[(float(c.real), float(c.imag)) for c in P],
        assembled_bound=assembled,
        assembled_slack=mass - assembled,
        proof_budget=math.pi**2 / (4 * N) * 2 * weighted,
        bookkeeping_budget=2 * (N - 1) * maxP,
    )


def choose_N(delta: float, max_n: int = MAX_N) -> tuple[int, bool]:
    """``N = [2 delta^{-1/3}]``, capped at ``max_n``; returns ``(N, capped)``."""
    if delta <= 0:
        return max_n, True
    n = max(1, math.floor(2 * delta ** (-1 / 3) + 1e-9))
    return (max_n, True) if n > max_n else (n, False)


@dataclass
class DichotomyVerdict:
    D: int
    x: int
    B: float
    chi: DirichletCharacter
    t: float
    support: str
    delta: float
    L: float
    mass: float
    order: int
    N: int
    N_capped: bool
    horn1_slack: float
    horn2_threshold: float
    horn1: bool  # mass <= 4 delta^{1/3} L (no additive constant)
    horn2: bool
    delta_in_range: bool
    t_in_range: bool
    side_condition_ok: bool | None
    chain: ChainDiagnostics
    # order-r fields
    r: int | None = None
    r_bound: float | None = None
    r_slack: float | None = None
    r_cube_ok: bool | None = None
    order_at_least_r: bool | None = None
    kernel_bound_violations: int | None = None
    unsquared_bound_violations: int | None = None
    r_chain_lhs: float | None = None
    r_chain_rhs: float | None = None

    @property
    def in_hypothesis(self) -> bool:
        return self.delta_in_range and self.t_in_range

    @property
    def horn_holds(self) -> bool:
        return self.horn1 or self.horn2

    def holds_with(self, c: float) -> bool:
        return self.horn2 or self.horn1_slack <= c

    def to_json(self) -> dict:
        out = {
            k: v for k, v in asdict(self).items()
            if k not in ("chi", "chain")
        }
        out["chi"] = self.chi.to_json()
        out["chi_index"] = self.chi.index
        out["in_hypothesis"] = self.in_hypothesis
        ch = asdict(self.chain)
        ch.update(
            small_gamma_ok=self.chain.small_gamma_ok,
            expansion_error=self.chain.expansion_error,
            expansion_ok=self.chain.expansion_ok,
            large_gamma_ok=self.chain.large_gamma_ok,
            assembled_ok=self.chain.assembled_ok,
        )
        ch["char_sums"] = [list(c) for c in self.chain.char_sums]
        out["chain"] = ch
        return out


def dichotomy_check(
    S: SupportSet,
    chi: DirichletCharacter,
    t: float,
    B: float,
    table: PrimeTable,
    D: int,
    x: int,
    support_label: str = "",
    max_n: int = MAX_N,
) -> DichotomyVerdict:
    """Evaluate both horns of the dichotomy for one (S, chi, t) instance.

    ``delta`` is the smallest value for which the distance hypothesis holds,
    ``raw / L``. Instances outside ``8 D^{-3B} <= delta <= 1``, ``|t| <= D^B``
    are flagged, not rejected.
    """
    if D < 2:
        raise ValueError("D must be >= 2")
    prof = char_delta(S, chi, t, table, D, x)
    delta, L = prof.delta, prof.L
    mass = S.mass()
    N, capped = choose_N(delta, max_n)
    threshold = 2 * delta ** (-1 / 3) if delta > 0 else math.inf
    order = chi.order
    chain = proof_chain(S, chi, t, table, D, x, N, prof.raw)
    lower = 8 * D ** (-3 * B)
    delta_ok = lower <= delta <= 1
    side = None
    if delta >= lower and delta > 0 and not capped:
        side = N * abs(t) <= D ** (2 * B) * (1 + 1e-12)
    slack = mass - 4 * delta ** (1 / 3) * L
    return DichotomyVerdict(
        D=D, x=x, B=B, chi=chi, t=t, support=support_label,
        delta=delta, L=L, mass=mass, order=order, N=N, N_capped=capped,
        horn1_slack=slack, horn2_threshold=threshold,
        horn1=slack <= 0, horn2=order < threshold,
        delta_in_range=delta_ok, t_in_range=abs(t) <= D**B,
        side_condition_ok=side, chain=chain,
    )


def order_bound_check(
    S: SupportSet,
    chi: DirichletCharacter,
    t: float,
    r: int,
    B: float,
    table: PrimeTable,
    D: int,
    x: int,
    support_label: str = "",
) -> DichotomyVerdict:
    """The order-``r`` variant: mass <= (1 + (r^3 delta)^{1/2}) L / r + c."""
    if r < 1:
        raise ValueError("r must be >= 1")
    v = dichotomy_check(S, chi, t, B, table, D, x, support_label)
    delta, L = v.delta, v.L
    bound = (1 + math.sqrt(r**3 * delta)) * L / r
    sl = table.prime_slice(D, x)
    p, u, w = table.primes[sl], table.logs[sl], table.reciprocals[sl]
    gam = _gammas(chi, p, u, t)
    d = nearest_integer_distance(gam)
    near = 2 * r * d <= 1
    kern = fejer(r, gam)
    lower = fejer_lower_bound(r, gam[near])
    viol = int(np.sum(kern[near] < lower - 1e-12))
    viol_unsq = int(np.sum(kern[near] < fejer_unsquared_bound(r, gam[near]) - 1e-12))
    ing = S.mask[sl][near]
    lhs = float(np.sum(lower[ing] * w[near][ing]))
    v.r = r
    v.r_bound = bound
    v.r_slack = v.mass - bound
    v.r_cube_ok = r**3 * delta <= 1
    v.order_at_least_r = v.order >= r
    v.kernel_bound_violations = viol
    v.unsquared_bound_violations = viol_unsq
    v.r_chain_lhs = lhs
    v.r_chain_rhs = float(np.sum(kern * w))
    return v


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def power_residues(D: int, r: int) -> list[int]:
    return sorted({pow(b, r, D) for b in range(1, D) if math.gcd(b, D) == 1})


def extremal_example(D: int, r: int, x: int, table: PrimeTable) -> tuple[SupportSet, list[DirichletCharacter]]:
    """Primes in (D, x] that are r-th powers mod the prime D, and the order-r characters."""
    if not _is_prime(D):
        raise ValueError(f"D={D} must be prime")
    if r < 1 or (D - 1) % r:
        raise ValueError(f"r={r} must divide D - 1 = {D - 1}")
    res = np.zeros(D, dtype=bool)
    res[power_residues(D, r)] = True
    p = table.primes
    mask = (p > D) & (p <= x) & res[p % D]
    S = SupportSet(table, mask, (D, x))
    return S, characters_of_order(build_group(D), r)


# -- sweep support sets -----------------------------------------------------------------


@dataclass(frozen=True)
class SupportSpec:
    """Replayable description of a prime set inside (D, x].

    kinds: ``all``; ``random`` (Bernoulli(density) per prime, seeded);
    ``near`` (primes with ``||gamma_p|| <= eta`` for the cell's chi, t);
    ``mixed`` (``near`` union ``random``); ``residues`` (given classes mod D).
    """

    kind: str
    density: float = 1.0
    seed: int = 0
    eta: float = 0.0
    residues: tuple[int, ...] = field(default=())

    def label(self) -> str:
        parts = [self.kind]
        if self.kind in ("random", "mixed"):
            parts += [f"d={self.density}", f"seed={self.seed}"]
        if self.kind in ("near", "mixed"):
            parts.append(f"eta={self.eta}")
        if self.kind == "residues":
            parts.append("res=" + ",".join(map(str, self.residues)))
        return ";".join(parts)

    def build(self, table: PrimeTable, D: int, x: int, chi: DirichletCharacter, t: float) -> SupportSet:
        p = table.primes
        win = (p > D) & (p <= x)
        if self.kind == "all":
            mask = win
        elif self.kind in ("random", "near", "mixed"):
            mask = np.zeros_like(win)
            if self.kind in ("random", "mixed"):
                rng = np.random.Generator(np.random.Philox(self.seed))
                mask |= rng.random(len(p)) < self.density
            if self.kind in ("near", "mixed"):
                idx = np.flatnonzero(win)
                gam = _gammas(chi, p[idx], table.logs[idx], t)
                near = np.zeros_like(win)
                near[idx] = nearest_integer_distance(gam) <= self.eta
                mask |= near
            mask &= win
        elif self.kind == "residues":
            res = np.zeros(D, dtype=bool)
            res[list(self.residues)] = True
            mask = win & res[p % D]
        else:
            raise ValueError(f"unknown support kind {self.kind!r}")
        return SupportSet(table, mask, (D, x))
