"""Selberg-weighted maximal-gap large sieve and smooth numbers in progressions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .characters import DirichletCharacter, _factor_small
from .primes import PrimeTable, largest_prime_factor


def _squarefree_divisors(primes: list[int]) -> list[int]:
    out = [1]
    for p in primes:
        out += [d * p for d in out]
    return sorted(out)


def _mu_sqfree(d: int, primes: list[int]) -> int:
    return (-1) ** sum(1 for p in primes if d % p == 0)


def _phi_sqfree(d: int, primes: list[int]) -> int:
    out = 1
    for p in primes:
        if d % p == 0:
            out *= p - 1
    return out


@dataclass
class SelbergWeights:
    Q: int
    H: float
    eps: float
    z: float  # support cutoff H^{eps/2}
    weights: dict[int, float]
    G: float  # sum_{m <= z, m | Q} mu^2(m) / phi(m); the minimum of the form is 1/G

    def __getitem__(self, d: int) -> float:
        return self.weights.get(d, 0.0)


def selberg_weights(Q: int, H: float, eps: float, table: PrimeTable | None = None) -> SelbergWeights:
    """Optimal Selberg weights for the prime divisors of ``Q`` with cutoff ``H^{eps/2}``.

    ``lambda_d = mu(d) (d/phi(d)) G_d(z/d) / G(z)`` where
    ``G_d(y) = sum_{m <= y, m | Q, (m, d) = 1} mu^2(m)/phi(m)``.
    """
    if Q < 1 or H < 1 or not 0 < eps < 1:
        raise ValueError("need Q >= 1, H >= 1, 0 < eps < 1")
    z = H ** (eps / 2)
    primes = [p for p, _ in _factor_small(Q)] if Q > 1 else []
    divs = [d for d in _squarefree_divisors(primes) if d <= z]
    h = {m: 1 / _phi_sqfree(m, primes) for m in divs}

    def G_coprime(y: float, d: int) -> float:
        return math.fsum(h[m] for m in divs if m <= y and math.gcd(m, d) == 1)

    Gz = G_coprime(z, 1)
    weights = {}
    for d in divs:
        weights[d] = _mu_sqfree(d, primes) * (d / _phi_sqfree(d, primes)) * G_coprime(z / d, d) / Gz
    weights[1] = 1.0
    return SelbergWeights(Q, H, eps, z, weights, Gz)


def quadratic_form(weights: SelbergWeights) -> float:
    """``sum_{d1, d2} lambda_d1 lambda_d2 / [d1, d2]``."""
    items = list(weights.weights.items())
    return math.fsum(
        l1 * l2 / (d1 * d2 // math.gcd(d1, d2)) for d1, l1 in items for d2, l2 in items
    )


@dataclass
class SieveForm:
    G: float  # the quadratic form
    H_term: float  # H * G
    abs_sum_sq: float  # (sum |lambda_d|)^2
    product: float  # prod_{p | Q, p <= H} (1 - 1/p)
    majorant_sum: float | None = None  # sum_{n <= x} (sum_{d | (n,Q)} lambda_d)^2
    coprime_count: int | None = None


def majorant(weights: SelbergWeights, x: int) -> np.ndarray:
    """``(sum_{d | (n, Q)} lambda_d)^2`` for ``n = 0..x`` (index 0 unused)."""
    s = np.zeros(x + 1)
    for d, lam in weights.weights.items():
        s[d::d] += lam
    s[0] = 0
    return s * s


def sieve_quadratic_form(weights: SelbergWeights, x: int | None = None, table: PrimeTable | None = None) -> SieveForm:
    G = quadratic_form(weights)
    primes = [p for p, _ in _factor_small(weights.Q)] if weights.Q > 1 else []
    prod = math.prod(1 - 1 / p for p in primes if p <= weights.H)
    form = SieveForm(G, weights.H * G, sum(abs(v) for v in weights.weights.values()) ** 2, prod)
    if x is not None:
        form.majorant_sum = float(np.sum(majorant(weights, x)[1:]))
        n = np.arange(1, x + 1)
        form.coprime_count = int(np.sum(np.gcd(n, weights.Q) == 1))
    return form


# -- maximal gap large sieve ------------------------------------------------------------


@dataclass
class LargeSieveInstance:
    D: int
    Q: int
    H: float
    eps: float
    chars: list[DirichletCharacter]
    coeffs: np.ndarray  # a_n for n = 1 .. len(coeffs)
    include_D_primes: bool = False

    def __post_init__(self):
        if self.D < 2:
            raise ValueError("D must be >= 2")
        if len({c.exponents for c in self.chars}) != len(self.chars):
            raise ValueError("characters must be distinct")
        if any(c.modulus != self.D for c in self.chars):
            raise ValueError("all characters must have modulus D")
        if self.H < 0:
            raise ValueError("H must be non-negative")

    @property
    def sieve_modulus(self) -> int:
        if not self.include_D_primes:
            return self.Q
        Q = self.Q
        for p, _ in _factor_small(self.D):
            if Q % p:
                Q *= p
        return Q


@dataclass
class LargeSieveResult:
    lhs: float
    rhs_shape: float
    ratio: float
    per_char: list[float]
    coeff_norm: float
    cauchy_bound: float  # J * floor(H) * sum |a_n|^2, unconditional
    small_H: bool  # D^{1/2} > H regime

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in ("lhs", "rhs_shape", "ratio", "per_char", "coeff_norm", "cauchy_bound", "small_H")}


def max_gap_sum(b: np.ndarray, H: float) -> float:
    """``max_{v - u <= H} |sum_{u < n <= v} b_n|^2`` by scanning every gap length."""
    P = np.concatenate(([0j], np.cumsum(b)))
    best = 0.0
    for h in range(1, min(int(math.floor(H)), len(b)) + 1):
        d = P[h:] - P[:-h]
        best = max(best, float(np.max(d.real**2 + d.imag**2)))
    return best


def large_sieve_check(inst: LargeSieveInstance, table: PrimeTable | None = None) -> LargeSieveResult:
    a = np.asarray(inst.coeffs, dtype=np.complex128)
    n = np.arange(1, len(a) + 1)
    Q = inst.sieve_modulus
    keep = np.gcd(n, Q) == 1
    per = [max_gap_sum(a * c.at(n) * keep, inst.H) for c in inst.chars]
    lhs = float(sum(per))
    norm = float(np.sum(np.abs(a) ** 2))
    qp = [p for p, _ in _factor_small(Q)] if Q > 1 else []
    prod = math.prod(1 - 1 / p for p in qp if p <= inst.H)
    J, D, H = len(inst.chars), inst.D, inst.H
    rhs = (H * prod + J * H**inst.eps * math.sqrt(D) * math.log(D)) * norm
    return LargeSieveResult(
        lhs, rhs, lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf), per, norm,
        J * math.floor(H) * norm, math.sqrt(D) > H,
    )


@dataclass
class DualFormResult:
    plain: float  # sum_{n <= x, (n,Q)=1} |sum_j c_j t_j(n)|^2
    weighted: float  # same with (sum_{d|(n,Q)} lambda_d)^2 in place of the indicator
    expanded: float  # the lambda / lcm expansion of ``weighted``
    diagonal: float
    off_diagonal: float


def dual_form_check(inst: LargeSieveInstance, c: np.ndarray, u: list[int], v: list[int], weights: SelbergWeights) -> DualFormResult:
    """Evaluate the dual form three ways for given intervals ``(u_j, v_j]``."""
    x = max(v)
    n = np.arange(x + 1)
    tj = np.zeros((len(inst.chars), x + 1), dtype=np.complex128)
    for j, chi in enumerate(inst.chars):
        sel = (n > u[j]) & (n <= v[j])
        tj[j, sel] = chi.at(n[sel])
    comb = np.asarray(c) @ tj
    sq = np.abs(comb) ** 2
    sq[0] = 0
    plain = float(np.sum(sq[np.gcd(n, weights.Q) == 1]))
    weighted = float(np.sum(majorant(weights, x) * sq))
    diag = off = 0.0
    items = list(weights.weights.items())
    for d1, l1 in items:
        for d2, l2 in items:
            m = d1 * d2 // math.gcd(d1, d2)
            idx = np.arange(m, x + 1, m)
            block = tj[:, idx]
            gram = np.outer(c, np.conj(c)) * (block @ block.conj().T)
            diag += l1 * l2 * float(np.real(np.trace(gram)))
            off += l1 * l2 * float(np.real(np.sum(gram) - np.trace(gram)))
    return DualFormResult(plain, weighted, diag + off, diag, off)


def polya_vinogradov_max(chi: DirichletCharacter, table: PrimeTable | None = None) -> tuple[float, float]:
    """``max_{0 <= u < v <= D} |sum_{u < n <= v} chi(n)|`` and ``sqrt(D) log D``."""
    if chi.is_principal:
        raise ValueError("chi must be non-principal")
    D = chi.modulus
    s = np.concatenate(([0j], np.cumsum(np.roll(chi.values(), -1))))  # s[k] = sum_{n<=k} chi(n)
    return _diameter(s), math.sqrt(D) * math.log(D)


def _diameter(z: np.ndarray) -> float:
    if np.max(np.abs(z.imag)) < 1e-12:
        return float(np.max(z.real) - np.min(z.real))
    if z.size <= 2048:
        d = z[:, None] - z[None, :]
        return float(np.sqrt(np.max(d.real**2 + d.imag**2)))
    from scipy.spatial import ConvexHull

    pts = np.column_stack([z.real, z.imag])
    hull = pts[ConvexHull(pts).vertices]
    h = hull[:, 0] + 1j * hull[:, 1]
    d = h[:, None] - h[None, :]
    return float(np.sqrt(np.max(d.real**2 + d.imag**2)))


# -- smooth numbers in progressions -----------------------------------------------------


def smooth_numbers_dfs(bound: int, x: int) -> list[int]:
    """All ``n <= x`` whose prime factors are ``<= bound``, by depth-first search."""
    ps = _primes_upto(min(bound, x))
    out = [1]
    stack = [(1, 0)]
    while stack:
        n, i = stack.pop()
        for j in range(i, len(ps)):
            m = n * ps[j]
            if m > x:
                break
            out.append(m)
            stack.append((m, j))
    return sorted(out)


@dataclass
class SmoothCount:
    count: int
    bound_shape: float
    ratio: float
    method: str

    def to_json(self) -> dict:
        return {"count": self.count, "bound_shape": self.bound_shape, "ratio": self.ratio, "method": self.method}


def _smooth_bound(D: int, c: float) -> int:
    return int(math.floor(D**c + 1e-9))


def smooth_mask(table: PrimeTable, x: int, bound: int) -> np.ndarray:
    return largest_prime_factor(table, x) <= bound


def smooth_progression_count(
    x: int, D: int, c: float, a: int, k: int, table: PrimeTable | None = None, method: str = "auto", lpf: np.ndarray | None = None
) -> SmoothCount:
    """Count ``n`` in ``(sqrt x, x]``, ``n == a (mod D)``, with all prime factors ``<= D^c``."""
    if not (1 <= D <= x) or c <= 0 or k < 1:
        raise ValueError("need 1 <= D <= x, c > 0, k >= 1")
    a %= D
    y = _smooth_bound(D, c)
    lo = math.isqrt(x)  # n > sqrt(x)  <=>  n > isqrt(x)
    if method == "auto":
        method = "sieve" if table is not None and x <= table.limit else "dfs"
    if method == "sieve":
        if lpf is None:
            lpf = largest_prime_factor(table, x)
        n = np.arange(lo + 1, x + 1)
        sel = (lpf[lo + 1 : x + 1] <= y) & (n % D == a)
        count = int(np.sum(sel))
    elif method == "dfs":
        count = sum(1 for n in smooth_numbers_dfs(y, x) if n > lo and n % D == a)
    else:
        raise ValueError(f"unknown method {method!r}")
    shape = x / D * (math.log(D) / math.log(x)) ** k if D > 1 else x
    return SmoothCount(count, shape, count / shape if shape > 0 else math.inf, method)


@dataclass
class SmoothChain:
    vacuous: bool  # D > sqrt(x) or D^{kc} >= x^{1/4}
    count: int
    trivial_bound: float  # number of n == a in (sqrt x, x], smoothness ignored
    weight_ok: bool | None = None  # (log n / log sqrt x)^k >= 1 on the counted squarefree n
    squarefree_count: int | None = None
    weighted_sum: float | None = None
    expansion: float | None = None  # k-fold prime expansion of the weighted sum
    expansion_relaxed: float | None = None  # inner count without smooth / squarefree conditions
    split_small_m: int | None = None
    split_large_m: int | None = None
    split_total: int | None = None
    large_m_bound: float | None = None
    gcd: int = 1
    reduced_count: int | None = None

    @property
    def split_ok(self) -> bool | None:
        if self.split_total is None:
            return None
        return self.split_small_m + self.split_large_m == self.split_total == self.count

    @property
    def reduction_ok(self) -> bool | None:
        if self.reduced_count is None:
            return None
        return self.reduced_count == self.count

    @property
    def expansion_ok(self) -> bool | None:
        if self.expansion is None:
            return None
        return (
            abs(self.expansion - self.weighted_sum) <= 1e-9 * max(1.0, self.weighted_sum)
            and self.squarefree_count <= self.weighted_sum + 1e-9
            and self.weighted_sum <= self.expansion_relaxed + 1e-9
        )

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out.update(split_ok=self.split_ok, reduction_ok=self.reduction_ok, expansion_ok=self.expansion_ok)
        return out


def _primes_upto(y: int) -> list[int]:
    return [p for p in range(2, y + 1) if all(p % q for q in range(2, math.isqrt(p) + 1))]


def smooth_count_chain_check(x: int, D: int, c: float, a: int, k: int, table: PrimeTable | None = None) -> SmoothChain:
    """Numerical checks of each reduction used to bound the smooth count."""
    if not (1 <= D <= x) or c <= 0 or k < 1:
        raise ValueError("need 1 <= D <= x, c > 0, k >= 1")
    a %= D
    y = _smooth_bound(D, c)
    lo = math.isqrt(x)
    smooth = smooth_numbers_dfs(y, x)
    members = [n for n in smooth if n > lo and n % D == a]
    count = len(members)
    vacuous = D * D > x or y**k >= x**0.25
    trivial = len(range(lo + 1 + ((a - lo - 1) % D), x + 1, D))
    chain = SmoothChain(vacuous, count, trivial)

    # rm^2 split: n = r m^2 with r squarefree
    small = large = 0
    M = x**0.25
    ps_y = _primes_upto(y)
    sqfree = {n for n in smooth if all(n % (p * p) for p in ps_y if p * p <= n)}
    r_sorted = sorted(sqfree)
    for m in sorted(n for n in smooth if n * n <= x):
        cap = x // (m * m)
        for r in r_sorted:
            if r > cap:
                break
            n = r * m * m
            if n > lo and n % D == a:
                if m <= M:
                    small += 1
                else:
                    large += 1
    chain.split_small_m, chain.split_large_m, chain.split_total = small, large, small + large
    chain.large_m_bound = x / max(1, math.floor(M))

    # gcd reduction: n = t w with w == a/t (mod D/t)
    t = math.gcd(a, D) if a else D
    chain.gcd = t
    if t > 1:
        t_smooth = all(p <= y for p, _ in _factor_small(t))
        if not t_smooth:
            chain.reduced_count = 0
        else:
            Dt, at = D // t, (a // t) % (D // t)
            chain.reduced_count = sum(
                1 for w in smooth if w * t <= x and w * t > lo and w % Dt == at
            )

    if not vacuous and math.gcd(a, D) == 1:
        ps = ps_y
        half = 0.5 * math.log(x)
        sq = [n for n in r_sorted if n % D == a]
        chain.squarefree_count = sum(1 for n in sq if n > lo)
        chain.weight_ok = all((math.log(n) / half) ** k >= 1 for n in sq if n > lo)
        chain.weighted_sum = math.fsum((math.log(n) / half) ** k for n in sq)
        sq_set = set(sq)
        exp_terms, relaxed_terms = [], []
        for tup in itertools.product(ps, repeat=k):
            lcm = math.prod(set(tup))
            wt = math.prod(math.log(p) for p in tup) / half**k
            # exact: squarefree smooth n == a with lcm | n
            exp_terms.append(wt * sum(1 for n in sq_set if n % lcm == 0))
            mmax = x // lcm
            relaxed_terms.append(wt * sum(1 for m in range(1, mmax + 1) if (m * lcm) % D == a))
        chain.expansion = math.fsum(exp_terms)
        chain.expansion_relaxed = math.fsum(relaxed_terms)
    return chain
