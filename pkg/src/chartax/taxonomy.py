"""Taxonomy of exceptional characters for sums of g over progressions.

Pipeline for one instance ``(g, D, x, eps, a)``: support density beta, the
order bound r from ``beta >= 1/r + eps``, a distance scan over all characters
mod D to find the exceptional ones, the truncated orthogonality
decomposition, and the error envelope it should fall under.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .characters import DirichletCharacter, build_group, enumerate_characters
from .distance import char_delta, g_objective, minimize_objective, window_L
from .multiplicative import MultiplicativeFunction, SupportSet, coprime_sum, progression_sum, twisted_sum
from .primes import PrimeTable

ORDER_CAP = 12
NORMALIZATIONS = ("phi", "D")


def support_density(S: SupportSet, table: PrimeTable, D: int, x: int) -> float:
    """``beta = L^{-1} sum_{p in S} 1/p`` with L the prime mass of (D, x]."""
    L = window_L(table, D, x)
    if L <= 0:
        raise ValueError("empty prime window: L = 0")
    p = table.primes[S.mask]
    if p.size and (p.min() <= D or p.max() > x):
        raise ValueError("support set is not contained in the window")
    return min(1.0, S.mass() / L)


def select_order_bound(beta: float, eps: float, cap: int = ORDER_CAP) -> int | None:
    """Least ``r >= 2`` with ``beta >= 1/r + eps``; None when no ``r <= cap`` qualifies."""
    if not 0 < eps <= 0.25:
        raise ValueError("eps must lie in (0, 1/4]")
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1]")
    for r in range(2, cap + 1):
        if beta >= 1 / r + eps:
            return r
    return None


def omega(r: int, eps: float) -> float:
    return 0.25 * min(1 / r**3, eps**2 / r)


@dataclass
class CharacterScan:
    chi: DirichletCharacter
    t: float
    distance: float

    def row(self) -> dict:
        return {"chi_index": self.chi.index, "exponents": list(self.chi.exponents),
                "order": self.chi.order, "t": self.t, "distance": self.distance}


@dataclass
class ExceptionalScan:
    D: int
    x: int
    eps: float
    B: float
    delta: float
    L: float
    threshold: float
    beta: float
    r: int | None
    scans: list[CharacterScan]
    exceptional: list[CharacterScan]
    chi1: CharacterScan
    violations: list[tuple[int, int]] = field(default_factory=list)  # index pairs with order >= r

    @property
    def closed(self) -> bool:
        return not self.violations


def find_exceptional(
    g: MultiplicativeFunction,
    D: int,
    x: int,
    eps: float,
    B: float = 1.0,
    table: PrimeTable | None = None,
    delta: float | None = None,
    cap: int = ORDER_CAP,
) -> ExceptionalScan:
    """Minimise the g-distance over ``|t| <= D^B`` for every character mod D.

    A character is exceptional when its minimised distance is at most
    ``delta L / 4`` (``delta = eps^2 / 2`` unless given). Pairs of exceptional
    characters whose quotient has order ``>= r`` are recorded as violations.
    """
    table = table or g.table
    if not (2 <= D <= x <= table.limit):
        raise ValueError("need 2 <= D <= x <= table limit")
    delta = eps**2 / 2 if delta is None else delta
    S = g.support_in(D, x)
    L = window_L(table, D, x)
    beta = support_density(S, table, D, x)
    r = select_order_bound(beta, eps, cap)
    T = float(D) ** B
    scans = []
    for chi in enumerate_characters(build_group(D)):
        res = minimize_objective(g_objective(g, chi, D, x), T)
        scans.append(CharacterScan(chi, res.t, res.value))
    threshold = delta * L / 4
    exc = sorted((s for s in scans if s.distance <= threshold), key=lambda s: (s.distance, s.chi.index))
    chi1 = min(scans, key=lambda s: (s.distance, s.chi.index))
    viol = []
    if r is not None:
        for i, a in enumerate(exc):
            for b in exc[i + 1 :]:
                if (a.chi * b.chi.conjugate()).order >= r:
                    viol.append((a.chi.index, b.chi.index))
    return ExceptionalScan(D, x, eps, B, delta, L, threshold, beta, r, scans, exc, chi1, viol)


@dataclass
class Decomposition:
    progression: complex
    main: complex
    terms: list[complex]
    residual: complex
    remainder: complex  # (1/phi) sum over the omitted non-principal characters
    audit_error: float

    @property
    def audit_ok(self) -> bool:
        scale = max(1.0, abs(self.progression), abs(self.main))
        return self.audit_error <= 1e-9 * scale


def decompose(
    g: MultiplicativeFunction,
    D: int,
    a: int,
    x: int,
    exceptional: list[DirichletCharacter],
) -> Decomposition:
    """Main term plus exceptional character terms; the residual is audited
    against the omitted part of the full orthogonality expansion."""
    if math.gcd(a, D) != 1:
        raise ValueError(f"a={a} must be coprime to D={D}")
    a %= D
    G = build_group(D)
    phi = G.phi
    prog = progression_sum(g, x, D, a)
    main = coprime_sum(g, x, D) / phi
    exc = [c for c in exceptional if not c.is_principal]
    exc_set = set(exc)
    terms = [c.conjugate().evaluate(a) * twisted_sum(g, c, 0.0, x) / phi for c in exc]
    residual = prog - main - sum(terms, 0j)
    rest = [c for c in enumerate_characters(G) if not c.is_principal and c not in exc_set]
    remainder = sum((c.conjugate().evaluate(a) * twisted_sum(g, c, 0.0, x) for c in rest), 0j) / phi
    return Decomposition(prog, main, terms, residual, remainder, abs(residual - remainder))


@dataclass
class Envelope:
    value: float
    omega: float
    product: float
    normalization: str
    case_form: float | None = None  # closed form for r = 2 or 3
    case_exponent: float | None = None


def error_envelope(
    beta: float,
    r: int,
    eps: float,
    D: int,
    x: int,
    S: SupportSet,
    normalization: str = "phi",
    table: PrimeTable | None = None,
) -> Envelope:
    """``norm^{-1} (x/log x) prod_{p<=x, p in S}(1+1/p) (log D/log x)^{omega_r} log(log x/log D)``."""
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    if not (2 <= D and D <= x**0.75):
        raise ValueError(f"need 2 <= D <= x^(3/4); D={D}, x={x}")
    table = table or S.table
    norm = build_group(D).phi if normalization == "phi" else D
    w = omega(r, eps)
    keep = S.mask & (table.primes <= x)
    prod = float(np.exp(np.sum(np.log1p(table.reciprocals[keep]))))
    lx, lD = math.log(x), math.log(D)
    ll = math.log(lx / lD)
    value = (x / lx) * prod * (lD / lx) ** w * ll / norm
    case_form = case_exp = None
    if r in (2, 3):
        case_exp = 1 - beta + eps**2 / (8 if r == 2 else 12)
        case_form = (x / norm) * (lD / lx) ** case_exp * ll / lD
    return Envelope(value, w, prod, normalization, case_form, case_exp)


@dataclass
class RealRefinement:
    exceptional: list[CharacterScan]
    chi1: DirichletCharacter | None
    flags: list[str]
    squared_checks: list[dict]


def real_g_refinement(
    g: MultiplicativeFunction,
    scan: ExceptionalScan,
    table: PrimeTable | None = None,
) -> RealRefinement:
    """Adjust the exceptional set for real-valued g.

    r = 2: keep a single exceptional character and make it real when some
    real character also clears the threshold. r = 3: drop the leading
    character, leaving only real characters. For every exceptional
    ``(chi, t)`` the squared character is checked at twist ``-2t``:
    ``sum |1 - chi(p)^2 p^{-2it}|^2 / p <= 4 * g_delta``.
    """
    table = table or g.table
    D, x = scan.D, scan.x
    S = g.support_in(D, x)
    if np.any(g.prime_values[S.mask].imag != 0):
        raise ValueError("g must be real-valued on its support")
    flags: list[str] = []
    checks = []
    for s in scan.exceptional:
        sq = char_delta(S, s.chi * s.chi, -2 * s.t, table, D, x).raw
        checks.append({
            "chi_index": s.chi.index, "t": s.t, "g_distance": s.distance, "squared_distance": sq,
            "pointwise_ok": sq <= 4 * s.distance + 1e-9,
            "delta_ok": sq <= scan.delta * scan.L + 1e-9,
        })
    exc = list(scan.exceptional)
    chi1 = exc[0].chi if exc else None
    if not exc:
        return RealRefinement([], None, flags, checks)
    if scan.r == 2:
        real = [s for s in exc if s.chi.is_real]
        if exc[0].chi.is_real:
            exc = [exc[0]]
        elif real:
            exc = [real[0]]
            flags.append("chi1_replaced_by_real")
        else:
            exc = [exc[0]]
            flags.append("no_real_replacement")
        chi1 = exc[0].chi
    elif scan.r == 3:
        exc = [s for s in exc if s.chi.is_real and not s.chi.is_principal]
        chi1 = None
        flags.append("chi1_deleted")
    return RealRefinement(exc, chi1, flags, checks)


@dataclass
class TaxonomyReport:
    g: dict
    D: int
    x: int
    eps: float
    B: float
    a: int
    beta: float
    r: int | None
    omega: float | None
    delta: float
    threshold: float
    exceptional: list[CharacterScan]
    chi1: CharacterScan
    main: complex
    terms: list[complex]
    residual: complex
    audit_error: float
    audit_ok: bool
    envelope: float | None
    case_envelope: float | None
    normalization: str
    ratio: float | None
    closed: bool
    violations: list[tuple[int, int]]
    scans: list[CharacterScan]
    refinement: RealRefinement | None = None

    def to_json(self) -> dict:
        cx = lambda z: [z.real, z.imag]  # noqa: E731
        out = {
            "g": self.g, "D": self.D, "x": self.x, "eps": self.eps, "B": self.B, "a": self.a,
            "beta": self.beta, "r": self.r, "omega": self.omega, "delta": self.delta,
            "threshold": self.threshold,
            "exceptional": [s.row() for s in self.exceptional],
            "chi1": self.chi1.row(),
            "main": cx(self.main), "terms": [cx(z) for z in self.terms], "residual": cx(self.residual),
            "residual_abs": abs(self.residual),
            "audit_error": self.audit_error, "audit_ok": self.audit_ok,
            "envelope": self.envelope, "case_envelope": self.case_envelope,
            "normalization": self.normalization, "ratio": self.ratio,
            "closed": self.closed, "violations": [list(v) for v in self.violations],
        }
        if self.refinement is not None:
            out["refinement"] = {
                "exceptional": [s.row() for s in self.refinement.exceptional],
                "chi1": self.refinement.chi1.to_json() if self.refinement.chi1 else None,
                "flags": self.refinement.flags,
                "squared_checks": self.refinement.squared_checks,
            }
        return out


def taxonomy_report(
    g: MultiplicativeFunction,
    D: int,
    x: int,
    eps: float,
    a: int,
    B: float = 1.0,
    normalization: str = "phi",
    delta: float | None = None,
    refine_real: bool = False,
) -> TaxonomyReport:
    table = g.table
    scan = find_exceptional(g, D, x, eps, B, table, delta)
    exc_chis = [s.chi for s in scan.exceptional]
    dec = decompose(g, D, a, x, exc_chis)
    env = None
    if scan.r is not None:
        support = SupportSet(table, g.prime_values != 0)
        env = error_envelope(scan.beta, scan.r, eps, D, x, support, normalization, table)
    refinement = real_g_refinement(g, scan, table) if refine_real and g.is_real else None
    return TaxonomyReport(
        g=g.to_json(), D=D, x=x, eps=eps, B=B, a=a,
        beta=scan.beta, r=scan.r, omega=omega(scan.r, eps) if scan.r else None,
        delta=scan.delta, threshold=scan.threshold,
        exceptional=scan.exceptional, chi1=scan.chi1,
        main=dec.main, terms=dec.terms, residual=dec.residual,
        audit_error=dec.audit_error, audit_ok=dec.audit_ok,
        envelope=env.value if env else None,
        case_envelope=env.case_form if env else None,
        normalization=normalization,
        ratio=abs(dec.residual) / env.value if env else None,
        closed=scan.closed, violations=scan.violations, scans=scan.scans,
        refinement=refinement,
    )
