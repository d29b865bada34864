"""Pretentious distances between multiplicative functions and twisted characters.

Sign conventions (pinned by tests):

* :func:`char_delta` -- ``sum_{p in S} |1 - chi(p) p^{+it}|^2 / p``
* :func:`g_delta` -- ``sum_{p in S} |1 - g(p) chi(p) p^{-it}|^2 / p``
* ``halasz`` objective -- ``sum_{Y < p <= x} (1 - Re g(p) p^{+it}) / p``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .characters import DirichletCharacter
from .multiplicative import MultiplicativeFunction, SupportSet
from .primes import PrimeTable, reciprocal_sum
from .scan import LocalExpansion, golden_section, grid_sums, symmetric_grid

REFINE_TOL = 1e-6


@dataclass
class DistanceProfile:
    chi: DirichletCharacter
    t: float
    raw: float
    L: float
    window: tuple[int, int]
    weighted: bool = False
    mass: float | None = None  # weighted support mass, weighted profiles only

    @property
    def valid(self) -> bool:
        return self.L > 0

    @property
    def delta(self) -> float:
        """``raw / L``; +inf when the prime window is empty."""
        return self.raw / self.L if self.L > 0 else math.inf

    def to_json(self) -> dict:
        return {
            "chi": self.chi.to_json(),
            "t": self.t,
            "raw": self.raw,
            "L": self.L,
            "delta": self.delta if self.valid else None,
            "valid": self.valid,
            "window": list(self.window),
            "weighted": self.weighted,
            "mass": self.mass,
        }


def window_L(table: PrimeTable, D: int, x: int) -> float:
    if not (1 <= D <= x <= table.limit):
        raise ValueError(f"need 1 <= D <= x <= {table.limit}")
    return reciprocal_sum(table, max(D, 2), x) if x >= 2 else 0.0


@dataclass
class Objective:
    """``sum_p w_p * phi(c_p exp(i sign t u_p))`` over a fixed prime set.

    ``kind="sq"`` uses ``phi(z) = |1 - z|^2``, ``kind="re"`` uses
    ``phi(z) = 1 - Re z``.
    """

    u: np.ndarray
    c: np.ndarray
    w: np.ndarray
    sign: int = 1
    kind: str = "sq"
    top: float = 0.0  # log of the range top; sets the grid step
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("sq", "re"):
            raise ValueError("kind must be 'sq' or 're'")
        if not self.top:
            self.top = float(self.u.max()) if self.u.size else 1.0

    @property
    def step(self) -> float:
        return 0.5 / self.top

    def value(self, t: float) -> float:
        z = self.c * np.exp(1j * self.sign * t * self.u)
        if self.kind == "sq":
            d = 1 - z
            return float(np.sum(self.w * (d.real**2 + d.imag**2)))
        return float(np.sum(self.w * (1 - z.real)))

    __call__ = value

    # value(t) = const - kappa * Re F(t),  F(t) = sum a_p exp(i sign t u_p)
    @property
    def _kappa(self) -> float:
        return 2.0 if self.kind == "sq" else 1.0

    @property
    def _const(self) -> float:
        if self.kind == "sq":
            return float(np.sum(self.w * (1 + np.abs(self.c) ** 2)))
        return float(np.sum(self.w))

    @property
    def _coef(self) -> np.ndarray:
        return self.w * self.c

    def scan(self, T: float, method: str = "auto") -> tuple[np.ndarray, np.ndarray]:
        """Objective values on the symmetric grid of step ``0.5 / log x``."""
        ts = symmetric_grid(T, self.step)
        K = (len(ts) - 1) // 2
        F = grid_sums(self.u, self._coef, self.step, K, self.sign, method)
        return ts, self._const - self._kappa * F.real

    def local(self, t0: float, radius: float):
        exp = LocalExpansion(self.u, self._coef, t0, self.sign, radius)
        const, kappa = self._const, self._kappa
        return lambda h: const - kappa * exp(h).real


@dataclass
class MinResult:
    t: float
    value: float
    grid_t: np.ndarray = field(repr=False)
    grid_values: np.ndarray = field(repr=False)

    def grid_rows(self):
        return list(zip(self.grid_t.tolist(), self.grid_values.tolist()))


def _pick(ts: np.ndarray, vals: np.ndarray, scale: float) -> int:
    """Grid argmin; near-ties go to smaller |t|, then smaller t."""
    m = float(np.min(vals))
    cand = np.flatnonzero(vals <= m + 1e-12 * max(scale, 1.0))
    order = np.lexsort((ts[cand], np.abs(ts[cand])))
    return int(cand[order[0]])


def minimize_objective(obj: Objective, T: float, tol: float = REFINE_TOL, method: str = "auto") -> MinResult:
    """Grid scan on ``[-T, T]`` then golden-section refinement of the winner."""
    ts, vals = obj.scan(T, method)
    i = _pick(ts, vals, float(np.sum(np.abs(obj.w))))
    tg = float(ts[i])
    step = obj.step
    lo, hi = max(-T, tg - step), min(T, tg + step)
    best_t, best_v = tg, obj.value(tg)
    if obj.u.size and hi > lo:
        f = obj.local(tg, step)
        t_ref, _ = golden_section(lambda t: f(t - tg), lo, hi, tol)
        v_ref = obj.value(t_ref)
        if v_ref < best_v:
            best_t, best_v = t_ref, v_ref
    v0 = obj.value(0.0)
    if v0 <= best_v:
        best_t, best_v = 0.0, v0
    return MinResult(best_t, best_v, ts, vals)


# -- objective builders ---------------------------------------------------------


def _window_arrays(table: PrimeTable, mask: np.ndarray):
    return table.primes[mask], table.logs[mask], table.reciprocals[mask]


def _check_window(S: SupportSet, table: PrimeTable, D: int, x: int):
    if x > table.limit:
        raise ValueError(f"x={x} exceeds table limit {table.limit}")
    p = table.primes[S.mask]
    if p.size and (p.min() <= D or p.max() > x):
        raise ValueError(f"support set is not contained in ({D}, {x}]")
    L = window_L(table, D, x)
    if L == 0 and p.size:
        raise ValueError("empty prime window with non-empty support")
    return L


def char_objective(S: SupportSet, chi: DirichletCharacter, table: PrimeTable, x: int) -> Objective:
    p, u, w = _window_arrays(table, S.mask)
    return Objective(u, chi.at(p), w, +1, "sq", math.log(max(x, 3)), "char_delta")


def g_objective(g: MultiplicativeFunction, chi: DirichletCharacter, D: int, x: int) -> Objective:
    S = g.support_in(D, x)
    table = g.table
    p, u, w = _window_arrays(table, S.mask)
    c = g.prime_values[S.mask] * chi.at(p)
    return Objective(u, c, w, -1, "sq", math.log(max(x, 3)), "g_delta")


def halasz_objective(g: MultiplicativeFunction, Y: float, x: int) -> Objective:
    table = g.table
    sl = table.prime_slice(Y, x)
    return Objective(
        table.logs[sl], g.prime_values[sl], table.reciprocals[sl], +1, "re", math.log(max(x, 3)), "halasz_m"
    )


# -- profiles -------------------------------------------------------------------------


def char_delta(S: SupportSet, chi: DirichletCharacter, t: float, table: PrimeTable, D: int, x: int) -> DistanceProfile:
    """``sum_{p in S} |1 - chi(p) p^{it}|^2 / p`` and its normalisation by L."""
    L = _check_window(S, table, D, x)
    raw = char_objective(S, chi, table, x).value(t)
    return DistanceProfile(chi, t, raw, L, (D, x))


def g_delta(g: MultiplicativeFunction, chi: DirichletCharacter, t: float, table: PrimeTable, D: int, x: int) -> DistanceProfile:
    """``sum_{p in S} |1 - g(p) chi(p) p^{-it}|^2 / p`` with S the support of g in (D, x]."""
    L = window_L(table, D, x)
    raw = g_objective(g, chi, D, x).value(t)
    return DistanceProfile(chi, t, raw, L, (D, x))


def weighted_delta(
    g: MultiplicativeFunction,
    chi: DirichletCharacter,
    t: float,
    table: PrimeTable,
    D: int,
    x: int,
    mode: str = "char-weighted",
) -> DistanceProfile:
    """Distances weighted by ``|g(p)|``.

    ``char-weighted``: ``sum_{D<p<=x} |g(p)| |1 - chi(p) p^{it}|^2 / p``.
    ``self-normalized``: ``sum_{D<p<=x, g(p) != 0} |g(p)| |1 - (g(p)/|g(p)|) chi(p) p^{-it}|^2 / p``.
    The profile's ``mass`` is ``sum_{D<p<=x} |g(p)| / p``.
    """
    L = window_L(table, D, x)
    sl = table.prime_slice(D, x)
    gp = g.prime_values[sl]
    nz = gp != 0
    p = table.primes[sl][nz]
    u = table.logs[sl][nz]
    mod = np.abs(gp[nz])
    w = table.reciprocals[sl][nz] * mod
    if mode == "char-weighted":
        obj = Objective(u, chi.at(p), w, +1, "sq")
    elif mode == "self-normalized":
        obj = Objective(u, gp[nz] / mod * chi.at(p), w, -1, "sq")
    else:
        raise ValueError("mode must be 'char-weighted' or 'self-normalized'")
    raw = obj.value(t) if u.size else 0.0
    return DistanceProfile(chi, t, raw, L, (D, x), weighted=True, mass=float(np.sum(w)))


def minimize_over_t(objective: Objective, T: float, tol: float = REFINE_TOL, require_T2: bool = False) -> MinResult:
    if require_T2 and T < 2:
        raise ValueError("T must be >= 2")
    if T < 0:
        raise ValueError("T must be non-negative")
    return minimize_objective(objective, T, tol)


def halasz_m(g: MultiplicativeFunction, Y: float, x: int, T: float) -> MinResult:
    """``min_{|t| <= T} sum_{Y < p <= x} (1 - Re g(p) p^{it}) / p``."""
    return minimize_over_t(halasz_objective(g, Y, x), T, require_T2=True)


@dataclass
class HalaszResult:
    bound: float
    actual: float
    ratio: float
    m: float
    t: float
    partial_sum: complex

    def to_json(self) -> dict:
        return {
            "bound": self.bound, "actual": self.actual, "ratio": self.ratio,
            "m": self.m, "t": self.t,
            "partial_sum": [self.partial_sum.real, self.partial_sum.imag],
        }


def halasz_bound(g: MultiplicativeFunction, Y: float, x: int, T: float, table: PrimeTable | None = None) -> HalaszResult:
    """Both sides of the Halasz-type bound and their ratio (the empirical constant)."""
    table = table or g.table
    if not (1.5 <= Y <= x <= table.limit):
        raise ValueError("need 3/2 <= Y <= x <= table limit")
    if T < 2:
        raise ValueError("T must be >= 2")
    p = table.primes
    live = (g.prime_values != 0) & (p <= x)
    if np.any(live & (p <= Y)):
        raise ValueError(f"g(p) must vanish on primes outside ({Y}, {x}]")
    res = halasz_m(g, Y, x, T)
    m = res.value
    bound = (m + 1) * math.exp(-m) + T**-0.5
    total = complex(np.sum(g.values(x)))
    actual = abs(total) * math.log(Y) / x
    return HalaszResult(bound, actual, actual / bound, m, res.t, total)
