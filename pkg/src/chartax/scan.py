"""Evaluation of prime Dirichlet polynomials ``sum_p a_p exp(i s t log p)`` over t.

Grid scans go through a type-1 non-uniform FFT (finufft) when the grid is
large, otherwise through a chunked direct sum. Refinement near a grid point
uses a local Taylor expansion in ``t``, which is exact to rounding because
the phase offset ``h log p`` never exceeds half a radian there.
"""

from __future__ import annotations

import math

import numpy as np

try:
    import finufft
except ImportError:  # pragma: no cover - declared dependency
    finufft = None

NUFFT_EPS = 1e-13
DIRECT_BUDGET = 200_000  # grid points x primes below which direct sums are used
_TAYLOR_TERMS = 24
_GOLDEN = (math.sqrt(5) - 1) / 2


def symmetric_grid(T: float, step: float) -> np.ndarray:
    """``k * step`` for ``|k * step| <= T``; always contains 0."""
    K = int(math.floor(T / step + 1e-12))
    return np.arange(-K, K + 1) * step


def direct_sum(u: np.ndarray, a: np.ndarray, t: float, sign: int = 1) -> complex:
    return complex(np.sum(a * np.exp(1j * sign * t * u)))


def grid_sums(u: np.ndarray, a: np.ndarray, step: float, K: int, sign: int = 1, method: str = "auto") -> np.ndarray:
    """``F(k step) = sum_j a_j exp(i sign k step u_j)`` for ``k = -K..K``.

    ``a`` may be 2-D (one row per coefficient vector); the result then has
    one row per input row.
    """
    a = np.asarray(a, dtype=np.complex128)
    single = a.ndim == 1
    A = a[None, :] if single else a
    n = 2 * K + 1
    if method == "auto":
        method = "nufft" if finufft is not None and n * u.size > DIRECT_BUDGET else "direct"
    if u.size == 0:
        out = np.zeros((A.shape[0], n), dtype=np.complex128)
    elif method == "nufft":
        xj = np.mod(step * u + np.pi, 2 * np.pi) - np.pi
        out = finufft.nufft1d1(
            xj, np.ascontiguousarray(A), n, eps=NUFFT_EPS, isign=int(np.sign(sign)),
            nthreads=1, modeord=0,
        )
        out = np.atleast_2d(out)
    elif method == "direct":
        ks = np.arange(-K, K + 1)
        out = np.empty((A.shape[0], n), dtype=np.complex128)
        chunk = max(1, DIRECT_BUDGET // max(u.size, 1))
        for s in range(0, n, chunk):
            ph = np.exp(1j * sign * step * np.outer(ks[s : s + chunk], u))
            out[:, s : s + chunk] = A @ ph.T
    else:
        raise ValueError(f"unknown method {method!r}")
    return out[0] if single else out


class LocalExpansion:
    """``F(t0 + h) = sum_j b_j exp(i sign h u_j)`` as a power series in ``h``.

    Valid for ``|h| * max(u) <= 1/2``; with 24 terms the truncation error
    is below ``1e-25`` times ``sum |b_j|``.
    """

    def __init__(self, u: np.ndarray, a: np.ndarray, t0: float, sign: int, radius: float):
        self.scale = float(u.max()) if u.size else 1.0
        if radius * self.scale > 0.5 + 1e-9:
            raise ValueError("expansion radius too large for the phase range")
        self.sign = sign
        b = a * np.exp(1j * sign * t0 * u)
        v = u / self.scale
        moments = np.empty(_TAYLOR_TERMS, dtype=np.complex128)
        pw = b.copy()
        for k in range(_TAYLOR_TERMS):
            moments[k] = np.sum(pw)
            pw *= v
        fact = np.array([math.factorial(k) for k in range(_TAYLOR_TERMS)], dtype=np.float64)
        self.coef = moments / fact

    def __call__(self, h: float) -> complex:
        z = 1j * self.sign * h * self.scale
        out = 0j
        for c in self.coef[::-1]:
            out = out * z + c
        return out


def golden_section(f, lo: float, hi: float, tol: float = 1e-6, max_iter: int = 200):
    """Minimise ``f`` on ``[lo, hi]`` to bracket width ``tol``.

    Returns ``(x, f(x))`` for the best point evaluated.
    """
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    best = (c, fc) if fc <= fd else (d, fd)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
            if fc < best[1]:
                best = (c, fc)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
            if fd < best[1]:
                best = (d, fd)
    return best
