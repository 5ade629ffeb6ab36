"""Shifted convolution sums of Hecke eigenvalues and the companion
Dirichlet series in its half-plane of absolute convergence.

All finite sums accumulate with math.fsum in fixed ascending order, so
results are exactly rounded and reproducible regardless of chunking.
"""

from __future__ import annotations

import math

import numpy as np

from .arith import divisor_count
from .errors import TableLengthError
from .modforms import HeckeEigenform
from .windows import Window


def sharp_sum(f: HeckeEigenform, x: float, h: int) -> float:
    """sum over n <= x of lam(n) lam(n+h)."""
    if h < 1:
        raise ValueError(f"shift must be >= 1, got {h}")
    n_hi = math.floor(x)
    if n_hi < 1:
        return 0.0
    f.require(n_hi + h, "sharp_sum")
    prods = f.lam[1 : n_hi + 1] * f.lam[1 + h : n_hi + h + 1]
    return math.fsum(prods.tolist())


def weighted_sum(f: HeckeEigenform, x: float, h: int) -> float:
    """sum over n + h <= x of lam(n+h) lam(n) (n/(n+h))^((k-1)/2)."""
    if h < 1:
        raise ValueError(f"shift must be >= 1, got {h}")
    n_hi = math.floor(x) - h
    if n_hi < 1:
        return 0.0
    f.require(n_hi + h, "weighted_sum")
    n = np.arange(1, n_hi + 1, dtype=np.float64)
    w = (n / (n + h)) ** ((f.k - 1) / 2.0)
    prods = f.lam[1 + h : n_hi + h + 1] * f.lam[1 : n_hi + 1] * w
    return math.fsum(prods.tolist())


def smooth_range(x: float, h: int, window: Window) -> tuple[int, int]:
    """Integer n-range where W((n + h/2)/x) can be nonzero."""
    lo = max(1, math.ceil(window.a_w * x - h / 2.0))
    hi = math.floor(window.A_w * x - h / 2.0)
    return lo, hi


def smooth_sum(f: HeckeEigenform, x: float, h: int, window: Window) -> float:
    """sum over n of lam(n) lam(n+h) W((n + h/2)/x); W compactly supported."""
    if h < 1:
        raise ValueError(f"shift must be >= 1, got {h}")
    needed = math.ceil(window.A_w * x) + h
    f.require(needed, "smooth_sum")
    lo, hi = smooth_range(x, h, window)
    if hi < lo:
        return 0.0
    n = np.arange(lo, hi + 1)
    wv = window.eval_many((n + h / 2.0) / x)
    prods = f.lam[lo : hi + 1] * f.lam[lo + h : hi + h + 1] * wv
    return math.fsum(prods.tolist())


def _d4_tail(sigma: float, n_from: int) -> float:
    """Upper bound for sum_{n > n_from} d4(n) n^-sigma (d4 = 4-fold divisor).

    From the elementary bound sum_{n<=x} d4(n) <= x (1 + ln x)^3 by partial
    summation; requires sigma > 1.
    """
    t0 = (sigma - 1.0) * (1.0 + math.log(n_from))
    gamma4 = math.exp(-t0) * (t0**3 + 3 * t0**2 + 6 * t0 + 6)
    return sigma * math.exp(sigma - 1.0) / (sigma - 1.0) ** 4 * gamma4


def dirichlet_series(
    f: HeckeEigenform, s: complex, h: int, n_terms: int
) -> tuple[complex, float]:
    """Partial sum of sum_{m-n=h} lam(m) lam(n) (nm)^((k-1)/2) / (n+m+h)^(s+k-1)
    together with a rigorous tail bound (from |lam(n)| <= d(n) <= d4 control).

    Only the half-plane of absolute convergence Re(s) > 1 is supported.
    """
    s = complex(s)
    if s.real <= 1.0:
        raise ValueError(
            f"dirichlet_series needs Re(s) > 1 (absolute convergence), got {s}"
        )
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    f.require(n_terms + h, "dirichlet_series")
    k = f.k
    n = np.arange(1, n_terms + 1, dtype=np.float64)
    m = n + h
    lam_prod = f.lam[1 + h : n_terms + h + 1] * f.lam[1 : n_terms + 1]
    log_mag = 0.5 * (k - 1) * (np.log(n) + np.log(m)) - (s.real + k - 1) * np.log(
        n + m + h
    )
    phase = -s.imag * np.log(n + m + h)
    vals = lam_prod * np.exp(log_mag) * (np.cos(phase) + 1j * np.sin(phase))
    value = complex(math.fsum(vals.real.tolist()), math.fsum(vals.imag.tolist()))
    sigma = s.real
    log_tail = -(sigma + k - 1) * math.log(2.0) + math.log(_d4_tail(sigma, n_terms))
    tail = math.exp(log_tail) if log_tail > -700 else 0.0
    tail = math.nextafter(tail, math.inf) if tail == 0.0 else tail * (1 + 1e-12)
    return value, tail


def rankin_statistic(f: HeckeEigenform, x: float) -> float:
    """sum over n <= x of lam(n)^2 (monotone non-decreasing in x)."""
    n_hi = math.floor(x)
    if n_hi < 1:
        return 0.0
    f.require(n_hi, "rankin_statistic")
    sq = f.lam[1 : n_hi + 1] ** 2
    return math.fsum(sq.tolist())


def eigenvalue_divisor_gap(f: HeckeEigenform, n_max: int | None = None) -> float:
    """max over n of |lam(n)| - d(n); <= 0 up to rounding for true eigenforms."""
    n_hi = n_max or f.n_max
    f.require(n_hi, "eigenvalue_divisor_gap")
    worst = -math.inf
    for n in range(1, n_hi + 1):
        worst = max(worst, abs(float(f.lam[n])) - divisor_count(n))
    return worst
