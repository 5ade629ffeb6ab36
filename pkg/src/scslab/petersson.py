"""Petersson norms, symmetric-square L-values by three independent routes,
and the trace-formula evaluator with certified off-diagonal tails.

The norm-identity constant (pi/2) (4 pi)^k / Gamma(k) follows from the
Rankin-Selberg unfolding with residue 3/pi for the level-1 Eisenstein
series; it is gated behind the three-route agreement check rather than
trusted blindly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np

from .arith import divisor_count, factorize
from .bessel import bessel_j_many, bessel_tail_bound, smallest_tail_cutoff
from .errors import RouteDisagreementError, TableLengthError
from .kloosterman import KloostermanTable, default_table
from .modforms import HeckeEigenform

ZETA2 = math.pi**2 / 6.0

SYM2_METHODS = ("norm-identity", "smoothed-series", "rankin-slope")


# -- Petersson norm by fundamental-domain quadrature --------------------------


def _qexp_terms_needed(k: int, tol: float) -> int:
    """Terms so the q-expansion tail at y = sqrt(3)/2 is below tol relative."""
    y0 = math.sqrt(3.0) / 2.0
    target = math.log(tol) - 2.0 * math.pi * y0 - 12.0
    m = 8
    while True:
        # |a(m)| e^{-2 pi m y0} with |a(m)| <= d(m) m^((k-1)/2)
        if 0.5 * (k + 1) * math.log(m) - 2.0 * math.pi * m * y0 < target:
            return m
        m += 4


def _norm_integral(f: HeckeEigenform, m_terms: int, nx: int, ny_per_octave: int) -> float:
    """Scaled integral over the half fundamental domain (x in [0, 1/2])."""
    k = f.k
    n = np.arange(1, m_terms + 1, dtype=np.float64)
    a = f.lam[1 : m_terms + 1] * n ** ((k - 1) / 2.0)
    y_peak = max(k / (4.0 * math.pi), 1.0)
    log_scale = (k - 2.0) * math.log(y_peak) - 4.0 * math.pi * y_peak
    y_top = y_peak
    while (k - 2.0) * math.log(y_top) - 4.0 * math.pi * y_top - log_scale > -46.0:
        y_top *= 1.25
    xs, wx = np.polynomial.legendre.leggauss(nx)
    xs = 0.25 * (xs + 1.0)  # [0, 1/2]
    wx = 0.25 * wx
    yn, wy = np.polynomial.legendre.leggauss(12)
    total = 0.0
    for x, weight_x in zip(xs, wx):
        y_lo = math.sqrt(1.0 - x * x)
        edges = [y_lo]
        while edges[-1] < y_top:
            edges.append(edges[-1] * 2.0 ** (1.0 / ny_per_octave))
        col = 0.0
        phase = np.exp(2j * math.pi * x * n)
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
            yv = mid + half * yn
            # f(x+iy) e^{2 pi y}: Horner-free direct sum, m_terms is small
            decay = np.exp(-2.0 * math.pi * np.outer(yv, n - 1.0))
            fv = decay @ (a * phase)
            integrand = np.exp(
                (k - 2.0) * np.log(yv) - 4.0 * math.pi * yv - log_scale
            ) * np.abs(fv) ** 2
            col += half * float(np.dot(wy, integrand))
        total += weight_x * col
    return 2.0 * total, log_scale  # doubled for x-symmetry


def petersson_norm_log(f: HeckeEigenform, tol: float = 1e-8) -> float:
    """log of the Petersson inner product <f, f> over the fundamental domain."""
    if not 0 < tol < 1:
        raise ValueError(f"tolerance must be in (0,1), got {tol}")
    m_terms = _qexp_terms_needed(f.k, tol)
    if f.n_max < m_terms:
        raise TableLengthError(
            f"petersson_norm at tol={tol} needs eigenvalues up to n={m_terms}",
            required=m_terms,
        )
    prev = None
    for level in (1, 2, 3, 4):
        nx = 16 * 2**level
        val, log_scale = _norm_integral(f, m_terms, nx, 4 * level)
        if prev is not None and abs(val - prev) <= 0.25 * tol * abs(val):
            return math.log(val) + log_scale
        prev = val
    raise ArithmeticError(
        f"fundamental-domain quadrature did not stabilize at tol={tol} for k={f.k}"
    )


def petersson_norm(f: HeckeEigenform, tol: float = 1e-8) -> float:
    """<f, f>; overflows for very large weights (use the log form there)."""
    log_norm = petersson_norm_log(f, tol)
    if log_norm > 700.0:
        raise OverflowError(
            f"Petersson norm of weight {f.k} exceeds float64 range; "
            f"use petersson_norm_log"
        )
    return math.exp(log_norm)


# -- symmetric-square L-value --------------------------------------------------


def _lam_prime_power(f: HeckeEigenform, p: int, m: int) -> float:
    vals = [1.0, float(f.lam[p])]
    while len(vals) <= m:
        vals.append(vals[1] * vals[-1] - vals[-2])
    return vals[m]


def lam_at_square(f: HeckeEigenform, m: int) -> float:
    """lam(m^2) through the Hecke recursion at prime powers (needs p <= m)."""
    f.require(m, "lam_at_square")
    out = 1.0
    for p, e in factorize(m).items():
        out *= _lam_prime_power(f, p, 2 * e)
    return out


def sym2_coefficients(f: HeckeEigenform, m_terms: int) -> np.ndarray:
    """Dirichlet coefficients of zeta(2s) * sum lam(n^2) n^-s, indices 0..m."""
    lam_sq = np.zeros(m_terms + 1)
    for m in range(1, m_terms + 1):
        lam_sq[m] = lam_at_square(f, m)
    c = np.zeros(m_terms + 1)
    for n in range(1, m_terms + 1):
        a = 1
        while a * a <= n:
            if n % (a * a) == 0:
                c[n] += lam_sq[n // (a * a)]
            a += 1
    return c


_AFE_CLINE = 2.0
_AFE_WIDTH = 1.5
_AFE_T = 12.0
_AFE_DT = 0.15


@lru_cache(maxsize=None)
def _afe_kernels(k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gaussian-smoothed Mellin kernels of the completed L-function at s=1.

    gamma(s) = Gamma_R(s+1) Gamma_R(s+k-1) Gamma_R(s+k); values are returned
    relative to gamma(1) so the integrand is O(1) along the contour.
    """
    ts = np.arange(-_AFE_T, _AFE_T + 1e-9, _AFE_DT)
    with mp.workdps(40):
        def log_gamma_factor(s):
            return sum(mp.loggamma((s + d) / 2) for d in (1, k - 1, k)) - mp.mpf(
                3
            ) / 2 * s * mp.log(mp.pi)

        ref = log_gamma_factor(mp.mpf(1))
        g1 = []
        g0 = []
        for t in ts:
            w = mp.mpc(_AFE_CLINE, t)
            smooth = w * w / _AFE_WIDTH
            g1.append(complex(mp.e ** (log_gamma_factor(w + 1) - ref + smooth) / w))
            g0.append(complex(mp.e ** (log_gamma_factor(w) - ref + smooth) / w))
    return ts, np.array(g1), np.array(g0)


def _sym2_smoothed_series(f: HeckeEigenform, tol: float) -> float:
    m_terms = min(f.n_max, 1500)
    if m_terms < 300:
        raise TableLengthError(
            "smoothed-series route needs eigenvalues to n >= 300", required=300
        )
    c = sym2_coefficients(f, m_terms)
    ts, g1, g0 = _afe_kernels(f.k)
    ns = np.arange(1, m_terms + 1, dtype=np.float64)
    xw = np.exp(-np.log(ns)[:, None] * (_AFE_CLINE + 1j * ts[None, :]))
    f1 = (xw @ g1).real * _AFE_DT / (2.0 * math.pi)
    f0 = (xw @ g0).real * _AFE_DT / (2.0 * math.pi)
    return float(np.sum(c[1:] / ns * f1) + np.sum(c[1:] * f0))


def _sym2_norm_identity(f: HeckeEigenform, tol: float) -> float:
    log_norm = petersson_norm_log(f, tol=min(tol, 1e-8))
    k = f.k
    return math.exp(
        math.log(math.pi / 2.0) + k * math.log(4.0 * math.pi) + log_norm - math.lgamma(k)
    )


def _sym2_rankin_slope(f: HeckeEigenform, tol: float) -> float:
    """zeta(2) times the least-squares slope of the Rankin partial sums over a
    geometric grid; desk-scale accuracy is a few parts in 10^4 at best."""
    if f.n_max < 512:
        raise TableLengthError(
            "rankin-slope route needs eigenvalues to n >= 512", required=512
        )
    x_top = f.n_max
    grid = np.unique(
        (x_top * 2.0 ** (-np.arange(17)[::-1] / 2.0)).astype(np.int64)
    )
    cum = np.cumsum(f.lam[1:] ** 2)
    ys = cum[grid - 1]
    xs = grid.astype(np.float64)
    design = np.vstack([np.ones_like(xs), xs]).T
    coef, *_ = np.linalg.lstsq(design, ys, rcond=None)
    return float(coef[1]) * ZETA2


def sym2_L1(f: HeckeEigenform, method: str = "norm-identity", tol: float = 1e-6) -> float:
    """L(1, sym^2 f) by the requested route."""
    if method == "norm-identity":
        return _sym2_norm_identity(f, tol)
    if method == "smoothed-series":
        return _sym2_smoothed_series(f, tol)
    if method == "rankin-slope":
        return _sym2_rankin_slope(f, tol)
    raise ValueError(f"unknown method {method!r}; choose from {SYM2_METHODS}")


def sym2_L1_all(f: HeckeEigenform, tol: float = 1e-4) -> dict[str, float]:
    """All three routes; raises when they disagree beyond 10 * tol relative."""
    values = {m: sym2_L1(f, m, tol) for m in SYM2_METHODS}
    ref = values["norm-identity"]
    spread = max(abs(v - ref) for v in values.values()) / abs(ref)
    if spread > 10.0 * tol:
        raise RouteDisagreementError(
            f"sym2 L-value routes disagree by {spread:.2e} relative "
            f"(allowed {10 * tol:.2e}) for weight {f.k}",
            values,
        )
    return values


def attach_lvalues(f: HeckeEigenform, tol: float = 1e-8) -> HeckeEigenform:
    """Fill petersson_norm and sym2_l1 (norm-identity route) on a form."""
    log_norm = petersson_norm_log(f, tol)
    l1 = math.exp(
        math.log(math.pi / 2.0)
        + f.k * math.log(4.0 * math.pi)
        + log_norm
        - math.lgamma(f.k)
    )
    norm = math.exp(log_norm) if log_norm <= 700.0 else math.inf
    return f.with_lvalues(petersson_norm=norm, sym2_l1=l1)


# -- Petersson trace formula ---------------------------------------------------


@dataclass(frozen=True)
class TraceFormulaResult:
    """Right-hand side of the trace formula: diagonal Kronecker term plus the
    evaluated Kloosterman-Bessel sum up to c0 and a certified tail bound."""

    diagonal: float
    offdiagonal: float
    tail_bound: float
    c0: int

    @property
    def total(self) -> float:
        return self.diagonal + self.offdiagonal


def trace_formula_lhs(
    k: int,
    n1: int,
    n2: int,
    eigenforms: list[HeckeEigenform],
    l_values: list[float] | None = None,
) -> float:
    """(2 pi^2/(k-1)) sum over the Hecke basis of lam(n1) lam(n2) / L(1, sym^2)."""
    if l_values is None:
        l_values = []
        for f in eigenforms:
            if f.sym2_l1 is None:
                raise ValueError(
                    f"eigenform of weight {f.k} carries no sym2 L-value; attach one"
                )
            l_values.append(f.sym2_l1)
    if len(l_values) != len(eigenforms):
        raise ValueError("need exactly one L-value per eigenform")
    terms = [
        f.lam_at(n1) * f.lam_at(n2) / l for f, l in zip(eigenforms, l_values)
    ]
    return 2.0 * math.pi**2 / (k - 1.0) * math.fsum(terms)


def trace_formula_rhs(
    k: int,
    n1: int,
    n2: int,
    tol: float = 1e-8,
    c0: int | None = None,
    table: KloostermanTable | None = None,
) -> TraceFormulaResult:
    """delta_{n1,n2} + 2 pi (-1)^{k/2} sum_c S(n1,n2;c)/c J_{k-1}(4 pi sqrt(n1 n2)/c).

    The modulus sum stops at c0 (auto-chosen so the certified tail is below
    tol unless given) and the remainder is bounded rigorously.
    """
    if k % 2 or k < 4:
        raise ValueError(f"weight must be even and >= 4, got {k}")
    if n1 < 1 or n2 < 1:
        raise ValueError("indices must be >= 1")
    tbl = table or default_table()
    x_max = math.sqrt(n1 * n2)
    if c0 is None:
        c0 = max(1, smallest_tail_cutoff(k, x_max, tol / (2.0 * math.pi)))
    tail = 2.0 * math.pi * bessel_tail_bound(k, x_max, c0)
    cs = np.arange(1, c0 + 1, dtype=np.float64)
    jvals = bessel_j_many(k - 1, 4.0 * math.pi * x_max / cs)
    svals = np.array([tbl.value(n1, n2, c) for c in range(1, c0 + 1)])
    sign = -1.0 if (k // 2) % 2 else 1.0
    off = 2.0 * math.pi * sign * math.fsum((svals / cs * jvals).tolist())
    return TraceFormulaResult(
        diagonal=1.0 if n1 == n2 else 0.0,
        offdiagonal=off,
        tail_bound=tail,
        c0=c0,
    )
