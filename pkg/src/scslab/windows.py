"""Compactly supported test windows with derivatives and Sobolev norms.

Three families: the standard smooth bump exp(1 - 1/(1-t^2)) rescaled onto
[a_w, A_w], a C^1 raised-cosine spline, and the sharp cut-off indicator.
Bump derivatives use the closed rational recursion
P_{i+1} = (1-t^2)^2 P_i' + (4 i t (1-t^2) - 2t) P_i with integer polynomial
coefficients, so any derivative order is exact up to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

WINDOW_KINDS = ("smooth-bump", "cosine-spline", "sharp-cutoff")

_MAX_DERIV = 8

# -- small integer polynomial helpers (coefficients lowest-first) ------------


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_add(a: list[int], b: list[int]) -> list[int]:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _poly_diff(a: list[int]) -> list[int]:
    return [i * a[i] for i in range(1, len(a))] or [0]


_bump_polys: list[list[int]] = [[1]]


def _bump_poly(i: int) -> list[int]:
    while len(_bump_polys) <= i:
        m = len(_bump_polys) - 1
        p = _bump_polys[m]
        one_mt2 = [1, 0, -1]  # 1 - t^2
        part1 = _poly_mul(_poly_mul(one_mt2, one_mt2), _poly_diff(p))
        part2 = _poly_mul(_poly_add(_poly_mul([0, 4 * m], one_mt2), [0, -2]), p)
        _bump_polys.append(_poly_add(part1, part2))
    return _bump_polys[i]


def _horner(coeffs: list[int], t: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(t)
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


@dataclass(frozen=True)
class Window:
    """Test window supported in [a_w, A_w] with derivatives up to max_deriv."""

    kind: str
    a_w: float
    A_w: float
    max_deriv: int = field(default=_MAX_DERIV)

    @property
    def is_smooth(self) -> bool:
        return self.kind != "sharp-cutoff"

    # -- scalar / vector evaluation -----------------------------------------

    def eval(self, y: float) -> float:
        return float(self.eval_many(np.array([y]))[0])

    def eval_many(self, ys: np.ndarray) -> np.ndarray:
        return self.deriv_many(0, ys)

    def deriv(self, i: int, y: float) -> float:
        return float(self.deriv_many(i, np.array([y]))[0])

    def deriv_many(self, i: int, ys: np.ndarray) -> np.ndarray:
        """i-th derivative, vectorized; identically zero outside the support."""
        if i < 0 or i > self.max_deriv:
            raise ValueError(
                f"derivative order {i} outside 0..{self.max_deriv} for {self.kind}"
            )
        ys = np.asarray(ys, dtype=np.float64)
        out = np.zeros_like(ys)
        if self.kind == "sharp-cutoff":
            if i == 0:
                out[(ys >= self.a_w) & (ys <= self.A_w)] = 1.0
            return out
        if self.kind == "cosine-spline":
            inside = (ys > self.a_w) & (ys < self.A_w)
            if not inside.any():
                return out
            width = self.A_w - self.a_w
            u = (ys[inside] - self.a_w) / width
            freq = 2.0 * math.pi / width
            # W = (1 - cos(2 pi u)) / 2; i-th derivative shifts the phase
            out[inside] = -0.5 * freq**i * np.cos(2.0 * math.pi * u + i * math.pi / 2)
            if i == 0:
                out[inside] += 0.5
            return out
        # smooth bump
        inside = (ys > self.a_w) & (ys < self.A_w)
        if not inside.any():
            return out
        scale = 2.0 / (self.A_w - self.a_w)
        t = (2.0 * ys[inside] - (self.a_w + self.A_w)) / (self.A_w - self.a_w)
        u = 1.0 - t * t
        with np.errstate(over="ignore", under="ignore"):
            base = np.exp(1.0 - 1.0 / u)
            if i == 0:
                vals = base
            else:
                vals = base * _horner(_bump_poly(i), t) / u ** (2 * i) * scale**i
        out[inside] = vals
        return out


def make_window(kind: str, a_w: float, A_w: float, max_deriv: int = _MAX_DERIV) -> Window:
    """Construct a window; smooth kinds need 0 < a_w <= A_w."""
    if kind not in WINDOW_KINDS:
        raise ValueError(f"unknown window kind {kind!r}; choose from {WINDOW_KINDS}")
    if not A_w >= a_w:
        raise ValueError(f"need a_w <= A_w, got [{a_w}, {A_w}]")
    if kind == "sharp-cutoff":
        if a_w < 0:
            raise ValueError(f"sharp-cutoff needs a_w >= 0, got {a_w}")
        return Window(kind, float(a_w), float(A_w), max_deriv=0)
    if a_w <= 0:
        raise ValueError(f"smooth windows need a_w > 0, got {a_w}")
    return Window(kind, float(a_w), float(A_w), max_deriv=max_deriv)


@dataclass(frozen=True)
class WindowProduct:
    """y -> W1(h1 y) * W2(h2 y), with derivatives by the Leibniz rule.

    Presents the same surface sobolev_norm needs (support + deriv_many).
    """

    w1: Window
    h1: float
    w2: Window
    h2: float

    @property
    def kind(self) -> str:
        return "product"

    @property
    def is_smooth(self) -> bool:
        return self.w1.is_smooth and self.w2.is_smooth

    @property
    def a_w(self) -> float:
        return max(self.w1.a_w / self.h1, self.w2.a_w / self.h2)

    @property
    def A_w(self) -> float:
        return min(self.w1.A_w / self.h1, self.w2.A_w / self.h2)

    @property
    def max_deriv(self) -> int:
        return min(self.w1.max_deriv, self.w2.max_deriv)

    def deriv_many(self, i: int, ys: np.ndarray) -> np.ndarray:
        ys = np.asarray(ys, dtype=np.float64)
        out = np.zeros_like(ys)
        for j in range(i + 1):
            out += (
                math.comb(i, j)
                * self.h1**j
                * self.w1.deriv_many(j, self.h1 * ys)
                * self.h2 ** (i - j)
                * self.w2.deriv_many(i - j, self.h2 * ys)
            )
        return out

    def eval_many(self, ys: np.ndarray) -> np.ndarray:
        return self.deriv_many(0, ys)


# -- quadrature and norms -----------------------------------------------------


def _panel_quad(f, lo: float, hi: float, panels: int, nodes: int = 16) -> float:
    xs, ws = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(lo, hi, panels + 1)
    total = 0.0
    for i in range(panels):
        a, b = edges[i], edges[i + 1]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        total += half * float(np.dot(ws, f(mid + half * xs)))
    return total


def adaptive_integral(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Composite Gauss-Legendre with panel doubling to tolerance."""
    if hi <= lo:
        return 0.0
    prev = _panel_quad(f, lo, hi, 4)
    panels = 8
    while panels <= 4096:
        cur = _panel_quad(f, lo, hi, panels)
        if abs(cur - prev) <= tol * (abs(cur) + 1.0):
            return cur
        prev = cur
        panels *= 2
    return prev


def _sup_norm(obj, i: int) -> float:
    lo, hi = obj.a_w, obj.A_w
    if hi <= lo:
        return 0.0
    # Chebyshev-clustered sampling catches edge spikes of high derivatives
    theta = np.linspace(0.0, math.pi, 4097)
    ys = lo + (hi - lo) * 0.5 * (1.0 - np.cos(theta))
    vals = np.abs(obj.deriv_many(i, ys))
    best = int(np.argmax(vals))
    a = ys[max(best - 1, 0)]
    b = ys[min(best + 1, len(ys) - 1)]
    for _ in range(60):
        m1 = a + (b - a) / 3
        m2 = b - (b - a) / 3
        f1 = abs(obj.deriv(i, m1))
        f2 = abs(obj.deriv(i, m2))
        if f1 < f2:
            a = m1
        else:
            b = m2
    return max(float(vals[best]), abs(obj.deriv(i, 0.5 * (a + b))))


def sobolev_norm(obj, l: int, p) -> float:
    """Aggregate norm of derivatives 0..l per the (l, p) convention:
    (sum_i ||d^i W||_p^p)^(1/p) for finite p, sum of sup norms for p = inf."""
    if getattr(obj, "kind", None) == "sharp-cutoff":
        if l >= 1 or not (p == math.inf or p == "inf"):
            raise ValueError(
                "sharp-cutoff windows admit only the (l=0, p=inf) Sobolev norm"
            )
        return 1.0 if obj.A_w > obj.a_w else 0.0
    if l > obj.max_deriv:
        raise ValueError(f"derivative order {l} exceeds available {obj.max_deriv}")
    if p == math.inf or p == "inf":
        return float(sum(_sup_norm(obj, i) for i in range(l + 1)))
    if p not in (1, 2):
        raise ValueError(f"p must be 1, 2, or inf, got {p}")
    total = 0.0
    for i in range(l + 1):
        total += adaptive_integral(
            lambda ys, i=i: np.abs(obj.deriv_many(i, ys)) ** p,
            obj.a_w,
            obj.A_w,
            tol=1e-10,
        )
    return float(total ** (1.0 / p))


def overlap_integral(w1: Window, h1: int, w2: Window, h2: int, tol: float = 1e-10) -> float:
    """integral over y of W1(h1 y) W2(h2 y); exact for two sharp cut-offs."""
    lo = max(w1.a_w / h1, w2.a_w / h2)
    hi = min(w1.A_w / h1, w2.A_w / h2)
    if hi <= lo:
        return 0.0
    if not w1.is_smooth and not w2.is_smooth:
        return hi - lo
    prod = WindowProduct(w1, float(h1), w2, float(h2))
    return adaptive_integral(lambda ys: prod.eval_many(ys), lo, hi, tol=tol)
