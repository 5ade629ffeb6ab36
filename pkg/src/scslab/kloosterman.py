"""Kloosterman sums S(m, n; c) by direct enumeration over units mod c.

The exponential phases are exact integers; the cosine/sine values enter at
double-double precision (hi/lo float pairs from 40-digit evaluations) and the
accumulation is exactly rounded via error-free product transforms plus fsum,
so the working significand exceeds 106 bits throughout.  Results surface as
64-bit floats after the imaginary part is checked to vanish.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np

_IMAG_TOL = 1e-10  # allowed |Im S| relative to c

_SPLITTER = 134217729.0  # 2^27 + 1, Dekker splitting constant


def _two_prod(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Error-free transform: a*b = hi + lo exactly (Dekker/Veltkamp)."""
    hi = a * b
    a1 = a * _SPLITTER
    ah = a1 - (a1 - a)
    al = a - ah
    b1 = b * _SPLITTER
    bh = b1 - (b1 - b)
    bl = b - bh
    lo = al * bl - (((hi - ah * bh) - al * bh) - ah * bl)
    return hi, lo


class KloostermanTable:
    """Cache of Kloosterman sums keyed by (m mod c, n mod c, c).

    Unit/inverse tables and double-double trig tables are cached per modulus.
    Inserts are idempotent (values are deterministic), so concurrent
    recomputation races are benign.
    """

    def __init__(self) -> None:
        self.values: dict[tuple[int, int, int], float] = {}
        self._units: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._trig: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = {}
        self.max_c = 0

    def _unit_tables(self, c: int) -> tuple[np.ndarray, np.ndarray]:
        hit = self._units.get(c)
        if hit is not None:
            return hit
        xs = [x for x in range(1, c + 1) if math.gcd(x, c) == 1]
        invs = [pow(x, -1, c) for x in xs]
        out = (np.array(xs, dtype=np.int64), np.array(invs, dtype=np.int64))
        self._units[c] = out
        return out

    def _trig_tables(self, c: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        hit = self._trig.get(c)
        if hit is not None:
            return hit
        cos_hi = np.empty(c)
        cos_lo = np.empty(c)
        sin_hi = np.empty(c)
        sin_lo = np.empty(c)
        with mp.workdps(40):
            for t in range(c):
                arg = mp.mpf(2 * t) / c
                cv = mp.cospi(arg)
                sv = mp.sinpi(arg)
                ch = float(cv)
                sh = float(sv)
                cos_hi[t] = ch
                cos_lo[t] = float(cv - ch)
                sin_hi[t] = sh
                sin_lo[t] = float(sv - sh)
        out = (cos_hi, cos_lo, sin_hi, sin_lo)
        self._trig[c] = out
        return out

    def value(self, m: int, n: int, c: int) -> float:
        if c < 1:
            raise ValueError(f"modulus must be >= 1, got {c}")
        key = (m % c, n % c, c)
        hit = self.values.get(key)
        if hit is not None:
            return hit
        mr, nr, _ = key
        if c == 1:
            out = 1.0
        else:
            xs, invs = self._unit_tables(c)
            phases = (mr * xs + nr * invs) % c
            counts = np.bincount(phases, minlength=c).astype(np.float64)
            cos_hi, cos_lo, sin_hi, sin_lo = self._trig_tables(c)
            hi, lo = _two_prod(counts, cos_hi)
            re = math.fsum(hi) + math.fsum(lo) + math.fsum(counts * cos_lo)
            hi, lo = _two_prod(counts, sin_hi)
            im = math.fsum(hi) + math.fsum(lo) + math.fsum(counts * sin_lo)
            if abs(im) > _IMAG_TOL * c:
                raise ArithmeticError(
                    f"Kloosterman sum S({m},{n};{c}) has non-vanishing imaginary "
                    f"part {im}; accumulation is broken"
                )
            out = re
        self.values[key] = out
        # symmetric insert: S(m,n;c) = S(n,m;c)
        self.values.setdefault((key[1], key[0], key[2]), out)
        if c > self.max_c:
            self.max_c = c
        return out


_DEFAULT_TABLE = KloostermanTable()


def kloosterman(m: int, n: int, c: int, table: KloostermanTable | None = None) -> float:
    """S(m, n; c) = sum over units x mod c of e((m x + n x^{-1})/c)."""
    return (table or _DEFAULT_TABLE).value(m, n, c)


def default_table() -> KloostermanTable:
    return _DEFAULT_TABLE
