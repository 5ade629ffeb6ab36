"""Elementary arithmetic: divisor sums, divisor counts, factorization, primes."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division; fine for the sizes used here."""
    if n < 1:
        raise ValueError(f"factorize expects n >= 1, got {n}")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    if n < 1:
        raise ValueError(f"divisors expects n >= 1, got {n}")
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**j for d in divs for j in range(e + 1)]
    return sorted(divs)


def sigma(e: int, n: int) -> int:
    """Sum of e-th powers of the divisors of n, exact."""
    if n < 1:
        raise ValueError(f"sigma expects n >= 1, got {n}")
    if e < 0:
        raise ValueError(f"sigma expects e >= 0, got {e}")
    total = 1
    for p, a in factorize(n).items():
        if e == 0:
            total *= a + 1
        else:
            total *= (p ** (e * (a + 1)) - 1) // (p**e - 1)
    return total


def divisor_count(n: int) -> int:
    """Number of positive divisors of n."""
    return sigma(0, n)


def sigma_table(e: int, n_max: int) -> list[int]:
    """sigma(e, n) for 1 <= n <= n_max by sieving; entry [0] is unused 0."""
    table = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        de = d**e
        for m in range(d, n_max + 1, d):
            table[m] += de
    return table


@lru_cache(maxsize=None)
def primes_up_to(n: int) -> tuple[int, ...]:
    """All primes <= n (Eratosthenes)."""
    if n < 2:
        return ()
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return tuple(int(p) for p in np.nonzero(mask)[0])


# d(n) <= DIVISOR_CUBE_ROOT_CONST * n^(1/3) for all n >= 1: the ratio
# (a+1)/p^(a/3) exceeds 1 only for p in {2,3,5,7}, with per-prime maxima
# 2, 3^(1/3)... taking max over a gives 2.0 * 1.4422 * 1.1696 * 1.0472.
DIVISOR_CUBE_ROOT_CONST = 3.54


def divisor_bound_cuberoot(n: float) -> float:
    """Rigorous pointwise bound on d(n): at most 3.54 * n^(1/3)."""
    return DIVISOR_CUBE_ROOT_CONST * n ** (1.0 / 3.0)
