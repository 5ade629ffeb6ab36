"""Exact integer polynomial multiplication.

Big-integer coefficient vectors are reduced modulo several 31-bit primes
p = a*2^v + 1, convolved with a vectorized radix-2 number-theoretic
transform per prime, and reconstructed exactly with the Chinese remainder
theorem (Garner mixed radix).  Enough primes are chosen per call so that
the CRT modulus exceeds twice an a-priori bound on the product
coefficients; the result is therefore exact for signed inputs.
"""

from __future__ import annotations

from functools import lru_cache

import gmpy2
import numpy as np

from .arith import factorize

_WORD_BITS = 31  # primes are < 2**31 so products fit in uint64
_SCHOOLBOOK_CUTOFF = 4096  # na*nb below this: plain convolution is faster


def _primitive_root(p: int) -> int:
    fac = factorize(p - 1)
    for g in range(2, 1000):
        if all(pow(g, (p - 1) // q, p) != 1 for q in fac):
            return g
    raise RuntimeError(f"no small primitive root found for {p}")


@lru_cache(maxsize=None)
def _prime_pool(two_adic: int) -> tuple[tuple[int, int], ...]:
    """All primes p = a*2^two_adic + 1 below 2^31, largest first, with roots."""
    step = 1 << two_adic
    pool = []
    for a in range((2**_WORD_BITS - 2) // step, 0, -1):
        p = a * step + 1
        if gmpy2.is_prime(p):
            pool.append((p, _primitive_root(p)))
    return tuple(pool)


def _select_primes(length: int, need_bits: int) -> list[tuple[int, int]]:
    two_adic = max(length.bit_length() - 1, 1)
    pool = _prime_pool(two_adic)
    chosen: list[tuple[int, int]] = []
    bits = 0
    for p, g in pool:
        chosen.append((p, g))
        bits += p.bit_length() - 1
        if bits >= need_bits:
            return chosen
    raise ValueError(
        f"cannot cover {need_bits} bits with NTT primes at transform length {length}"
    )


@lru_cache(maxsize=None)
def _bitrev(length: int) -> np.ndarray:
    bits = length.bit_length() - 1
    idx = np.arange(length, dtype=np.int64)
    rev = np.zeros(length, dtype=np.int64)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


def _power_table(w: int, n: int, p: int) -> np.ndarray:
    """[w^0, w^1, ..., w^(n-1)] mod p as uint64, built by doubling."""
    out = np.ones(n, dtype=np.uint64)
    k = 1
    cur = w % p
    while k < n:
        m = min(k, n - k)
        out[k : k + m] = (out[:m] * np.uint64(cur)) % np.uint64(p)
        cur = cur * cur % p
        k *= 2
    return out


@lru_cache(maxsize=None)
def _tables(p: int, g: int, length: int) -> tuple[np.ndarray, np.ndarray, int]:
    root = pow(g, (p - 1) // length, p)
    fwd = _power_table(root, length // 2, p)
    inv = _power_table(pow(root, p - 2, p), length // 2, p)
    length_inv = pow(length, p - 2, p)
    return fwd, inv, length_inv


def _ntt(vec: np.ndarray, p: int, table: np.ndarray) -> np.ndarray:
    """Radix-2 DIT transform of a uint64 vector (values < p), out of place."""
    length = len(vec)
    a = vec[_bitrev(length)]
    pp = np.uint64(p)
    size = 2
    while size <= length:
        half = size >> 1
        w = table[:: length // size][:half]
        v = a.reshape(-1, size)
        lo = v[:, :half]
        hi = v[:, half:]
        t = (hi * w) % pp
        diff = lo + (pp - t)
        np.subtract(diff, pp, out=diff, where=diff >= pp)
        s = lo + t
        np.subtract(s, pp, out=s, where=s >= pp)
        hi[...] = diff
        lo[...] = s
        size <<= 1
    return a


def _residues_mod(coeffs: list[int], primes: list[int], max_abs: int) -> list[np.ndarray]:
    """coeffs mod p for each p, as uint64 arrays (negatives folded mod p)."""
    n = len(coeffs)
    if max_abs < 2**62:
        base = np.array(coeffs, dtype=np.int64)
        out = []
        for p in primes:
            r = (base % p).astype(np.uint64)
            out.append(r)
        return out
    # wide coefficients: base-256 digits once, then Horner mod each prime
    nbytes = (max_abs.bit_length() + 7) // 8
    buf = bytearray(n * nbytes)
    neg = np.zeros(n, dtype=bool)
    for i, c in enumerate(coeffs):
        if c < 0:
            neg[i] = True
            c = -c
        buf[i * nbytes : (i + 1) * nbytes] = c.to_bytes(nbytes, "little")
    digits = np.frombuffer(bytes(buf), dtype=np.uint8).reshape(n, nbytes)
    out = []
    for p in primes:
        pp = np.uint64(p)
        r = np.zeros(n, dtype=np.uint64)
        for j in range(nbytes - 1, -1, -1):
            r = (r * np.uint64(256) + digits[:, j]) % pp
        r[neg] = (pp - r[neg]) % pp
        out.append(r)
    return out


def _garner(residues: list[np.ndarray], primes: list[int]) -> list[np.ndarray]:
    """Mixed-radix digits v_i with value = v_0 + v_1 p_0 + v_2 p_0 p_1 + ..."""
    digits: list[np.ndarray] = []
    for i, p_i in enumerate(primes):
        pp = np.uint64(p_i)
        x = residues[i] % pp
        for j in range(i):
            inv = np.uint64(pow(primes[j] % p_i, p_i - 2, p_i))
            x = ((x + (pp - digits[j] % pp)) * inv) % pp
        digits.append(x)
    return digits


def _assemble(digits: list[np.ndarray], primes: list[int]) -> list[int]:
    """Signed big-int values from mixed-radix digits (centered range)."""
    modulus = gmpy2.mpz(1)
    for p in primes:
        modulus *= p
    half = modulus // 2
    cols = [d.tolist() for d in digits]
    nprimes = len(primes)
    mpz = gmpy2.mpz
    out: list[int] = []
    for idx in range(len(cols[0])):
        acc = mpz(cols[nprimes - 1][idx])
        for i in range(nprimes - 2, -1, -1):
            acc = acc * primes[i] + cols[i][idx]
        if acc > half:
            acc -= modulus
        out.append(int(acc))
    return out


def _schoolbook(a: list[int], b: list[int], out_len: int) -> list[int]:
    out = [0] * out_len
    for i, ai in enumerate(a):
        if ai == 0 or i >= out_len:
            continue
        jmax = min(len(b), out_len - i)
        for j in range(jmax):
            out[i + j] += ai * b[j]
    return out


def forward_ntt(res: np.ndarray, p: int, g: int, length: int) -> np.ndarray:
    """Forward transform of a residue vector zero-padded to length."""
    fwd, _, _ = _tables(p, g, length)
    buf = np.zeros(length, dtype=np.uint64)
    buf[: len(res)] = res
    return _ntt(buf, p, fwd)


def convolve_mod(
    a_res: np.ndarray,
    b_res: np.ndarray,
    p: int,
    g: int,
    out_len: int,
    length: int | None = None,
    b_transformed: np.ndarray | None = None,
) -> np.ndarray:
    """Convolution of two residue vectors mod an NTT prime (no aliasing).

    A caller multiplying repeatedly by the same factor can pass length and
    that factor's forward transform to skip recomputing it.
    """
    full = len(a_res) + len(b_res) - 1
    if length is None:
        length = 1 << (full - 1).bit_length()
    elif length < full:
        raise ValueError(f"transform length {length} aliases a product of {full}")
    fwd, inv, length_inv = _tables(p, g, length)
    fa = np.zeros(length, dtype=np.uint64)
    fa[: len(a_res)] = a_res
    ta = _ntt(fa, p, fwd)
    if b_transformed is not None:
        tb = b_transformed
    elif b_res is a_res:
        tb = ta
    else:
        fb = np.zeros(length, dtype=np.uint64)
        fb[: len(b_res)] = b_res
        tb = _ntt(fb, p, fwd)
    prod = (ta * tb) % np.uint64(p)
    back = _ntt(prod, p, inv)
    back = (back * np.uint64(length_inv)) % np.uint64(p)
    return back[:out_len]


def digits_to_float(digits: list[np.ndarray], primes: list[int]) -> np.ndarray:
    """Signed float64 value of mixed-radix CRT digits, vectorized.

    Digits are first rebalanced into (-p/2, p/2] with carry propagation
    (dropping the final carry selects the centered residue), so intermediate
    Horner values stay at the scale of the true signed value and never touch
    the full CRT modulus.  Valid while the true magnitudes stay below the
    float64 overflow line; callers must ensure the CRT bound does so.
    """
    balanced: list[np.ndarray] = []
    carry = np.zeros(len(digits[0]), dtype=np.uint64)
    for i, p in enumerate(primes):
        t = digits[i] + carry
        w = t.astype(np.int64)
        mask = t > (p // 2)
        w[mask] -= p
        carry = np.zeros_like(carry)
        carry[mask] = 1
        balanced.append(w.astype(np.float64))
    acc = balanced[-1]
    for i in range(len(primes) - 2, -1, -1):
        acc = acc * float(primes[i]) + balanced[i]
    return acc


def garner_digits(residues: list[np.ndarray], primes: list[int]) -> list[np.ndarray]:
    """Public wrapper around the mixed-radix reconstruction."""
    return _garner(residues, primes)


def residues_of_ints(coeffs: list[int], primes: list[int]) -> list[np.ndarray]:
    """Reductions of signed big-int coefficients modulo each prime."""
    max_abs = max((abs(c) for c in coeffs), default=0)
    return _residues_mod(coeffs, primes, max_abs)


def assemble_ints(residues: list[np.ndarray], primes: list[int]) -> list[int]:
    """Exact signed integers from per-prime residue vectors."""
    return _assemble(_garner(residues, primes), primes)


def select_primes(length: int, need_bits: int) -> list[tuple[int, int]]:
    """(prime, generator) pairs covering need_bits at a given transform length."""
    return _select_primes(length, need_bits)


def convolve_exact(a: list[int], b: list[int], out_len: int | None = None) -> list[int]:
    """Exact product coefficients of two integer polynomials.

    Returns the first out_len coefficients (defaults to the full product
    length).  Squarings (b is a) reuse the forward transform.
    """
    if not a or not b:
        return []
    full = len(a) + len(b) - 1
    if out_len is None:
        out_len = full
    out_len = min(out_len, full)
    if len(a) * len(b) <= _SCHOOLBOOK_CUTOFF:
        return _schoolbook(a, b, out_len)

    max_a = max(abs(c) for c in a)
    max_b = max(abs(c) for c in b) if b is not a else max_a
    if max_a == 0 or max_b == 0:
        return [0] * out_len
    sum_a = sum(abs(c) for c in a)
    sum_b = sum(abs(c) for c in b) if b is not a else sum_a
    bound = min(sum_a * max_b, max_a * sum_b)

    length = 1 << (full - 1).bit_length()
    pg = _select_primes(length, (2 * bound + 1).bit_length() + 1)
    primes = [p for p, _ in pg]

    res_a = _residues_mod(a, primes, max_a)
    res_b = res_a if b is a else _residues_mod(b, primes, max_b)

    prod_residues = []
    for i, (p, g) in enumerate(pg):
        fwd, inv, length_inv = _tables(p, g, length)
        fa = np.zeros(length, dtype=np.uint64)
        fa[: len(a)] = res_a[i]
        ta = _ntt(fa, p, fwd)
        if b is a:
            tb = ta
        else:
            fb = np.zeros(length, dtype=np.uint64)
            fb[: len(b)] = res_b[i]
            tb = _ntt(fb, p, fwd)
        prod = (ta * tb) % np.uint64(p)
        back = _ntt(prod, p, inv)
        back = (back * np.uint64(length_inv)) % np.uint64(p)
        prod_residues.append(back[:out_len])

    digits = _garner(prod_residues, primes)
    return _assemble(digits, primes)
