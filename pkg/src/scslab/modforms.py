"""Level-1 cusp form spaces: echelon bases, Hecke operators, eigenform tables.

Coefficients stay exact integers until a table is materialized into a
HeckeEigenform, where the single normalization a(n)/n^((k-1)/2) moves to
floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import mpmath as mp
import numpy as np

from .arith import divisors
from .errors import EigenspaceSeparationError, TableLengthError
from .ntt import (
    convolve_mod,
    digits_to_float,
    forward_ntt,
    garner_digits,
    residues_of_ints,
    select_primes,
)
from .qseries import QSeries, delta_qexp, eisenstein_qexp

_COLLISION_RTOL = 1e-6  # eigenvalue gap below this (times scale) -> fallback
_REFINE_DPS = 60


def cusp_dim(k: int) -> int:
    """Dimension of the space of weight-k level-1 cusp forms."""
    if k % 2 or k < 12:
        return 0
    full = k // 12 + (0 if k % 12 == 2 else 1)
    return full - 1


@dataclass(frozen=True)
class HeckeEigenform:
    """Normalized Hecke eigenform: weight plus a real eigenvalue table.

    lam[n] holds the eigenvalue at n for 1 <= n <= n_max (lam[0] unused).
    """

    k: int
    n_max: int
    lam: np.ndarray
    petersson_norm: float | None = None
    sym2_l1: float | None = None

    def require(self, n: int, what: str = "operation") -> None:
        if n > self.n_max:
            raise TableLengthError(
                f"{what} needs eigenvalues up to n={n} but the table stops at "
                f"{self.n_max}",
                required=n,
            )

    def lam_at(self, n: int) -> float:
        self.require(n)
        return float(self.lam[n])

    def with_lvalues(
        self, petersson_norm: float | None = None, sym2_l1: float | None = None
    ) -> "HeckeEigenform":
        return replace(
            self,
            petersson_norm=petersson_norm
            if petersson_norm is not None
            else self.petersson_norm,
            sym2_l1=sym2_l1 if sym2_l1 is not None else self.sym2_l1,
        )


# -- basis construction ------------------------------------------------------

_power_cache: dict[tuple[str, int, int], QSeries] = {}


def _cached_power(kind: str, e: int, n_trunc: int) -> QSeries:
    """e-th power of E4, E6 or Delta at fixed truncation, built incrementally."""
    key = (kind, e, n_trunc)
    hit = _power_cache.get(key)
    if hit is not None:
        return hit
    if e == 0:
        out = QSeries.one(n_trunc)
    elif e == 1:
        if kind == "e4":
            out = eisenstein_qexp(4, n_trunc)
        elif kind == "e6":
            out = eisenstein_qexp(6, n_trunc)
        else:
            out = delta_qexp(n_trunc)
    else:
        out = _cached_power(kind, e - 1, n_trunc) * _cached_power(kind, 1, n_trunc)
    _power_cache[key] = out
    return out


def victor_miller_basis(k: int, n_trunc: int) -> list[QSeries]:
    """Echelonized integral basis of weight-k cusp forms.

    Element i (0-based) has coefficient delta_{i+1,j} at q^j for 1 <= j <= dim.
    Built from the monomials E4^a E6^b Delta^c.
    """
    if k % 2 or k < 4:
        raise ValueError(f"weight must be even and >= 4, got {k}")
    d = cusp_dim(k)
    if d == 0:
        return []
    if n_trunc < d:
        raise TableLengthError(
            f"victor_miller_basis(k={k}) needs truncation >= dim = {d}", required=d
        )
    rows: list[list[int]] = []
    for j in range(1, d + 1):
        m = k - 12 * j
        b = (m % 4) // 2
        a = (m - 6 * b) // 4
        mono = _cached_power("delta", j, n_trunc)
        if b:
            mono = mono * _cached_power("e6", b, n_trunc)
        if a:
            mono = mono * _cached_power("e4", a, n_trunc)
        rows.append(list(mono.coeff))
    # rows[j-1] starts with 1 at q^j: integer back-substitution echelonizes
    for j in range(d, 1, -1):
        high = rows[j - 1]
        for i in range(j - 1):
            c = rows[i][j]
            if c:
                rows[i] = [x - c * y for x, y in zip(rows[i], high)]
    return [QSeries(n_trunc, r) for r in rows]


def hecke_matrix(k: int, m: int, basis: list[QSeries], n_trunc: int) -> list[list[int]]:
    """Matrix of T_m in the echelonized basis; exact integer entries.

    Column j is the image of basis element j expressed in the basis, read off
    the first dim coefficients (valid because the basis is echelonized).
    """
    d = len(basis)
    if d == 0:
        return []
    if m < 1:
        raise ValueError(f"operator index must be >= 1, got {m}")
    needed = m * d
    if n_trunc < needed or any(b.n_trunc < needed for b in basis):
        raise TableLengthError(
            f"hecke_matrix(k={k}, m={m}) needs coefficients up to n={needed}",
            required=needed,
        )
    mat = [[0] * d for _ in range(d)]
    for j, b in enumerate(basis):
        for n in range(1, d + 1):
            acc = 0
            for dd in divisors(math.gcd(m, n)):
                acc += dd ** (k - 1) * b.coefficient(m * n // (dd * dd))
            mat[n - 1][j] = acc
    return mat


# -- long tables via per-prime residue pipeline ------------------------------
#
# For dim >= 2 and long truncations, exact big-int assembly of every
# intermediate would dominate the runtime.  Instead each cuspidal monomial
# chain Delta^j E6^b E4^i (every intermediate is divisible by Delta^j, so
# coefficients stay near n^((w-1)/2) rather than the n^(w-1) of Eisenstein
# powers) is kept as residues modulo a set of NTT primes.  Prime counts are
# chosen per product from exact l1/sup norms of the already-reconstructed
# factors, the echelon combination is applied per prime with exact integer
# multipliers, and only the final mixed-radix digits are rounded (once) to
# float64.

_mono_res_cache: dict[tuple, np.ndarray] = {}
_mono_norm_cache: dict[tuple, tuple[float, float]] = {}
_base_norm_cache: dict[tuple[str, int], tuple[float, float]] = {}


def _monomial_plan(k: int) -> list[tuple[int, int, int]]:
    """(a, b, j) exponents of E4^a E6^b Delta^j for basis slots j = 1..dim."""
    plan = []
    for j in range(1, cusp_dim(k) + 1):
        m = k - 12 * j
        b = (m % 4) // 2
        plan.append(((m - 6 * b) // 4, b, j))
    return plan


def _base_norms(kind: str, n_trunc: int) -> tuple[float, float]:
    key = (kind, n_trunc)
    hit = _base_norm_cache.get(key)
    if hit is None:
        coeffs = _cached_power(kind, 1, n_trunc).coeff
        l1 = float(sum(abs(c) for c in coeffs))
        mx = float(max(abs(c) for c in coeffs))
        hit = (l1 * (1 + 1e-12), mx * (1 + 1e-12))
        _base_norm_cache[key] = hit
    return hit


def _base_residue(kind: str, n_trunc: int, p: int) -> np.ndarray:
    key = ("base", kind, n_trunc, p)
    hit = _mono_res_cache.get(key)
    if hit is None:
        hit = residues_of_ints(_cached_power(kind, 1, n_trunc).coeff, [p])[0]
        _mono_res_cache[key] = hit
    return hit


def _base_transform(kind: str, n_trunc: int, p: int, g: int, length: int) -> np.ndarray:
    key = ("base-ntt", kind, n_trunc, p, length)
    hit = _mono_res_cache.get(key)
    if hit is None:
        hit = forward_ntt(_base_residue(kind, n_trunc, p), p, g, length)
        _mono_res_cache[key] = hit
    return hit


def clear_table_caches() -> None:
    """Drop the residue/norm caches (they can hold hundreds of MB)."""
    _mono_res_cache.clear()
    _mono_norm_cache.clear()
    _base_norm_cache.clear()
    _power_cache.clear()


def _mono_parent(a: int, b: int, j: int) -> tuple[tuple[int, int, int] | None, str]:
    """Previous chain element and the base series that multiplies it."""
    if a > 0:
        return (a - 1, b, j), "e4"
    if b > 0:
        return (0, b - 1, j), "e6"
    if j > 1:
        return (0, 0, j - 1), "delta"
    return None, "delta"


def _mono_norms(a: int, b: int, j: int, n_trunc: int) -> tuple[float, float]:
    """(l1, max) norms of the monomial, with reconstruction-backed tightening."""
    key = (a, b, j, n_trunc)
    hit = _mono_norm_cache.get(key)
    if hit is None:
        _ensure_monomial(a, b, j, n_trunc)
        hit = _mono_norm_cache[key]
    return hit


def _primes_for_bound(bound: float, length: int) -> list[tuple[int, int]]:
    bits = max(8, int(math.log2(bound)) + 3)
    return select_primes(length, bits)


def _mono_residue(a: int, b: int, j: int, n_trunc: int, p: int, g: int) -> np.ndarray:
    key = (a, b, j, n_trunc, p)
    hit = _mono_res_cache.get(key)
    if hit is not None:
        return hit
    parent, base = _mono_parent(a, b, j)
    if parent is None:
        out = _base_residue("delta", n_trunc, p)
    else:
        pa, pb, pj = parent
        left = _mono_residue(pa, pb, pj, n_trunc, p, g)
        length = 1 << (2 * n_trunc).bit_length()
        out = convolve_mod(
            left,
            _base_residue(base, n_trunc, p),
            p,
            g,
            n_trunc + 1,
            length=length,
            b_transformed=_base_transform(base, n_trunc, p, g, length),
        )
    _mono_res_cache[key] = out
    return out


def _ensure_monomial(a: int, b: int, j: int, n_trunc: int) -> list[tuple[int, int]]:
    """Build residues of Delta^j E6^b E4^a with a certified prime set and
    record tight norms from the float reconstruction.  Returns the primes."""
    parent, base = _mono_parent(a, b, j)
    length = 1 << (2 * n_trunc).bit_length()
    if parent is None:
        pg = _primes_for_bound(2.0 * _base_norms("delta", n_trunc)[0], length)
        for p, g in pg:
            _mono_residue(a, b, j, n_trunc, p, g)
        _mono_norm_cache[(a, b, j, n_trunc)] = _base_norms("delta", n_trunc)
        return pg
    pa, pb, pj = parent
    l1_p, mx_p = _mono_norms(pa, pb, pj, n_trunc)
    l1_b, mx_b = _base_norms(base, n_trunc)
    bound = min(l1_p * mx_b, mx_p * l1_b)
    pg = _primes_for_bound(2.0 * bound, length)
    for p, g in pg:
        _mono_residue(a, b, j, n_trunc, p, g)
    key = (a, b, j, n_trunc)
    if key not in _mono_norm_cache:
        primes = [p for p, _ in pg]
        digits = garner_digits(
            [_mono_res_cache[(a, b, j, n_trunc, p)] for p in primes], primes
        )
        vals = np.abs(digits_to_float(digits, primes))
        _mono_norm_cache[key] = (
            float(vals.sum()) * (1 + 1e-9) + 1.0,
            float(vals.max()) * (1 + 1e-9) + 1.0,
        )
    return pg


def _echelon_transform(k: int, d: int) -> list[list[int]]:
    """Integer matrix U with echelon_row_i = sum_m U[i][m] * monomial_row_m.

    U is the inverse of the unitriangular d x d leading block of the
    monomial coefficient matrix, so it is integral.
    """
    small = max(3 * d, d)
    monos = []
    for a, b, c in _monomial_plan(k):
        mono = _cached_power("delta", c, small)
        if b:
            mono = mono * _cached_power("e6", b, small)
        if a:
            mono = mono * _cached_power("e4", a, small)
        monos.append(mono.coeff)
    u = [[1 if i == m else 0 for m in range(d)] for i in range(d)]
    rows = [list(r) for r in monos]
    for j in range(d, 1, -1):
        for i in range(j - 1):
            cmult = rows[i][j]
            if cmult:
                rows[i] = [x - cmult * y for x, y in zip(rows[i], rows[j - 1])]
                u[i] = [x - cmult * y for x, y in zip(u[i], u[j - 1])]
    return u


def victor_miller_basis_float(k: int, n_trunc: int) -> np.ndarray:
    """Echelonized basis coefficients as a float64 matrix (n_trunc+1, dim).

    Entries are the exact integers of victor_miller_basis rounded once to
    float64 (relative error a few ulp); the computation never materializes
    the exact big integers.
    """
    d = cusp_dim(k)
    if d == 0:
        return np.zeros((n_trunc + 1, 0))
    u = _echelon_transform(k, d)
    plan = _monomial_plan(k)
    for a, b, j in plan:
        _ensure_monomial(a, b, j, n_trunc)
    # rows are integer combinations; cover the worst U-weighted bound
    length = 1 << (2 * n_trunc).bit_length()
    out = np.empty((n_trunc + 1, d))
    for i in range(d):
        bound = sum(
            abs(u[i][m]) * _mono_norms(a, b, j, n_trunc)[1]
            for m, (a, b, j) in enumerate(plan)
        )
        if math.log2(max(bound, 2.0)) > 1000:
            raise ValueError(
                f"float basis path would overflow float64 at weight {k}, "
                f"truncation {n_trunc}"
            )
        pg = _primes_for_bound(2.0 * bound, length)
        primes = []
        per_prime = []
        for p, g in pg:
            acc = np.zeros(n_trunc + 1, dtype=np.uint64)
            for m, (a, b, j) in enumerate(plan):
                mult = u[i][m] % p
                if mult:
                    mono = _mono_residue(a, b, j, n_trunc, p, g)
                    acc = (acc + mono * np.uint64(mult)) % np.uint64(p)
            primes.append(p)
            per_prime.append(acc)
        digits = garner_digits(per_prime, primes)
        out[:, i] = digits_to_float(digits, primes)
    return out


# -- eigenform extraction ----------------------------------------------------


def _refine_eigenpair(
    a_mp: "mp.matrix", lam0: float, v0: np.ndarray, steps: int = 3
) -> tuple[mp.mpf, list[mp.mpf]]:
    """Inverse iteration against the exact operator at high precision."""
    d = a_mp.rows
    lam = mp.mpf(lam0)
    v = mp.matrix([mp.mpf(float(x)) for x in v0])
    scale = max(abs(a_mp[i, j]) for i in range(d) for j in range(d)) or mp.mpf(1)
    for _ in range(steps):
        shifted = a_mp - (lam + scale * mp.mpf(10) ** (-_REFINE_DPS + 20)) * mp.eye(d)
        try:
            w = mp.lu_solve(shifted, v)
        except ZeroDivisionError:
            break
        nrm = mp.norm(w)
        if nrm == 0:
            break
        v = w / nrm
        av = a_mp * v
        pivot = max(range(d), key=lambda i: abs(v[i]))
        lam = av[pivot] / v[pivot]
    return lam, [v[i] for i in range(d)]


def _normalize_table(k: int, n_max: int, a_values: np.ndarray) -> np.ndarray:
    n = np.arange(n_max + 1, dtype=np.float64)
    lam = np.zeros(n_max + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam[1:] = a_values[1:] / n[1:] ** ((k - 1) / 2.0)
    lam[1] = 1.0
    return lam


def hecke_eigenforms(k: int, n_max: int) -> list[HeckeEigenform]:
    """All weight-k eigenforms with eigenvalue tables lambda(n), n <= n_max.

    Diagonalizes T_2 (falling back to T_2 + pi*T_3 on eigenvalue collision),
    refines each eigenpair against the exact integer matrix, and normalizes
    so lambda(1) = 1.  Forms are ordered by lambda(2) ascending.
    """
    if k % 2:
        raise ValueError(f"weight must be even, got {k}")
    if n_max < 2:
        raise ValueError(f"table length must be >= 2, got {n_max}")
    d = cusp_dim(k)
    if d == 0:
        return []
    n_small = max(3 * d, 12)
    # k = 12 keeps the exact tau route; other long tables go through the
    # per-prime residue pipeline and round once at materialization
    long_float_path = n_max > 4 * n_small and not (d == 1 and k == 12)
    n_basis = n_small if long_float_path else max(n_max, 3 * d)
    basis = victor_miller_basis(k, n_basis)

    if d == 1:
        if long_float_path:
            coeffs = victor_miller_basis_float(k, n_max)[:, 0]
        else:
            coeffs = np.array([float(c) for c in basis[0].coeff[: n_max + 1]])
        lam = _normalize_table(k, n_max, coeffs)
        return [HeckeEigenform(k=k, n_max=n_max, lam=lam)]

    t2 = hecke_matrix(k, 2, basis, n_basis)
    t2f = np.array(t2, dtype=np.float64)
    eigvals, eigvecs = np.linalg.eig(t2f)
    scale = float(np.max(np.abs(eigvals))) or 1.0
    gaps = np.abs(np.subtract.outer(eigvals, eigvals))
    np.fill_diagonal(gaps, np.inf)
    collided = bool(np.min(gaps) < _COLLISION_RTOL * scale)

    with mp.workdps(_REFINE_DPS):
        if not collided:
            a_mp = mp.matrix(d)
            for i in range(d):
                for j in range(d):
                    a_mp[i, j] = mp.mpf(t2[i][j])
        else:
            # a generic irrational combination separates joint eigenspaces
            t3 = hecke_matrix(k, 3, basis, n_basis)
            a_mp = mp.matrix(d)
            for i in range(d):
                for j in range(d):
                    a_mp[i, j] = mp.mpf(t2[i][j]) + mp.pi * mp.mpf(t3[i][j])
            comb = t2f + math.pi * np.array(t3, dtype=np.float64)
            eigvals, eigvecs = np.linalg.eig(comb)
            scale = float(np.max(np.abs(eigvals))) or 1.0
            gaps = np.abs(np.subtract.outer(eigvals, eigvals))
            np.fill_diagonal(gaps, np.inf)
            if np.min(gaps) < _COLLISION_RTOL * scale:
                raise EigenspaceSeparationError(
                    f"could not separate the {d} eigenspaces of weight {k} even "
                    f"with the T_2 + pi*T_3 combination"
                )

        vectors: list[np.ndarray] = []
        for idx in range(d):
            if abs(np.imag(eigvals[idx])) > 1e-8 * scale:
                raise EigenspaceSeparationError(
                    f"complex eigenvalue {eigvals[idx]} for weight {k}: Hecke "
                    f"eigenvalues must be real"
                )
            _, v = _refine_eigenpair(a_mp, float(np.real(eigvals[idx])), np.real(eigvecs[:, idx]))
            v0 = v[0]
            if abs(v0) == 0:
                raise EigenspaceSeparationError(
                    f"eigenvector for weight {k} has vanishing first coefficient"
                )
            vectors.append(np.array([float(x / v0) for x in v]))

    if long_float_path:
        bmat = victor_miller_basis_float(k, n_max)
    else:
        bmat = np.empty((n_max + 1, d))
        for j, b in enumerate(basis):
            bmat[:, j] = [float(c) for c in b.coeff[: n_max + 1]]
    forms = []
    for v in vectors:
        a_values = bmat @ v
        lam = _normalize_table(k, n_max, a_values)
        forms.append(HeckeEigenform(k=k, n_max=n_max, lam=lam))
    forms.sort(key=lambda f: f.lam[2])
    return forms


def hecke_relation_residual(form: HeckeEigenform, m: int, n: int) -> float:
    """|lam(m)lam(n) - sum_{d | (m,n)} lam(mn/d^2)| for one pair."""
    form.require(m * n, "hecke_relation_residual")
    rhs = sum(form.lam[m * n // (dd * dd)] for dd in divisors(math.gcd(m, n)))
    return abs(float(form.lam[m] * form.lam[n] - rhs))
