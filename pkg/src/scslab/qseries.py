"""Truncated q-expansions with exact integer coefficients.

A QSeries holds the coefficients of q^0..q^N.  All ring operations truncate
at q^N and agree exactly with the untruncated result modulo q^(N+1).
Instances are treated as immutable; operations return new series.
"""

from __future__ import annotations

from .arith import sigma_table
from .ntt import convolve_exact


class QSeries:
    """Integer power series in q truncated at order N (N+1 coefficients)."""

    __slots__ = ("n_trunc", "coeff")

    def __init__(self, n_trunc: int, coeff: list[int] | None = None):
        if n_trunc < 0:
            raise ValueError(f"truncation order must be >= 0, got {n_trunc}")
        if coeff is None:
            coeff = [0] * (n_trunc + 1)
        if len(coeff) != n_trunc + 1:
            raise ValueError(
                f"need exactly {n_trunc + 1} coefficients, got {len(coeff)}"
            )
        self.n_trunc = n_trunc
        self.coeff = coeff

    # -- constructors ------------------------------------------------------

    @classmethod
    def one(cls, n_trunc: int) -> "QSeries":
        c = [0] * (n_trunc + 1)
        c[0] = 1
        return cls(n_trunc, c)

    @classmethod
    def from_terms(cls, n_trunc: int, terms: dict[int, int]) -> "QSeries":
        c = [0] * (n_trunc + 1)
        for e, v in terms.items():
            if 0 <= e <= n_trunc:
                c[e] = v
        return cls(n_trunc, c)

    # -- basics ------------------------------------------------------------

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeff[: min(6, len(self.coeff))])
        tail = ", ..." if self.n_trunc >= 6 else ""
        return f"QSeries(N={self.n_trunc}, [{head}{tail}])"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.n_trunc == other.n_trunc and self.coeff == other.coeff

    def __hash__(self):
        return hash((self.n_trunc, tuple(self.coeff[: min(32, len(self.coeff))])))

    def coefficient(self, j: int) -> int:
        if not 0 <= j <= self.n_trunc:
            raise IndexError(f"coefficient index {j} outside 0..{self.n_trunc}")
        return self.coeff[j]

    def truncate(self, m: int) -> "QSeries":
        if m > self.n_trunc:
            raise ValueError(f"cannot extend truncation {self.n_trunc} to {m}")
        return QSeries(m, self.coeff[: m + 1])

    def shift(self, j: int) -> "QSeries":
        """Multiply by q^j (keeping the truncation order)."""
        if j < 0:
            raise ValueError("only non-negative shifts are defined")
        c = [0] * (self.n_trunc + 1)
        c[j:] = self.coeff[: self.n_trunc + 1 - j]
        return QSeries(self.n_trunc, c)

    # -- ring operations ---------------------------------------------------

    def _common(self, other: "QSeries") -> int:
        return min(self.n_trunc, other.n_trunc)

    def __add__(self, other: "QSeries") -> "QSeries":
        n = self._common(other)
        return QSeries(n, [x + y for x, y in zip(self.coeff, other.coeff)][: n + 1])

    def __sub__(self, other: "QSeries") -> "QSeries":
        n = self._common(other)
        return QSeries(n, [x - y for x, y in zip(self.coeff, other.coeff)][: n + 1])

    def __neg__(self) -> "QSeries":
        return QSeries(self.n_trunc, [-x for x in self.coeff])

    def scale(self, c: int) -> "QSeries":
        return QSeries(self.n_trunc, [c * x for x in self.coeff])

    def __mul__(self, other: "QSeries") -> "QSeries":
        n = self._common(other)
        prod = convolve_exact(
            self.coeff[: n + 1], other.coeff[: n + 1] if other is not self else self.coeff[: n + 1], n + 1
        )
        if len(prod) < n + 1:
            prod = prod + [0] * (n + 1 - len(prod))
        return QSeries(n, prod)

    def square(self) -> "QSeries":
        n = self.n_trunc
        prod = convolve_exact(self.coeff, self.coeff, n + 1)
        if len(prod) < n + 1:
            prod = prod + [0] * (n + 1 - len(prod))
        return QSeries(n, prod)

    def __pow__(self, e: int) -> "QSeries":
        if e < 0:
            raise ValueError("negative powers are not defined for truncated series")
        result = QSeries.one(self.n_trunc)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base.square()
        return result


def eta3_qexp(n_trunc: int) -> QSeries:
    """prod (1-q^n)^3 from the sparse two-square-free expansion
    sum_{j>=0} (-1)^j (2j+1) q^{j(j+1)/2}."""
    terms: dict[int, int] = {}
    j = 0
    while j * (j + 1) // 2 <= n_trunc:
        terms[j * (j + 1) // 2] = (-1) ** j * (2 * j + 1)
        j += 1
    return QSeries.from_terms(n_trunc, terms)


def delta_qexp(n_trunc: int) -> QSeries:
    """Weight-12 cusp form q prod (1-q^n)^24; coefficient of q^n is tau(n).

    Built as three dense squarings of the sparse cube of Euler's product,
    then one shift by q.  Exact integers throughout.
    """
    if n_trunc < 1:
        raise ValueError(f"delta_qexp needs order >= 1, got {n_trunc}")
    e24 = eta3_qexp(n_trunc - 1).square().square().square()
    c = [0] + e24.coeff
    return QSeries(n_trunc, c)


def eisenstein_qexp(weight: int, n_trunc: int) -> QSeries:
    """Normalized Eisenstein series E4 or E6 with exact coefficients."""
    if weight not in (4, 6):
        raise ValueError(f"only weights 4 and 6 are supported, got {weight}")
    if weight == 4:
        mult, e = 240, 3
    else:
        mult, e = -504, 5
    table = sigma_table(e, n_trunc)
    c = [mult * v for v in table]
    c[0] = 1
    return QSeries(n_trunc, c)
