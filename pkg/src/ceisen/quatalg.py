"""Definite rational quaternion algebras (a, b) with exact element arithmetic.

An algebra is generated by i, j with i² = a < 0, j² = b < 0, ij = -ji = k.
Elements carry Fraction coordinates over the basis (1, i, j, k).  Ramified
primes are certified by Hilbert symbols, and algebras with a prescribed
ramified set are found by a bounded deterministic search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .arith import factorize, is_prime, squarefree_kernel, valuation, kronecker


class AlgebraSearchError(Exception):
    """No (a, b) pair with the requested ramification inside the search bound."""


def _square_class(x: Fraction) -> int:
    """An integer in the square class of the nonzero rational x."""
    if x == 0:
        raise ValueError("0 has no square class")
    return squarefree_kernel(x.numerator * x.denominator)


def hilbert_symbol(a, b, p) -> int:
    """Hilbert symbol (a, b)_p over Q_p, p a prime or math.inf.

    Computed by the classical local formulas on square-class representatives;
    exact for any nonzero rationals a, b.
    """
    a = Fraction(a)
    b = Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("hilbert symbol needs nonzero arguments")
    am = _square_class(a)
    bm = _square_class(b)
    if p == math.inf:
        return -1 if (am < 0 and bm < 0) else 1
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    alpha = valuation(am, p)
    beta = valuation(bm, p)
    u = am // p**alpha
    v = bm // p**beta
    if p != 2:
        eps = (p - 1) // 2
        sign = -1 if (alpha * beta * eps) % 2 else 1
        if beta % 2:
            sign *= kronecker(u, p)
        if alpha % 2:
            sign *= kronecker(v, p)
        return sign
    eu = ((u - 1) // 2) % 2
    ev = ((v - 1) // 2) % 2
    wu = ((u * u - 1) // 8) % 2
    wv = ((v * v - 1) // 8) % 2
    return -1 if (eu * ev + alpha * wv + beta * wu) % 2 else 1


def ramified_primes(a, b) -> tuple[int, ...]:
    """Finite primes where (a, b) ramifies: symbol -1, only possible at p | 2ab."""
    am = _square_class(Fraction(a))
    bm = _square_class(Fraction(b))
    ps = {2}
    ps.update(factorize(abs(am)).primes)
    ps.update(factorize(abs(bm)).primes)
    ram = tuple(sorted(p for p in ps if hilbert_symbol(a, b, p) == -1))
    # product formula over all places: (-1)-count including infinity is even
    inf = hilbert_symbol(a, b, math.inf)
    if (len(ram) + (1 if inf == -1 else 0)) % 2:
        raise ArithmeticError("Hilbert product formula violated (bug)")
    return ram


@dataclass(frozen=True)
class QuaternionAlgebra:
    """The definite algebra with i² = a, j² = b, ij = -ji = k."""

    a: int
    b: int
    ramified: tuple[int, ...]

    @classmethod
    def create(cls, a: int, b: int) -> "QuaternionAlgebra":
        if a >= 0 or b >= 0:
            raise ValueError("definite algebras need a < 0 and b < 0")
        return cls(a, b, ramified_primes(a, b))

    def element(self, x0, x1=0, x2=0, x3=0) -> "QuatElement":
        return QuatElement(self, (Fraction(x0), Fraction(x1), Fraction(x2), Fraction(x3)))

    @property
    def one(self) -> "QuatElement":
        return self.element(1)

    @property
    def gens(self) -> tuple["QuatElement", ...]:
        return (self.element(1), self.element(0, 1), self.element(0, 0, 1), self.element(0, 0, 0, 1))

    @property
    def discriminant(self) -> int:
        d = 1
        for p in self.ramified:
            d *= p
        return d


@dataclass(frozen=True)
class QuatElement:
    """A quaternion with Fraction coordinates over (1, i, j, k)."""

    algebra: QuaternionAlgebra
    coords: tuple[Fraction, Fraction, Fraction, Fraction]

    def _check(self, other: "QuatElement"):
        if self.algebra != other.algebra:
            raise ValueError("elements of different algebras")

    def __add__(self, other: "QuatElement") -> "QuatElement":
        self._check(other)
        return QuatElement(self.algebra, tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __sub__(self, other: "QuatElement") -> "QuatElement":
        self._check(other)
        return QuatElement(self.algebra, tuple(x - y for x, y in zip(self.coords, other.coords)))

    def __neg__(self) -> "QuatElement":
        return QuatElement(self.algebra, tuple(-x for x in self.coords))

    def __mul__(self, other) -> "QuatElement":
        if isinstance(other, (int, Fraction)):
            return QuatElement(self.algebra, tuple(x * other for x in self.coords))
        self._check(other)
        a = self.algebra.a
        b = self.algebra.b
        x0, x1, x2, x3 = self.coords
        y0, y1, y2, y3 = other.coords
        return QuatElement(
            self.algebra,
            (
                x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
                x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
                x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
                x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
            ),
        )

    def __rmul__(self, other) -> "QuatElement":
        if isinstance(other, (int, Fraction)):
            return QuatElement(self.algebra, tuple(other * x for x in self.coords))
        return NotImplemented

    def __truediv__(self, scalar) -> "QuatElement":
        return QuatElement(self.algebra, tuple(x / scalar for x in self.coords))

    def conj(self) -> "QuatElement":
        x0, x1, x2, x3 = self.coords
        return QuatElement(self.algebra, (x0, -x1, -x2, -x3))

    def trace(self) -> Fraction:
        return 2 * self.coords[0]

    def norm(self) -> Fraction:
        a = self.algebra.a
        b = self.algebra.b
        x0, x1, x2, x3 = self.coords
        return x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3

    def is_zero(self) -> bool:
        return not any(self.coords)

    def inverse(self) -> "QuatElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero quaternion")
        return self.conj() / n


def construct_algebra(ramified_set, bound: int | None = None) -> QuaternionAlgebra:
    """Smallest (|a|+|b|, |a|) pair of negative squarefree a, b realizing the
    prescribed finite ramified set (which must have odd size).

    The returned algebra carries its certified ramified tuple; raises
    AlgebraSearchError if nothing is found within the bound.
    """
    S = tuple(sorted(set(int(p) for p in ramified_set)))
    if not S or len(S) % 2 == 0:
        raise ValueError("ramified set must be a nonempty set of odd size")
    for p in S:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
    prod = 1
    for p in S:
        prod *= p
    limit = bound if bound is not None else 8 * prod + 16
    for t in range(2, limit + 1):
        for na in range(1, t):
            nb = t - na
            a, b = -na, -nb
            if squarefree_kernel(a) != a or squarefree_kernel(b) != b:
                continue
            if ramified_primes(a, b) == S:
                return QuaternionAlgebra(a, b, S)
    raise AlgebraSearchError(
        f"no definite algebra with ramified set {list(S)} found with |a|+|b| <= {limit}"
    )
