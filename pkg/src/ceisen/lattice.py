"""Exact lattice-point enumeration under a positive-definite quadratic form.

Standard Fincke-Pohst recursion, but every bound is computed with integer
square roots on cleared denominators, so membership of a point in the search
region is decided exactly.  Forms are given by Gram matrices with Fraction
entries; evaluation happens in the coordinate lattice Z^n.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Iterator

from .linalg import ldl


def _floor_of(A: int, C: int, E: int) -> int:
    """floor((A + sqrt(C)) / E) for integers A, C >= 0, E > 0, exactly."""
    s = isqrt(C)
    k = (A + s) // E
    # isqrt truncates; nudge up while (k+1)·E - A <= sqrt(C) still holds
    while True:
        t = (k + 1) * E - A
        if t <= 0 or t * t <= C:
            k += 1
        else:
            return k


def _ceil_of(A: int, C: int, E: int) -> int:
    """ceil((A - sqrt(C)) / E) for integers A, C >= 0, E > 0, exactly."""
    return -_floor_of(-A, C, E)


def _coeff_range(center: Fraction, radius_sq: Fraction) -> range:
    """Integers m with (m + center)^2 <= radius_sq, exactly."""
    if radius_sq < 0:
        return range(0)
    # m in [-center - r, -center + r] with r = sqrt(radius_sq)
    a, b = (-center).numerator, (-center).denominator
    p, q = radius_sq.numerator, radius_sq.denominator
    # common denominator b·q: bounds ((a·q) ± sqrt(p·q·b²)) / (b·q)
    A = a * q
    C = p * q * b * b
    E = b * q
    lo = _ceil_of(A, C, E)
    hi = _floor_of(A, C, E)
    return range(lo, hi + 1)


def points_up_to(G: list[list[Fraction]], bound: Fraction) -> Iterator[tuple[tuple[int, ...], Fraction]]:
    """Yield all nonzero integer vectors c with c^T G c <= bound, with the value.

    Both c and -c are produced.  G must be symmetric positive definite.
    """
    n = len(G)
    bound = Fraction(bound)
    if bound < 0:
        return
    D, R = ldl(G)
    c = [0] * n
    budget = [Fraction(0)] * (n + 1)
    budget[n] = bound

    def rec(i: int) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        if i < 0:
            tup = tuple(c)
            if any(tup):
                yield tup, bound - budget[0]
            return
        center = sum((R[i][j] * c[j] for j in range(i + 1, n)), Fraction(0))
        for m in _coeff_range(center, budget[i + 1] / D[i]):
            c[i] = m
            term = D[i] * (m + center) ** 2
            budget[i] = budget[i + 1] - term
            yield from rec(i - 1)
        c[i] = 0

    yield from rec(n - 1)


def counts_by_value(G: list[list[Fraction]], bound: Fraction) -> dict[Fraction, int]:
    """Number of nonzero lattice vectors at each form value <= bound (both signs counted)."""
    out: dict[Fraction, int] = {}
    for _, val in points_up_to(G, bound):
        out[val] = out.get(val, 0) + 1
    return out


def counts_with_primitive(G: list[list[Fraction]], bound: Fraction) -> tuple[dict[Fraction, int], dict[Fraction, int]]:
    """Like counts_by_value, plus separate counts of primitive vectors (coordinate gcd 1)."""
    allc: dict[Fraction, int] = {}
    prim: dict[Fraction, int] = {}
    for coords, val in points_up_to(G, bound):
        allc[val] = allc.get(val, 0) + 1
        g = 0
        for x in coords:
            g = gcd(g, abs(x))
        if g == 1:
            prim[val] = prim.get(val, 0) + 1
    return allc, prim


def exists_value(G: list[list[Fraction]], target: Fraction) -> bool:
    """Whether some lattice vector has form value exactly target (early exit)."""
    target = Fraction(target)
    if target == 0:
        return True
    for _, val in points_up_to(G, target):
        if val == target:
            return True
    return False


def shortest_vector(G: list[list[Fraction]]) -> tuple[tuple[int, ...], Fraction]:
    """A canonical shortest nonzero vector: minimal value, then lexicographically
    least coordinate tuple after normalizing the sign of the first nonzero entry."""
    # Minkowski-ish initial bound, grown until something is found
    n = len(G)
    det = Fraction(1)
    D, _ = ldl(G)
    for d in D:
        det *= d
    # start near the n-th root of det
    num, den = det.numerator, det.denominator
    guess = Fraction(max(1, isqrt(isqrt(num * den ** 3)) + 1), den) if n == 4 else None
    bound = guess if guess else Fraction(max(1, min(G[i][i] for i in range(n))))
    bound = max(bound, Fraction(1))
    while True:
        best: tuple[Fraction, tuple[int, ...]] | None = None
        for coords, val in points_up_to(G, bound):
            lead = next(x for x in coords if x)
            canon = coords if lead > 0 else tuple(-x for x in coords)
            key = (val, canon)
            if best is None or key < best:
                best = key
        if best is not None:
            return best[1], best[0]
        bound *= 2
