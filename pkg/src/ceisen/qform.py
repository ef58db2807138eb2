"""Binary quadratic forms, class numbers, and the closed coefficient formulas.

Class numbers are obtained by counting primitive reduced forms directly; the
closed formulas combine them with the local symbols from `arith`.  All values
are exact (int / Fraction).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from .arith import (
    Discriminant,
    FactoredInt,
    discriminant_decompositions,
    eichler_symbol,
    factorize,
    is_prime,
    kronecker,
)


@dataclass(frozen=True)
class ReducedForm:
    """A reduced primitive positive form a·x² + b·xy + c·y²."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c


def reduced_forms(d: int) -> list[ReducedForm]:
    """All primitive reduced forms of negative discriminant d.

    Reduced means |b| <= a <= c with b >= 0 whenever |b| = a or a = c.
    """
    if d >= 0 or d % 4 not in (0, 1):
        raise ValueError(f"{d} is not a negative discriminant")
    forms = []
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a, a + 1):
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and (-b == a or a == c):
                continue
            if gcd(gcd(a, abs(b)), c) != 1:
                continue
            forms.append(ReducedForm(a, b, c))
        a += 1
    return forms


@lru_cache(maxsize=None)
def class_number(d: int) -> int:
    """h(d): the number of classes of primitive forms of discriminant d < 0."""
    return len(reduced_forms(d))


def unit_factor(d: int) -> int:
    """Half the number of units: 3 for d = -3, 2 for d = -4, else 1."""
    if d >= 0 or d % 4 not in (0, 1):
        raise ValueError(f"{d} is not a negative discriminant")
    if d == -3:
        return 3
    if d == -4:
        return 2
    return 1


@dataclass(frozen=True)
class LevelConfig:
    """A square-free level split as P·M: P the ramified part, M coprime to it.

    P must be a product of an odd number of distinct primes; M is square-free
    and coprime to P.
    """

    P: FactoredInt
    M: FactoredInt

    def __post_init__(self):
        if not self.P.is_squarefree or not self.M.is_squarefree:
            raise ValueError("level parts must be squarefree")
        if len(self.P.factors) % 2 == 0 or self.P.value < 2:
            raise ValueError("ramified part needs an odd number of primes")
        if gcd(self.P.value, self.M.value) != 1:
            raise ValueError("P and M must be coprime")

    @classmethod
    def from_primes(cls, ramified: tuple[int, ...] | list[int], M: int = 1) -> "LevelConfig":
        ram = sorted(set(int(p) for p in ramified))
        for p in ram:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        if M < 1:
            raise ValueError("M must be >= 1")
        P = 1
        for p in ram:
            P *= p
        return cls(factorize(P), factorize(M))

    @property
    def N(self) -> int:
        return self.P.value * self.M.value

    @property
    def ramified(self) -> tuple[int, ...]:
        return self.P.primes

    @property
    def level_primes(self) -> tuple[int, ...]:
        return tuple(sorted(self.P.primes + self.M.primes))

    def describe(self) -> str:
        return f"N={self.N} (ramified {list(self.P.primes)}, M={self.M.value})"


def mass(cfg: LevelConfig) -> Fraction:
    """(1/24)·prod_{p|P}(p-1)·prod_{q|M}(q+1) — the exact stopping certificate
    for the class enumeration."""
    m = Fraction(1, 24)
    for p in cfg.P.primes:
        m *= p - 1
    for q in cfg.M.primes:
        m *= q + 1
    return m


def closed_form_H(D: int, cfg: LevelConfig) -> Fraction:
    """The closed class-number formula for the degree-D coefficient, D > 0.

    Sums h(d)/u(d) times the local factors over all splittings -D = d·f²,
    then halves.  Zero exactly when D ≡ 1, 2 (mod 4) (empty sum).
    """
    if D <= 0:
        raise ValueError("D must be positive")
    total = Fraction(0)
    for disc, _f in discriminant_decompositions(D):
        term = Fraction(class_number(disc.d), unit_factor(disc.d))
        for p in cfg.P.primes:
            term *= 1 - eichler_symbol(-disc.d, p)
        for q in cfg.M.primes:
            term *= 1 + eichler_symbol(-disc.d, q)
        total += term
    return total / 2


def kronecker_condition(D: int, cfg: LevelConfig) -> bool:
    """Admissibility of -D: (-D/p) != 1 for ramified p, (-D/q) != -1 for q | M."""
    return all(kronecker(-D, p) != 1 for p in cfg.P.primes) and all(
        kronecker(-D, q) != -1 for q in cfg.M.primes
    )


def s_ramified(D: int, cfg: LevelConfig) -> int:
    """Number of level primes at which -D ramifies (Kronecker symbol zero)."""
    return sum(1 for p in cfg.level_primes if kronecker(-D, p) == 0)


def corollary_H(D: int, cfg: LevelConfig) -> Fraction:
    """Piecewise two-power form of the coefficient at fundamental admissible -D.

    Requires -D fundamental and the Kronecker admissibility condition; then the
    value is 2^(omega(N)-1-s(D)) · h(-D)/u(-D).
    """
    disc = Discriminant.of(-D)
    if not disc.is_fundamental:
        raise ValueError(f"-{D} is not a fundamental discriminant")
    if not kronecker_condition(D, cfg):
        raise ValueError(f"-{D} fails the admissibility condition at {cfg.describe()}")
    omega = len(cfg.P.factors) + len(cfg.M.factors)
    s = s_ramified(D, cfg)
    return Fraction(class_number(-D), unit_factor(-D)) * Fraction(2) ** (omega - 1 - s)
