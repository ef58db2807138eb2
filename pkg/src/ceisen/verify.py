"""Congruence suites and the divisibility study.

Two congruences are checked mod an odd prime l: the eigenvalue congruence
a_p ≡ (row sum) for good primes p, and the coefficient congruence
λ·(cusp coefficients) ≡ (Eisenstein coefficients) for a single unit λ.  The
divisibility table then compares l | m_D against l | h(−D) over the
admissible family of fundamental discriminants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .arith import is_prime, primes_up_to
from .brandt import EigenSystem, eigenvalue_of, expected_row_sum
from .order import IdealClassSet
from .qform import LevelConfig, class_number, kronecker_condition, s_ramified
from .theta32 import HalfIntegralSeries, cusp_G


class CongruencePreconditionError(Exception):
    """The congruence hypotheses fail before any comparison can run."""


@dataclass
class CongruenceReport:
    l: int
    kind: str  # "eigenvalue" or "coefficient"
    lam: int | None
    reason: str  # "found" | "not-applicable" | "indeterminate" | "inconsistent"
    checked_max: int  # p_max or D_max
    failures: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        if self.kind == "coefficient":
            return self.lam is not None and not self.failures
        return not self.failures


def _require_odd_prime(l: int) -> None:
    if l == 2 or not is_prime(l):
        raise CongruencePreconditionError(f"l = {l} is not an odd prime")


def eigenvalue_congruence(
    eig: EigenSystem, cfg: LevelConfig, l: int, p_max: int, v: tuple[int, ...] | None = None
) -> CongruenceReport:
    """Check a_p ≡ b_p (mod l) for every prime p ≤ p_max coprime to the level."""
    _require_odd_prime(l)
    for w in eig.classes.w:
        if w % l == 0:
            raise CongruencePreconditionError(f"w_i = {w} is not invertible mod {l}")
    if v is None:
        v = eig.v
    if v is None:
        raise CongruencePreconditionError("no rational cusp line available")
    failures = []
    for p in primes_up_to(p_max):
        if cfg.N % p == 0:
            continue
        a_p = eig.eigenvalues.get(p) if v == eig.v else None
        if a_p is None:
            a_p = eigenvalue_of(eig.classes, v, p)
        b_p = expected_row_sum(p, cfg)
        if (a_p - b_p) % l != 0:
            failures.append((p, a_p % l, b_p % l))
    return CongruenceReport(l=l, kind="eigenvalue", lam=None, reason="not-applicable",
                            checked_max=p_max, failures=failures)


def coefficient_congruence(H: HalfIntegralSeries, G: HalfIntegralSeries, l: int) -> CongruenceReport:
    """Find a unit λ with λ·G ≡ H (mod l) coefficientwise, if one exists.

    Both series are first cleared by the global lcm of their coefficient
    denominators, so the comparison is between integers; when l does not
    divide that lcm this is equivalent to the direct rational comparison.
    λ comes from the first index where both cleared reductions are nonzero
    and is then verified everywhere; report lam=None with a reason otherwise.
    """
    _require_odd_prime(l)
    if len(H) != len(G):
        raise CongruencePreconditionError("series cover different coefficient ranges")
    D_max = H.max_index
    L = 1
    for series in (H, G):
        for c in series.coeffs:
            L = L * c.denominator // gcd(L, c.denominator)
    A = [int(H[D] * L) for D in range(D_max + 1)]  # Eisenstein side, cleared
    B = [int(G[D] * L) for D in range(D_max + 1)]  # cusp side, cleared
    lam = None
    for D in range(D_max + 1):
        if A[D] % l and B[D] % l:
            lam = (A[D] * pow(B[D], -1, l)) % l
            break
    if lam is None:
        if all(a % l == 0 for a in A) and all(b % l == 0 for b in B):
            return CongruenceReport(l, "coefficient", None, "indeterminate", D_max)
        failures = [(D, B[D] % l, A[D] % l)
                    for D in range(D_max + 1) if (A[D] % l == 0) != (B[D] % l == 0)]
        return CongruenceReport(l, "coefficient", None, "inconsistent", D_max, failures)
    failures = []
    for D in range(D_max + 1):
        lhs = (lam * B[D]) % l
        rhs = A[D] % l
        if lhs != rhs:
            failures.append((D, lhs, rhs))
    if failures:
        return CongruenceReport(l, "coefficient", None, "inconsistent", D_max, failures)
    return CongruenceReport(l, "coefficient", lam, "found", D_max)


def best_coefficient_congruence(
    classes: IdealClassSet, eig: EigenSystem, H: HalfIntegralSeries, l: int
) -> tuple[CongruenceReport, tuple[int, ...] | None]:
    """Try every rational cusp line in deterministic order; return the first
    whose G admits a global λ, else the first line's report."""
    _require_odd_prime(l)
    if not eig.lines:
        raise CongruencePreconditionError("no rational cusp line available")
    first_report = None
    for eigs, v in eig.lines:
        sub = EigenSystem(
            classes=classes, primes=eig.primes, u=eig.u, u_eigenvalues=eig.u_eigenvalues,
            lines=eig.lines, unresolved=eig.unresolved, v=v, eigenvalues=dict(eigs),
        )
        G = cusp_G(classes, sub, H.max_index)
        report = coefficient_congruence(H, G, l)
        if report.lam is not None:
            return report, v
        if first_report is None:
            first_report = report
    return first_report, eig.lines[0][1]


@dataclass(frozen=True)
class DivisibilityRow:
    D: int
    fundamental: bool
    s: int
    h: int
    h_mod_l: int
    m_D: int
    m_D_mod_l: int
    agree: bool


def admissible_fundamental_Ds(cfg: LevelConfig, D_max: int) -> list[int]:
    """D ≤ D_max with −D fundamental and the level's Kronecker condition."""
    from .arith import Discriminant

    out = []
    for D in range(3, D_max + 1):
        if (-D) % 4 not in (0, 1):
            continue
        disc = Discriminant.of(-D)
        if not disc.is_fundamental:
            continue
        if kronecker_condition(D, cfg):
            out.append(D)
    return out


def divisibility_table(
    classes: IdealClassSet, eig: EigenSystem, l: int, D_max: int,
    v: tuple[int, ...] | None = None,
) -> list[DivisibilityRow]:
    """One row per admissible fundamental −D: does l | h(−D) ⇔ l | m_D hold?"""
    _require_odd_prime(l)
    if v is None:
        v = eig.v
    if v is None:
        raise CongruencePreconditionError("no rational cusp line available")
    sub = EigenSystem(
        classes=classes, primes=eig.primes, u=eig.u, u_eigenvalues=eig.u_eigenvalues,
        lines=eig.lines, unresolved=eig.unresolved, v=v, eigenvalues={},
    )
    G = cusp_G(classes, sub, D_max)
    cfg = classes.cfg
    rows = []
    for D in admissible_fundamental_Ds(cfg, D_max):
        h = class_number(-D)
        m_D = int(G[D])
        agree = (h % l == 0) == (m_D % l == 0)
        rows.append(DivisibilityRow(
            D=D, fundamental=True, s=s_ramified(D, cfg), h=h, h_mod_l=h % l,
            m_D=m_D, m_D_mod_l=m_D % l, agree=agree,
        ))
    return rows
