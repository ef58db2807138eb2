"""The weight-3/2 side: ternary trace-zero lattices and their theta series.

For each ideal class, the trace-zero part of Z + 2R_i is a rank-3 positive
definite lattice with integral Gram matrix whose represented values are
≡ 0, 3 (mod 4).  Counting vectors gives the series g_i; the weighted sums
Σ g_i/w_i and Σ v_i g_i/w_i are the half-integral-weight Eisenstein series H
and the cusp-side series G.  Primitive-vector counts give optimal-embedding
numbers which tie H to pure class-number data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .arith import Discriminant, discriminant_decompositions, eichler_symbol
from .brandt import EigenSystem, brandt_matrices_upto
from .lattice import counts_with_primitive
from .linalg import int_kernel, ldl, mat_det
from .order import IdealClassSet, Lat4
from .qform import class_number, mass, unit_factor


@dataclass(frozen=True)
class TernaryLattice:
    """Trace-zero sublattice of Z + 2R_i (1-based class index i)."""

    class_index: int
    gram: tuple[tuple[int, ...], ...]

    @property
    def det(self) -> int:
        d = mat_det([[Fraction(x) for x in row] for row in self.gram])
        return int(d)


@dataclass(frozen=True)
class HalfIntegralSeries:
    """Coefficients c_0..c_max of a weight-3/2 form; kind ∈ {g, H, G}."""

    coeffs: tuple[Fraction, ...]
    kind: str

    def __getitem__(self, D: int) -> Fraction:
        return self.coeffs[D]

    def __len__(self) -> int:
        return len(self.coeffs)

    @property
    def max_index(self) -> int:
        return len(self.coeffs) - 1


def ternary_lattice(classes: IdealClassSet, i: int) -> TernaryLattice:
    """The trace-zero rank-3 lattice of Z + 2R_i with its integral Gram matrix."""
    if not 1 <= i <= classes.n:
        raise ValueError("class index is 1-based and must be in 1..n")
    cached = classes.cache.setdefault("ternary_lattice", {})
    if i in cached:
        return cached[i]
    R = classes.right_orders[i - 1]
    B = classes.algebra
    L = Lat4.span(B, [B.one] + [b * 2 for b in R.basis])
    # trace of (Σ c_k b_k)/den vanishes iff Σ c_k · (2·first coord of row k) = 0
    trace_row = [[2 * L.rows[k][0] for k in range(4)]]
    kernel = int_kernel(trace_row)
    assert len(kernel) == 3, "trace-zero sublattice must have rank 3"
    elems = [L.element_from(c) for c in kernel]
    assert all(e.trace() == 0 for e in elems)
    G = [[Fraction(0)] * 3 for _ in range(3)]
    for k in range(3):
        for l in range(3):
            G[k][l] = (elems[k] * elems[l].conj()).trace() / 2
            assert G[k][l].denominator == 1, "ternary Gram must be integral"
    ldl(G)  # raises if not positive definite
    lat = TernaryLattice(i, tuple(tuple(int(x) for x in row) for row in G))
    cached[i] = lat
    return lat


def _ternary_counts(classes: IdealClassSet, i: int, bound: int) -> tuple[dict, dict]:
    """(all, primitive) vector counts by norm value up to bound for class i (1-based)."""
    cache = classes.cache.setdefault("ternary_counts", {})
    got = cache.get(i)
    if got is None or got["bound"] < bound:
        lat = ternary_lattice(classes, i)
        G = [[Fraction(x) for x in row] for row in lat.gram]
        allc, prim = counts_with_primitive(G, Fraction(bound))
        alld = {int(v): c for v, c in allc.items()}
        primd = {int(v): c for v, c in prim.items()}
        for D in alld:
            assert D % 4 in (0, 3), "represented value outside the plus space"
        got = {"bound": bound, "all": alld, "prim": primd}
        cache[i] = got
    return got["all"], got["prim"]


def g_coefficients(lat: TernaryLattice, D_max: int) -> HalfIntegralSeries:
    """g_i = ½ + ½ Σ_D a_i(D) q^D where a_i(D) counts trace-zero vectors of norm D."""
    if D_max < 0:
        raise ValueError("D_max must be >= 0")
    G = [[Fraction(x) for x in row] for row in lat.gram]
    allc, _ = counts_with_primitive(G, Fraction(max(D_max, 0)))
    coeffs = [Fraction(1, 2)] + [Fraction(0)] * D_max
    for v, c in allc.items():
        D = int(v)
        if D <= D_max:
            assert D % 4 in (0, 3), "represented value outside the plus space"
            coeffs[D] = Fraction(c, 2)
    return HalfIntegralSeries(tuple(coeffs), kind="g")


def vector_count(classes: IdealClassSet, i: int, D: int) -> int:
    """a_i(D): number of trace-zero vectors of norm D in class i (1-based)."""
    if D == 0:
        return 1
    allc, _ = _ternary_counts(classes, i, D)
    return allc.get(D, 0)


def prefill_counts(classes: IdealClassSet, bound: int, threads: int = 1) -> None:
    """Fill every per-class count cache up to `bound`, one class per task.

    Each task touches only its own class index, and every cache entry is a
    pure function of (class, bound), so the merged cache — and everything
    derived from it — is identical for any thread count.
    """
    indices = range(1, classes.n + 1)
    if threads <= 1:
        for i in indices:
            _ternary_counts(classes, i, bound)
        return
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(lambda i: _ternary_counts(classes, i, bound), indices))


def cohen_H(classes: IdealClassSet, D_max: int) -> HalfIntegralSeries:
    """The weight-3/2 Eisenstein series H = Σ g_i/w_i from lattice counts alone."""
    if D_max < 0:
        raise ValueError("D_max must be >= 0")
    n = classes.n
    sweeps = [_ternary_counts(classes, i, max(D_max, 1))[0] for i in range(1, n + 1)]
    const = classes.total_mass()
    assert const == mass(classes.cfg)
    coeffs = [const] + [Fraction(0)] * D_max
    for i in range(n):
        e_i = classes.e[i]
        for D, c in sweeps[i].items():
            if 1 <= D <= D_max:
                coeffs[D] += Fraction(c, e_i)  # a_i(D)/(2 w_i)
    return HalfIntegralSeries(tuple(coeffs), kind="H")


def cusp_G(classes: IdealClassSet, eig: EigenSystem, D_max: int) -> HalfIntegralSeries:
    """The cusp-side series G = Σ v_i g_i/w_i; coefficients m_D are integers."""
    if eig.v is None:
        raise ValueError("the eigensystem carries no rational cusp line v")
    v = eig.v
    n = classes.n
    sweeps = [_ternary_counts(classes, i, max(D_max, 1))[0] for i in range(1, n + 1)]
    const = sum((Fraction(v[i], classes.e[i]) for i in range(n)), Fraction(0))
    coeffs = [const] + [Fraction(0)] * D_max
    for i in range(n):
        e_i = classes.e[i]
        for D, c in sweeps[i].items():
            if 1 <= D <= D_max:
                coeffs[D] += Fraction(v[i] * c, e_i)
    for D in range(1, D_max + 1):
        assert coeffs[D].denominator == 1, f"m_{D} is not an integer (normalization bug)"
    return HalfIntegralSeries(tuple(coeffs), kind="G")


def optimal_embedding_count(classes: IdealClassSet, i: int, d) -> int:
    """h(O_d, R_i): optimal-embedding classes of the quadratic order of
    discriminant d into R_i, as u(d)·(primitive vectors of norm |d|)/w_i.

    A non-integer value signals a lattice or unit-count bug and raises.
    """
    disc = d if isinstance(d, Discriminant) else Discriminant.of(d)
    _, prim = _ternary_counts(classes, i, -disc.d)
    cnt = prim.get(-disc.d, 0)
    val = Fraction(unit_factor(disc.d) * cnt, classes.w[i - 1])
    if val.denominator != 1:
        raise ArithmeticError(
            f"embedding count u(d)·{cnt}/w_{i} = {val} is not an integer (d={disc.d})"
        )
    return int(val)


def embedding_count_identity(classes: IdealClassSet, d) -> tuple[int, int]:
    """(lhs, rhs) of the embedding-count sum identity:
    Σ_i h(O_d, R_i)  vs  h(d)·∏_{p|P}(1−{d/p})·∏_{q|M}(1+{d/q})."""
    disc = d if isinstance(d, Discriminant) else Discriminant.of(d)
    lhs = sum(optimal_embedding_count(classes, i, disc) for i in range(1, classes.n + 1))
    rhs = class_number(disc.d)
    for p in classes.cfg.P.primes:
        rhs *= 1 - eichler_symbol(-disc.d, p)
    for q in classes.cfg.M.primes:
        rhs *= 1 + eichler_symbol(-disc.d, q)
    return lhs, rhs


@dataclass(frozen=True)
class TraceCheckRow:
    m: int
    lhs: Fraction  # Tr(B_m)
    rhs: Fraction  # Σ_{s² ≤ 4m} H(4m − s²)
    ok: bool


def trace_identity_check(classes: IdealClassSet, m_max: int) -> list[TraceCheckRow]:
    """Exact comparison of Brandt traces against windowed sums of H coefficients."""
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    mats = brandt_matrices_upto(classes, m_max)
    H = cohen_H(classes, 4 * m_max if m_max else 0)
    rows = []
    for m in range(m_max + 1):
        lhs = mats[m].trace()
        rhs = Fraction(0)
        s = 0
        while s * s <= 4 * m:
            term = H[4 * m - s * s]
            rhs += term if s == 0 else 2 * term
            s += 1
        rows.append(TraceCheckRow(m, lhs, rhs, lhs == rhs))
    return rows
