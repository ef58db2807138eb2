"""Brandt matrices, weight-2 theta series, and exact rational eigensystems.

The (i, j) entry of the m-th Brandt matrix counts lattice points of a fixed
norm in the pairing lattice conj(I_j)·I_i, divided by the unit count e_j.
All matrices commute, have the all-ones vector as an eigenvector, and are
semisimple (conjugate to symmetric), so the rational simultaneous eigenspaces
can be extracted exactly with integer root searches on characteristic
polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .arith import factorize, is_prime
from .lattice import counts_by_value
from .linalg import charpoly, integer_roots, mat_mul, nullspace, primitive_vector
from .order import IdealClassSet, product_lattice
from .qform import LevelConfig, mass


def expected_row_sum(m: int, cfg: LevelConfig) -> int:
    """Row sum of the m-th Brandt matrix: the m-th Dirichlet coefficient of
    the order's ideal zeta function.

    Multiplicative, with local factor sigma(p^k) away from the level, 1 at
    ramified primes, and sigma(q^k) + q*sigma(q^(k-1)) at q | M (integral
    ideals survive in both local directions there).  When gcd(m, M) = 1 this
    equals the divisor sum over d | m coprime to the ramified part — in
    particular always at M = 1.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    total = 1
    for p, k in factorize(m).factors:
        if cfg.P.value % p == 0:
            continue
        sigma_k = (p ** (k + 1) - 1) // (p - 1)
        if cfg.M.value % p == 0:
            sigma_km1 = (p ** k - 1) // (p - 1)
            total *= sigma_k + p * sigma_km1
        else:
            total *= sigma_k
    return total


@dataclass(frozen=True)
class QSeries:
    """Exact q-expansion coefficients c_0..c_max of a modular form."""

    coeffs: tuple[Fraction, ...]
    label: str = ""

    def __getitem__(self, m: int) -> Fraction:
        return self.coeffs[m]

    def __len__(self) -> int:
        return len(self.coeffs)

    @property
    def max_index(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class BrandtMatrix:
    """The n×n matrix B_m, entries b_ij(m) = (pair count)/e_j, exact."""

    m: int
    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def row_sums(self) -> list[Fraction]:
        return [sum(row, Fraction(0)) for row in self.entries]

    def trace(self) -> Fraction:
        return sum((self.entries[i][i] for i in range(self.n)), Fraction(0))

    def __matmul__(self, other: "BrandtMatrix") -> tuple[tuple[Fraction, ...], ...]:
        prod = mat_mul([list(r) for r in self.entries], [list(r) for r in other.entries])
        return tuple(tuple(row) for row in prod)


def _pair_counts(classes: IdealClassSet, bound: int) -> dict:
    """counts[(i,j)][m] = #{β ∈ conj(I_j)·I_i : N(β) = m·N(I_i)·N(I_j)}, m ≤ bound.

    Counts are symmetric in (i, j) (conjugation gives a norm-preserving
    bijection between the two pairing lattices), so only i ≤ j is enumerated.
    Results live on classes.cache and are extended when a larger bound is
    requested.
    """
    cache = classes.cache.setdefault("pair_counts", {"bound": 0, "counts": {}})
    if cache["bound"] >= bound:
        return cache["counts"]
    counts: dict = {}
    for i in range(classes.n):
        Ii = classes.ideals[i]
        for j in range(i, classes.n):
            Ij = classes.ideals[j]
            W = product_lattice(Ij.lattice.conjugate(), Ii.lattice)
            scale = Ii.norm * Ij.norm
            raw = counts_by_value(W.gram(), bound * scale)
            per_m: dict[int, int] = {}
            for val, cnt in raw.items():
                q = val / scale
                assert q.denominator == 1, "pairing lattice norm not divisible by N_i·N_j"
                per_m[int(q)] = cnt
            counts[(i, j)] = per_m
            counts[(j, i)] = per_m
    cache["bound"] = bound
    cache["counts"] = counts
    return counts


def brandt_matrix(classes: IdealClassSet, m: int) -> BrandtMatrix:
    """The Brandt matrix B_m (m ≥ 0); B_0 rows are all (1/e_1, ..., 1/e_n)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    n = classes.n
    if m == 0:
        row = tuple(Fraction(1, e) for e in classes.e)
        return BrandtMatrix(0, tuple(row for _ in range(n)))
    counts = _pair_counts(classes, m)
    entries = tuple(
        tuple(Fraction(counts[(i, j)].get(m, 0), classes.e[j]) for j in range(n))
        for i in range(n)
    )
    return BrandtMatrix(m, entries)


def brandt_matrices_upto(classes: IdealClassSet, m_max: int) -> list[BrandtMatrix]:
    """[B_0, B_1, ..., B_{m_max}] with one enumeration sweep per class pair."""
    _pair_counts(classes, max(m_max, 1))
    return [brandt_matrix(classes, m) for m in range(m_max + 1)]


def theta_weight2(classes: IdealClassSet, i: int, j: int, m_max: int) -> QSeries:
    """θ_ij = Σ_m b_ij(m) q^m for the classes numbered i, j in 1..n."""
    if not (1 <= i <= classes.n and 1 <= j <= classes.n):
        raise ValueError("class indices are 1-based and must be in 1..n")
    counts = _pair_counts(classes, max(m_max, 1))
    e_j = classes.e[j - 1]
    per_m = counts[(i - 1, j - 1)]
    coeffs = [Fraction(1, e_j)]
    coeffs += [Fraction(per_m.get(m, 0), e_j) for m in range(1, m_max + 1)]
    return QSeries(tuple(coeffs), label=f"theta[{i},{j}]")


def eisenstein_e2(classes: IdealClassSet, m_max: int) -> QSeries:
    """The weight-2 Eisenstein series: constant term = mass, then row sums b_m."""
    cfg = classes.cfg
    const = classes.total_mass()
    assert const == mass(cfg), "class-set mass disagrees with the formula"
    coeffs = [const] + [Fraction(expected_row_sum(m, cfg)) for m in range(1, m_max + 1)]
    return QSeries(tuple(coeffs), label="e2")


class EigenSplitError(Exception):
    """Simultaneous rational eigenspaces stayed above dimension one."""


@dataclass
class EigenSystem:
    """Simultaneous rational eigendata of the Brandt matrices.

    u is the all-ones eigenvector (eigenvalue b_p, verified); lines holds each
    remaining one-dimensional rational eigenspace as (eigenvalue map, v) with
    v normalized so that (v_i/w_i) is a primitive integer vector whose first
    nonzero entry is positive.  v/eigenvalues point at the selected line.
    unresolved lists the dimensions of rational-irreducible blocks of
    dimension > 1 (with any rational eigenvalues they do carry).
    """

    classes: IdealClassSet
    primes: tuple[int, ...]
    u: tuple[int, ...]
    u_eigenvalues: dict[int, int]
    lines: list[tuple[dict[int, int], tuple[int, ...]]]
    unresolved: list[tuple[int, dict[int, int]]]
    v: tuple[int, ...] | None = None
    eigenvalues: dict[int, int] = field(default_factory=dict)


def good_primes(cfg: LevelConfig, count: int) -> list[int]:
    out = []
    p = 2
    while len(out) < count:
        if is_prime(p) and cfg.N % p != 0:
            out.append(p)
        p += 1
    return out


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    M = [[Fraction(x) for x in row] for row in rows]
    m = len(M)
    n = len(M[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(m):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return [M[i] for i in range(r)], pivots


@dataclass
class _Block:
    basis: list[list[Fraction]]  # RREF rows spanning the subspace
    pivots: list[int]
    eigs: dict[int, Fraction]

    @property
    def dim(self) -> int:
        return len(self.basis)


def _restrict(B: tuple[tuple[Fraction, ...], ...], blk: _Block) -> list[list[Fraction]]:
    """Matrix of x ↦ B·x on the block, in the block's RREF basis.

    With RREF basis V (pivot columns forming an identity), the image rows
    W = V·Bᵀ satisfy W = A·V with A = W[:, pivots]; the reconstruction is
    checked exactly.
    """
    V = blk.basis
    n = len(B)
    W = [[sum((V[r][t] * B[s][t] for t in range(n)), Fraction(0)) for s in range(n)] for r in range(len(V))]
    A = [[W[r][c] for c in blk.pivots] for r in range(len(V))]
    # exact invariance check: A·V must reproduce W
    AV = mat_mul(A, V)
    assert AV == W, "subspace not invariant under the Brandt matrix (bug)"
    return A


def _split_block(blk: _Block, B, p: int) -> list[_Block]:
    """Refine one invariant block by the rational eigenspaces of B_p on it."""
    if blk.dim == 1:
        A = _restrict(B, blk)
        lam = A[0][0]
        blk.eigs[p] = lam
        return [blk]
    A = _restrict(B, blk)
    k = len(A)
    den = 1
    for row in A:
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
    Ad = [[x * den for x in row] for row in A]
    lams = [Fraction(r, den) for r in integer_roots(charpoly(Ad))]

    # coefficient rows transform by y ↦ y·A, so eigenvectors are LEFT
    # eigenvectors of A and invariant subspaces are row spaces
    def lift(coeff_rows: list[list[Fraction]]) -> list[list[Fraction]]:
        width = len(blk.basis[0])
        return [
            [sum((cv[t] * blk.basis[t][s] for t in range(k)), Fraction(0)) for s in range(width)]
            for cv in coeff_rows
        ]

    out = []
    consumed = 0
    for lam in lams:
        shifted_T = [[A[c][r] - (lam if r == c else 0) for c in range(k)] for r in range(k)]
        null = nullspace(shifted_T)
        if not null:
            continue
        basis, pivots = _rref(lift(null))
        out.append(_Block(basis, pivots, {**blk.eigs, p: lam}))
        consumed += len(basis)
    if consumed < k:
        # residual block: row space of Π(A - λI) over the rational eigenvalues
        R = [[Fraction(int(r == c)) for c in range(k)] for r in range(k)]
        for lam in lams:
            shifted = [[A[r][c] - (lam if r == c else 0) for c in range(k)] for r in range(k)]
            R = mat_mul(R, shifted)
        basis, pivots = _rref(lift(R))
        assert len(basis) == k - consumed, "semisimplicity violated (bug)"
        out.append(_Block(basis, pivots, dict(blk.eigs)))
    return out


def rational_eigensystem(
    classes: IdealClassSet,
    primes: list[int] | None = None,
    ap_hint: list[int] | None = None,
    require_full: bool = False,
) -> EigenSystem:
    """Split Q^n into simultaneous rational eigenspaces of the Brandt matrices
    at the given good primes (default: the first five primes coprime to N).

    Every one-dimensional piece other than the all-ones line is reported with
    integer eigenvalues and its normalized vector; blocks that stay higher-
    dimensional are reported (raise EigenSplitError instead if require_full).
    The selected v is the hinted line if ap_hint matches, else the first line
    in eigenvalue-tuple order.
    """
    cfg = classes.cfg
    if primes is None:
        primes = good_primes(cfg, 5)
    for p in primes:
        if not is_prime(p) or cfg.N % p == 0:
            raise ValueError(f"{p} is not a prime coprime to the level")
    n = classes.n
    blocks = [_Block(*_rref([[Fraction(int(i == j)) for j in range(n)] for i in range(n)]), eigs={})]
    mats = {p: brandt_matrix(classes, p).entries for p in primes}
    for p in primes:
        nxt: list[_Block] = []
        for blk in blocks:
            nxt.extend(_split_block(blk, mats[p], p))
        blocks = nxt
    u_eigs: dict[int, int] = {}
    lines: list[tuple[dict[int, int], tuple[int, ...]]] = []
    unresolved: list[tuple[int, dict[int, int]]] = []
    w = classes.w
    for blk in blocks:
        assert all(l.denominator == 1 for l in blk.eigs.values()), "non-integer rational eigenvalue"
        eigs = {p: int(l) for p, l in blk.eigs.items()}
        if blk.dim != 1:
            unresolved.append((blk.dim, eigs))
            continue
        x = blk.basis[0]
        if all(x[i] == x[0] for i in range(n)):
            for p in primes:
                bp = expected_row_sum(p, cfg)
                assert eigs[p] == bp, f"all-ones eigenvalue {eigs[p]} != b_{p} = {bp}"
            u_eigs = eigs
            continue
        ratios = [x[i] / w[i] for i in range(n)]
        prim = primitive_vector(ratios)
        vvec = tuple(int(prim[i] * w[i]) for i in range(n))
        lines.append((eigs, vvec))
    if not u_eigs:
        raise EigenSplitError("the all-ones line did not separate; extend the prime list")
    if require_full and unresolved:
        raise EigenSplitError(
            "rational eigenspaces stayed above dimension one: "
            + ", ".join(f"dim {d} with eigenvalues {e}" for d, e in unresolved)
        )
    lines.sort(key=lambda le: tuple(le[0][p] for p in primes))
    eig = EigenSystem(
        classes=classes,
        primes=tuple(primes),
        u=tuple([1] * n),
        u_eigenvalues=u_eigs,
        lines=lines,
        unresolved=unresolved,
    )
    chosen = None
    if ap_hint is not None:
        for eigs, vvec in lines:
            if all(eigs[primes[k]] == ap_hint[k] for k in range(min(len(ap_hint), len(primes)))):
                chosen = (eigs, vvec)
                break
    elif lines:
        chosen = lines[0]
    if chosen is not None:
        eig.eigenvalues = dict(chosen[0])
        eig.v = chosen[1]
    return eig


def eigenvalue_of(classes: IdealClassSet, v: tuple[int, ...], p: int) -> int:
    """a_p for a known eigenvector v: read off from one nonzero coordinate."""
    B = brandt_matrix(classes, p).entries
    n = classes.n
    i = next(i for i in range(n) if v[i])
    num = sum((B[i][j] * v[j] for j in range(n)), Fraction(0))
    lam = num / v[i]
    # verify on all coordinates
    for r in range(n):
        assert sum((B[r][j] * v[j] for j in range(n)), Fraction(0)) == lam * v[r], (
            "v is not an eigenvector of B_%d" % p
        )
    assert lam.denominator == 1
    return int(lam)
