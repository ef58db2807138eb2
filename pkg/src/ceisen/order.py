"""Orders and left ideals in definite quaternion algebras, with exact lattices.

A lattice is stored as a canonical pair (denominator, HNF integer rows) of
coordinates over the algebra basis (1, i, j, k), so equal lattices compare
equal.  Maximal orders come from prime-by-prime saturation of the obvious
starting order; level structure at primes coprime to the discriminant is cut
out by a splitting idempotent.  Left ideal classes are enumerated by a
neighbor walk at the smallest good prime, stopped exactly by the mass formula.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from .arith import factorize, is_prime, valuation
from .lattice import counts_by_value, exists_value, shortest_vector
from .linalg import hnf, mat_det, mat_inv, mat_vec
from .qform import LevelConfig, mass
from .quatalg import QuatElement, QuaternionAlgebra


class SaturationError(Exception):
    """p-saturation could not enlarge a non-maximal order at p."""


class SplittingError(Exception):
    """No splitting idempotent found mod q (q must be coprime to the discriminant)."""


class MassOvershootError(Exception):
    """The accumulated mass exceeded the formula value — an ideal was double-counted."""


class ClassSearchError(Exception):
    """The neighbor walk stalled before reaching the mass (should be unreachable)."""


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _canonical_basis(gens: list[QuatElement]) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """Canonical (denominator, HNF rows) for the lattice spanned by gens."""
    den = 1
    for g in gens:
        for x in g.coords:
            den = _lcm(den, x.denominator)
    rows = [[int(x * den) for x in g.coords] for g in gens]
    H = hnf(rows)
    if len(H) != 4:
        raise ValueError(f"expected a full-rank lattice, got rank {len(H)}")
    # normalize common content into the denominator
    g = den
    for row in H:
        for x in row:
            g = gcd(g, abs(x))
    if g > 1:
        den //= g
        H = [[x // g for x in row] for row in H]
    return den, tuple(tuple(row) for row in H)


@dataclass(frozen=True)
class Lat4:
    """A full rank-4 lattice in a quaternion algebra, in canonical form."""

    algebra: QuaternionAlgebra
    den: int
    rows: tuple[tuple[int, ...], ...]

    @classmethod
    def span(cls, algebra: QuaternionAlgebra, gens: list[QuatElement]) -> "Lat4":
        den, rows = _canonical_basis(gens)
        return cls(algebra, den, rows)

    @property
    def basis(self) -> list[QuatElement]:
        return [
            QuatElement(self.algebra, tuple(Fraction(x, self.den) for x in row))
            for row in self.rows
        ]

    def basis_matrix(self) -> list[list[Fraction]]:
        return [[Fraction(x, self.den) for x in row] for row in self.rows]

    def gram(self) -> list[list[Fraction]]:
        """Gram matrix of the reduced norm form on this basis."""
        bs = self.basis
        G = [[Fraction(0)] * 4 for _ in range(4)]
        for k in range(4):
            for l in range(k, 4):
                G[k][l] = G[l][k] = (bs[k] * bs[l].conj()).trace() / 2
        return G

    def contains(self, x: QuatElement) -> bool:
        c = self.coords_of(x)
        return all(v.denominator == 1 for v in c)

    def coords_of(self, x: QuatElement) -> list[Fraction]:
        inv = _inv_cache(self)
        return mat_vec(inv, list(x.coords))

    def element_from(self, coords) -> QuatElement:
        acc = self.algebra.element(0)
        for c, b in zip(coords, self.basis):
            acc = acc + b * Fraction(c)
        return acc

    def scaled(self, s: Fraction) -> "Lat4":
        s = Fraction(s)
        return Lat4.span(self.algebra, [b * s for b in self.basis])

    def conjugate(self) -> "Lat4":
        return Lat4.span(self.algebra, [b.conj() for b in self.basis])

    def norm(self) -> Fraction:
        """gcd of the reduced norms of all lattice elements (a positive rational)."""
        G = self.gram()
        vals = [G[k][k] for k in range(4)]
        for k in range(4):
            for l in range(k + 1, 4):
                vals.append(G[k][k] + G[l][l] + 2 * G[k][l])
        num = 0
        den = 1
        for v in vals:
            num, den = _frac_gcd(num, den, v.numerator, v.denominator)
        return Fraction(num, den)

    def is_multiplicatively_closed(self) -> bool:
        bs = self.basis
        return all(self.contains(u * v) for u in bs for v in bs)


_INV_CACHE: dict[tuple, list[list[Fraction]]] = {}


def _inv_cache(lat: Lat4) -> list[list[Fraction]]:
    key = (lat.algebra.a, lat.algebra.b, lat.den, lat.rows)
    got = _INV_CACHE.get(key)
    if got is None:
        got = mat_inv(lat.basis_matrix())
        # transpose so coords_of works on row-coordinate convention:
        # x = c · B  =>  c = x · B^{-1}; mat_vec applies the matrix on the left,
        # so store the transpose of B^{-1}.
        got = [list(col) for col in zip(*got)]
        _INV_CACHE[key] = got
    return got


def _frac_gcd(n1: int, d1: int, n2: int, d2: int) -> tuple[int, int]:
    """gcd of two nonneg rationals n1/d1, n2/d2 as (num, den)."""
    num = gcd(n1 * d2, n2 * d1)
    den = d1 * d2
    g = gcd(num, den)
    return num // g, den // g


def product_lattice(A: Lat4, B: Lat4) -> Lat4:
    """Z-span of all products a·b over the two bases."""
    gens = [u * v for u in A.basis for v in B.basis]
    return Lat4.span(A.algebra, gens)


@dataclass(frozen=True)
class OrderLattice:
    """An order: a multiplicatively closed lattice containing 1."""

    lattice: Lat4

    @property
    def algebra(self) -> QuaternionAlgebra:
        return self.lattice.algebra

    @property
    def basis(self) -> list[QuatElement]:
        return self.lattice.basis

    def gram(self) -> list[list[Fraction]]:
        return self.lattice.gram()

    def contains(self, x: QuatElement) -> bool:
        return self.lattice.contains(x)


def make_order(algebra: QuaternionAlgebra, gens: list[QuatElement], check: bool = True) -> OrderLattice:
    lat = Lat4.span(algebra, gens)
    if check:
        if not lat.contains(algebra.one):
            raise ValueError("order must contain 1")
        if not lat.is_multiplicatively_closed():
            raise ValueError("order must be closed under multiplication")
    return OrderLattice(lat)


def reduced_discriminant(O: OrderLattice) -> int:
    """The integer d with d² = |det(trace pairing)| on the order."""
    # 16·det(gram of the norm form) = det of the trace pairing
    det = mat_det(O.gram()) * 16
    assert det.denominator == 1 and det > 0, "trace pairing must have positive integer det"
    d = isqrt(int(det))
    assert d * d == int(det), "trace pairing determinant must be a perfect square"
    return d


def unit_count(O: OrderLattice) -> int:
    """Number of elements of reduced norm 1 (always even: ± pairs)."""
    cnt = counts_by_value(O.gram(), Fraction(1)).get(Fraction(1), 0)
    assert cnt % 2 == 0 and cnt > 0
    return cnt


def standard_order(B: QuaternionAlgebra) -> OrderLattice:
    return make_order(B, list(B.gens))


def _saturate_at(O: OrderLattice, p: int) -> OrderLattice:
    """Find a strictly larger order O' with p·O' ⊆ O, or raise SaturationError.

    Candidates x = (sum c_k b_k)/p are filtered by integrality of trace, norm
    and the trace pairing against the basis, then the ring closure of O and x
    is computed; the first candidate whose closure stabilizes on a genuinely
    larger order wins (deterministic in lexicographic candidate order).
    """
    bs = O.basis
    d_old = reduced_discriminant(O)
    for c in _nonzero_tuples(p):
        x = O.lattice.element_from([Fraction(ci, p) for ci in c])
        if x.trace().denominator != 1 or x.norm().denominator != 1:
            continue
        if any(((x * b.conj()).trace()).denominator != 1 for b in bs):
            continue
        closure = _ring_closure(O.lattice, x)
        if closure is None:
            continue
        d_new = reduced_discriminant(OrderLattice(closure))
        if d_new < d_old and valuation(d_old, p) > valuation(d_new, p):
            return OrderLattice(closure)
    raise SaturationError(f"cannot enlarge order at p={p}")


def _nonzero_tuples(p: int):
    for c0 in range(p):
        for c1 in range(p):
            for c2 in range(p):
                for c3 in range(p):
                    if c0 or c1 or c2 or c3:
                        yield (c0, c1, c2, c3)


def _ring_closure(lat: Lat4, x: QuatElement, max_rounds: int = 8) -> Lat4 | None:
    """Smallest multiplicatively closed lattice containing lat and x, if it
    stabilizes within a few rounds (non-integral candidates blow up and return None)."""
    cur = Lat4.span(lat.algebra, lat.basis + [x])
    for _ in range(max_rounds):
        bs = cur.basis
        prods = [u * v for u in bs for v in bs]
        nxt = Lat4.span(cur.algebra, bs + prods)
        if nxt == cur:
            return cur
        cur = nxt
    return None


def maximal_order(B: QuaternionAlgebra) -> OrderLattice:
    """A maximal order, by saturating the standard order prime by prime.

    The result is certified: its reduced discriminant equals the product of
    the ramified primes.
    """
    O = standard_order(B)
    target = B.discriminant
    d = reduced_discriminant(O)
    while d != target:
        assert d % target == 0, "discriminant should be a multiple of the ramified product"
        excess = d // target
        p = factorize(excess).primes[0]
        O = _saturate_at(O, p)
        d = reduced_discriminant(O)
    return O


def _structure_constants(O: OrderLattice) -> list[list[list[int]]]:
    """Integer table S with b_k·b_l = sum_m S[k][l][m]·b_m."""
    bs = O.basis
    table = []
    for u in bs:
        row = []
        for v in bs:
            coords = O.lattice.coords_of(u * v)
            assert all(c.denominator == 1 for c in coords), "order not closed (bug)"
            row.append([int(c) for c in coords])
        table.append(row)
    return table


def _mul_mod(S, a, b, q):
    out = [0, 0, 0, 0]
    for k in range(4):
        ak = a[k] % q
        if not ak:
            continue
        Sk = S[k]
        for l in range(4):
            bl = b[l] % q
            if not bl:
                continue
            Skl = Sk[l]
            f = ak * bl
            for m in range(4):
                out[m] = (out[m] + f * Skl[m]) % q
    return out


def eichler_order(Omax: OrderLattice, M: int) -> OrderLattice:
    """Cut level-q structure into Omax for each prime q | M (M squarefree,
    coprime to the algebra discriminant).

    At each q a splitting idempotent e of Omax/qOmax is found by exhaustive
    search in lexicographic order, and the suborder is the preimage of the
    'upper triangular' part {x : e·x·(1-e) ≡ 0 mod q}.
    """
    B = Omax.algebra
    if M < 1:
        raise ValueError("M must be >= 1")
    fac = factorize(M)
    if not fac.is_squarefree:
        raise ValueError("M must be squarefree")
    if gcd(M, B.discriminant) != 1:
        raise ValueError("M must be coprime to the ramified primes")
    O = Omax
    for q in fac.primes:
        O = _eichler_step(O, q)
    return O


def _eichler_step(O: OrderLattice, q: int) -> OrderLattice:
    S = _structure_constants(O)
    one = [int(c) for c in O.lattice.coords_of(O.algebra.one)]
    e = None
    for c in _nonzero_tuples(q):
        if all((x - y) % q == 0 for x, y in zip(c, one)):
            continue
        if _mul_mod(S, list(c), list(c), q) == [x % q for x in c]:
            e = list(c)
            break
    if e is None:
        raise SplittingError(f"no nontrivial idempotent mod {q}")
    one_minus_e = [(x - y) % q for x, y in zip(one, e)]
    # linear map c -> coords(e·x_c·(1-e)) mod q; its kernel is the suborder mod q
    cols = []
    for l in range(4):
        basis_vec = [0] * 4
        basis_vec[l] = 1
        w = _mul_mod(S, e, basis_vec, q)
        w = _mul_mod(S, w, one_minus_e, q)
        cols.append(w)
    A = [[cols[l][r] % q for l in range(4)] for r in range(4)]  # rows: output coords
    kernel = _fq_kernel(A, q)
    assert len(kernel) == 3, "upper-triangular part mod q must have dimension 3"
    gens = [O.lattice.element_from([q * x for x in row]) for row in _unit_rows()]
    for v in kernel:
        gens.append(O.lattice.element_from(v))
    sub = make_order(O.algebra, gens)
    assert reduced_discriminant(sub) == q * reduced_discriminant(O)
    return sub


def _unit_rows():
    return [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]


def _fq_kernel(A: list[list[int]], q: int) -> list[list[int]]:
    """Kernel basis of the 4x4 matrix A over F_q (lifted to integer vectors)."""
    M = [[A[r][c] % q for c in range(4)] for r in range(4)]
    pivots = []
    r = 0
    for c in range(4):
        piv = next((i for i in range(r, 4) if M[i][c] % q), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], -1, q)
        M[r] = [(x * inv) % q for x in M[r]]
        for i in range(4):
            if i != r and M[i][c] % q:
                f = M[i][c]
                M[i] = [(x - f * y) % q for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    out = []
    for fc in range(4):
        if fc in pivots:
            continue
        v = [0] * 4
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-M[i][fc]) % q
        out.append(v)
    return out


@dataclass(frozen=True)
class LeftIdeal:
    """A left ideal of a fixed order, with its reduced norm."""

    order: OrderLattice
    lattice: Lat4
    norm: Fraction

    @classmethod
    def of(cls, order: OrderLattice, lattice: Lat4) -> "LeftIdeal":
        n = lattice.norm()
        # certificate: covolume matches norm^4 relative to the order
        dI = mat_det(lattice.gram())
        dO = mat_det(order.gram())
        assert dI == n**4 * dO, "ideal is not locally principal (covolume certificate failed)"
        return cls(order, lattice, n)

    def gram(self) -> list[list[Fraction]]:
        return self.lattice.gram()


def unit_ideal(O: OrderLattice) -> LeftIdeal:
    return LeftIdeal.of(O, O.lattice)


def right_order(I: LeftIdeal) -> OrderLattice:
    """O_r(I) = conj(I)·I / N(I) for locally principal I."""
    prod = product_lattice(I.lattice.conjugate(), I.lattice)
    return make_order(I.order.algebra, [b * (1 / I.norm) for b in prod.basis])


def is_equivalent(I: LeftIdeal, J: LeftIdeal) -> bool:
    """Same left-ideal class: some x with J = I·x.

    Witnessed by an element of conj(I)·J of reduced norm N(I)·N(J); the search
    is an exact lattice enumeration with early exit.
    """
    if I.order != J.order:
        raise ValueError("ideals must share the same left order")
    W = product_lattice(I.lattice.conjugate(), J.lattice)
    return exists_value(W.gram(), I.norm * J.norm)


def reduce_ideal(I: LeftIdeal) -> LeftIdeal:
    """Replace I by the equivalent integral ideal I·conj(x)/N(I) for a canonical
    shortest vector x; keeps norms (hence later enumerations) small."""
    coords, _ = shortest_vector(I.gram())
    x = I.lattice.element_from(coords)
    gens = [b * x.conj() * (1 / I.norm) for b in I.lattice.basis]
    lat = Lat4.span(I.lattice.algebra, gens)
    return LeftIdeal.of(I.order, lat)


def _neighbor_ideals(R: OrderLattice, p: int) -> list[Lat4]:
    """The p+1 left R-ideals of reduced norm p (p coprime to disc(R))."""
    bs = R.basis
    seen: dict[tuple, Lat4] = {}
    for c in _projective_tuples(p):
        x = R.lattice.element_from(c)
        n = x.norm()
        assert n.denominator == 1
        if int(n) % p:
            continue
        gens = [b * p for b in bs] + [b * x for b in bs]
        K = Lat4.span(R.lattice.algebra, gens)
        key = (K.den, K.rows)
        if key not in seen:
            seen[key] = K
    out = sorted(seen.values(), key=lambda L: (L.den, L.rows))
    assert len(out) == p + 1, f"expected {p + 1} neighbors, got {len(out)}"
    return out


def _projective_tuples(p: int):
    """Coordinate tuples with first nonzero entry 1: one per projective point."""
    for lead in range(4):
        head = [0] * lead + [1]
        tails = [[]]
        for _ in range(3 - lead):
            tails = [t + [v] for t in tails for v in range(p)]
        for t in tails:
            yield head + t


@dataclass
class IdealClassSet:
    """Representatives of the left ideal classes of an order, with weights.

    ideals[0] is the order itself.  For each class: its right order, the unit
    count e_i of that right order, and w_i = e_i/2.  The accumulated mass
    sum(1/e_i) equals the formula value exactly (certified on construction).
    """

    order: OrderLattice
    cfg: LevelConfig
    ideals: list[LeftIdeal]
    right_orders: list[OrderLattice]
    e: list[int]
    w: list[int]
    cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.ideals)

    @property
    def algebra(self) -> QuaternionAlgebra:
        return self.order.algebra

    def total_mass(self) -> Fraction:
        return sum((Fraction(1, e) for e in self.e), Fraction(0))


def level_config_of(O: OrderLattice) -> LevelConfig:
    N = reduced_discriminant(O)
    P = O.algebra.discriminant
    assert N % P == 0
    return LevelConfig.from_primes(O.algebra.ramified, N // P)


CACHE_VERSION = 1


def classes_to_json(cs: IdealClassSet) -> dict:
    """JSON-serializable snapshot of a class set (exact rationals as strings)."""
    return {
        "version": CACHE_VERSION,
        "ramified": list(cs.cfg.P.primes),
        "M": cs.cfg.M.value,
        "algebra": {"a": cs.algebra.a, "b": cs.algebra.b},
        "classes": [
            {
                "basis": [str(x) for b in I.lattice.basis for x in b.coords],
                "norm": str(I.norm),
                "e": e,
                "w": w,
            }
            for I, e, w in zip(cs.ideals, cs.e, cs.w)
        ],
    }


class CacheError(Exception):
    """A cached class set failed validation."""


def classes_from_json(data: dict) -> IdealClassSet:
    """Rebuild a class set from its JSON snapshot, re-deriving right orders and
    re-validating the mass certificate."""
    if data.get("version") != CACHE_VERSION:
        raise CacheError(f"unsupported cache version {data.get('version')!r}")
    cfg = LevelConfig.from_primes(tuple(data["ramified"]), data["M"])
    B = QuaternionAlgebra.create(data["algebra"]["a"], data["algebra"]["b"])
    if set(B.ramified) != set(cfg.P.primes):
        raise CacheError("cached algebra does not ramify at the requested primes")
    Omax = maximal_order(B)
    O = eichler_order(Omax, cfg.M.value)
    ideals = []
    es = []
    ws = []
    rights = []
    for rec in data["classes"]:
        coords = [Fraction(s) for s in rec["basis"]]
        if len(coords) != 16:
            raise CacheError("each class needs 16 basis coordinates")
        gens = [B.element(*coords[4 * k : 4 * k + 4]) for k in range(4)]
        lat = Lat4.span(B, gens)
        I = LeftIdeal.of(O, lat)
        if str(I.norm) != rec["norm"]:
            raise CacheError("stored norm disagrees with the lattice")
        if not all(lat.contains(b * v) for b in O.basis for v in lat.basis):
            raise CacheError("cached lattice is not a left ideal of the order")
        R = right_order(I)
        e = unit_count(R)
        if e != rec["e"] or e != 2 * rec["w"]:
            raise CacheError("stored unit counts disagree with the lattice")
        ideals.append(I)
        rights.append(R)
        es.append(e)
        ws.append(rec["w"])
    cs = IdealClassSet(order=O, cfg=cfg, ideals=ideals, right_orders=rights, e=es, w=ws)
    if cs.total_mass() != mass(cfg):
        raise CacheError("cached classes do not satisfy the mass formula")
    if ideals and ideals[0].lattice != O.lattice:
        raise CacheError("first cached class must be the order itself")
    return cs


def build_class_set(cfg: LevelConfig) -> IdealClassSet:
    """Full pipeline: algebra for the ramified set, maximal order, level
    structure, left ideal classes."""
    from .quatalg import construct_algebra

    B = construct_algebra(set(cfg.P.primes))
    Omax = maximal_order(B)
    O = eichler_order(Omax, cfg.M.value)
    return left_ideal_classes(O)


def left_ideal_classes(O: OrderLattice) -> IdealClassSet:
    """Enumerate the left ideal classes of O by a neighbor walk at the smallest
    prime coprime to the level, stopping exactly when the mass formula is met.

    Overshooting the mass raises MassOvershootError (it would mean an
    equivalence was missed); stalling raises ClassSearchError.
    """
    cfg = level_config_of(O)
    target = mass(cfg)
    p = 2
    while not (is_prime(p) and cfg.N % p != 0):
        p += 1
    classes = [unit_ideal(O)]
    rights = [O]
    es = [unit_count(O)]
    acc = Fraction(1, es[0])
    if acc > target:
        raise MassOvershootError("unit ideal alone exceeds the mass")
    queue = [0]
    while acc != target:
        if not queue:
            raise ClassSearchError("neighbor walk exhausted before reaching the mass")
        idx = queue.pop(0)
        for K in _neighbor_ideals(rights[idx], p):
            J = LeftIdeal.of(O, product_lattice(classes[idx].lattice, K))
            J = reduce_ideal(J)
            if any(is_equivalent(J, C) for C in classes):
                continue
            classes.append(J)
            R = right_order(J)
            rights.append(R)
            es.append(unit_count(R))
            acc += Fraction(1, es[-1])
            queue.append(len(classes) - 1)
            if acc == target:
                break
            if acc > target:
                raise MassOvershootError(
                    f"mass {acc} exceeds formula value {target} after {len(classes)} classes"
                )
    ws = []
    for e in es:
        assert e % 2 == 0
        w = e // 2
        assert 12 % w == 0, f"unit group order w={w} must divide 12"
        ws.append(w)
    for R in rights:
        assert reduced_discriminant(R) == cfg.N, "right orders must share the level"
    return IdealClassSet(order=O, cfg=cfg, ideals=classes, right_orders=rights, e=es, w=ws)
