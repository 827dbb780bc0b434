"""Signatures, membership in subalgebras of ker d, and tau candidate generation.

A kernel element z has signature [deg, ord, coweight] with
coweight = (n*deg - weight)/2; signatures add under multiplication, so the
products of generators that can appear in a representation of z are the
non-negative integer solutions of [z] = sum alpha_j [f_j].

Membership is decided on evaluations first: if z(pts) is not in the span of
the products' values, z is provably not a member.  Otherwise the candidate
coefficients are checked by expanding the products exactly.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, NamedTuple, Sequence

from gmpy2 import mpq, mpz

from .casimir import tau
from .derivation import apply, order, weitzenboeck
from .linalg import PRIME, ModEchelon, SparseEchelon, solve_exact
from .poly import (
    MASK,
    Poly,
    PolyError,
    ZeroPolynomialError,
    _shift,
    degree,
    format_poly,
    is_homogeneous,
    is_isobaric,
    normalize_primitive,
    weight,
)

log = logging.getLogger(__name__)


class SignatureError(PolyError):
    pass


class Signature(NamedTuple):
    deg: int
    ord: int
    coweight: int

    def __add__(self, other: "Signature") -> "Signature":  # componentwise, not tuple concatenation
        return Signature(self.deg + other.deg, self.ord + other.ord, self.coweight + other.coweight)

    def scaled(self, k: int) -> "Signature":
        return Signature(self.deg * k, self.ord * k, self.coweight * k)

    def __str__(self) -> str:
        return f"[{self.deg}, {self.ord}, {self.coweight}]"


ZERO_SIGNATURE = Signature(0, 0, 0)


def signature(z: Poly, n: int | None = None) -> Signature:
    """[deg, ord, (n*deg - weight)/2]; ord is computed by iterating dhat."""
    n = z.n if n is None else n
    if not z:
        raise ZeroPolynomialError("the zero polynomial has no signature")
    if not is_homogeneous(z):
        raise SignatureError("signature needs a homogeneous polynomial")
    if not is_isobaric(z):
        raise SignatureError("signature needs an isobaric polynomial")
    deg = degree(z)
    w = weight(z)
    if (n * deg - w) % 2:
        raise SignatureError("non-integer coweight: corrupt input")
    s = order(z)
    if s != w and not apply(weitzenboeck(n), z):
        raise SignatureError(f"kernel element with order {s} != weight {w}")
    return Signature(deg, s, (n * deg - w) // 2)


def predicted_signature(n: int, deg: int, ord_: int) -> Signature:
    return Signature(deg, ord_, (n * deg - ord_) // 2)


@dataclass(frozen=True)
class GeneratorInfo:
    poly: Poly
    sig: Signature
    provenance: str
    round: int
    name: str = ""

    @property
    def key(self) -> str:
        return format_poly(self.poly)


@dataclass(frozen=True)
class SubalgebraBasis:
    established: tuple[GeneratorInfo, ...] = ()
    fresh: tuple[GeneratorInfo, ...] = ()

    @property
    def generators(self) -> tuple[GeneratorInfo, ...]:
        return self.established + self.fresh

    def advance(self, new: Sequence[GeneratorInfo]) -> "SubalgebraBasis":
        return SubalgebraBasis(self.generators, tuple(new))


# -- signature equations -------------------------------------------------------


def _iter_solutions(target: Signature, gens: Sequence[Signature]) -> Iterator[tuple[int, ...]]:
    m = len(gens)
    if any(g.deg < 1 for g in gens):
        raise SignatureError("generators must have positive degree")
    alpha = [0] * m

    def rec(j: int, deg: int, ord_: int, cow: int):
        if j == m:
            if deg == ord_ == cow == 0:
                yield tuple(alpha)
            return
        g = gens[j]
        top = deg // g.deg
        if g.ord:
            top = min(top, ord_ // g.ord)
        if g.coweight:
            top = min(top, cow // g.coweight)
        for a in range(top + 1):
            alpha[j] = a
            yield from rec(j + 1, deg - a * g.deg, ord_ - a * g.ord, cow - a * g.coweight)
        alpha[j] = 0

    if target.deg < 0 or target.ord < 0 or target.coweight < 0:
        return
    yield from rec(0, target.deg, target.ord, target.coweight)


def signature_solutions(target: Signature, gens: Sequence[Signature]) -> list[tuple[int, ...]]:
    """All alpha >= 0 with sum alpha_j * gens[j] == target, in lexicographic order."""
    return list(_iter_solutions(Signature(*target), [Signature(*g) for g in gens]))


# -- kernel slice dimensions --------------------------------------------------


@lru_cache(maxsize=None)
def _partitions_bounded(c: int, parts: int, largest: int) -> int:
    # partitions of c into at most `parts` parts, each <= largest
    if c == 0:
        return 1
    if c < 0 or parts == 0 or largest == 0:
        return 0
    return _partitions_bounded(c, parts, largest - 1) + _partitions_bounded(c - largest, parts - 1, largest)


def monomial_count(n: int, deg: int, coweight: int) -> int:
    """Number of monomials of the given degree with sum(i * a_i) == coweight."""
    return _partitions_bounded(coweight, deg, n)


def kernel_slice_dim(n: int, deg: int, ord_: int) -> int:
    """dim of ker d in the (deg, weight=ord_) slice, from d: S(w) -> S(w+2) being onto for w >= 0."""
    if ord_ < 0 or (n * deg - ord_) % 2:
        return 0
    c = (n * deg - ord_) // 2
    return monomial_count(n, deg, c) - monomial_count(n, deg, c - 1)


# -- evaluation of generators at points --------------------------------------


def _evaluate(p: Poly, point: Sequence[int], modulus: int | None) -> int:
    n = p.n
    total = 0
    pw = [[1] for _ in range(n + 1)]
    for key, c in p._terms.items():
        v = c
        for i in range(n + 1):
            e = (key >> _shift(i, n)) & MASK
            if e:
                row = pw[i]
                while len(row) <= e:
                    nxt = row[-1] * point[i]
                    row.append(nxt % modulus if modulus else nxt)
                v = v * row[e]
        total += v
        if modulus:
            total %= modulus
    if modulus:
        return int(total % modulus)
    return total


class Evaluator:
    """Values of generators at deterministic random points, cached per generator."""

    def __init__(self, n: int, modulus: int | None = PRIME, seed: int = 0, spread: int = 7):
        self.n = n
        self.modulus = modulus
        self._rng = random.Random(f"{n}:{modulus}:{seed}")
        self._spread = spread
        self.points: list[tuple[int, ...]] = []
        self._cache: dict[Poly, list] = {}

    def _ensure(self, count: int):
        while len(self.points) < count:
            if self.modulus:
                pt = tuple(self._rng.randrange(1, self.modulus) for _ in range(self.n + 1))
            else:
                pt = tuple(self._rng.randint(-self._spread, self._spread) for _ in range(self.n + 1))
            self.points.append(pt)

    def values(self, p: Poly, count: int) -> list:
        self._ensure(count)
        vals = self._cache.setdefault(p, [])
        while len(vals) < count:
            vals.append(_evaluate(p, self.points[len(vals)], self.modulus))
        return vals[:count]

    def product_values(self, gens: Sequence[Poly], alpha: Sequence[int], count: int) -> list:
        out = [1] * count
        mod = self.modulus
        for g, a in zip(gens, alpha):
            if not a:
                continue
            vals = self.values(g, count)
            if mod:
                out = [(x * pow(v, a, mod)) % mod for x, v in zip(out, vals)]
            else:
                out = [x * v**a for x, v in zip(out, vals)]
        return out


# -- membership ----------------------------------------------------------------


@dataclass
class Representation:
    """z = sum beta * prod(gens[j] ** alpha[j]) over the listed terms."""

    terms: list[tuple[tuple[int, ...], object]]
    names: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return True

    def support(self) -> list[tuple[int, ...]]:
        return [a for a, _ in self.terms]

    def describe(self) -> list[str]:
        out = []
        for alpha, beta in self.terms:
            factors = [_power_text(self.names[j] if self.names else f"g{j}", a) for j, a in enumerate(alpha) if a]
            out.append(f"{_rat_text(beta)} * {'*'.join(factors) or '1'}")
        return out


def _power_text(name: str, a: int) -> str:
    return name if a == 1 else f"{name}^{a}"


def _rat_text(c) -> str:
    q = mpq(c)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class ProductCache:
    """Expanded products of generator powers, cached by exponent vector."""

    def __init__(self, gens: Sequence[Poly], n: int):
        self.gens = list(gens)
        self.n = n
        self._powers: dict[tuple[int, int], Poly] = {}
        self._products: dict[tuple[int, ...], Poly] = {}

    def power(self, j: int, a: int) -> Poly:
        if a == 0:
            return Poly.constant(1, self.n)
        if a == 1:
            return self.gens[j]
        key = (j, a)
        if key not in self._powers:
            self._powers[key] = self.power(j, a - 1) * self.gens[j]
        return self._powers[key]

    def product(self, alpha: Sequence[int]) -> Poly:
        alpha = tuple(alpha)
        if alpha not in self._products:
            result = Poly.constant(1, self.n)
            for j, a in enumerate(alpha):
                if a:
                    result = result * self.power(j, a)
            self._products[alpha] = result
        return self._products[alpha]


def _as_polys(gens) -> list[Poly]:
    return [g.poly if isinstance(g, GeneratorInfo) else g for g in gens]


def _signatures(gens) -> list[Signature]:
    return [g.sig if isinstance(g, GeneratorInfo) else signature(g) for g in gens]


def is_member(
    z: Poly,
    basis,
    n: int | None = None,
    *,
    z_signature: Signature | None = None,
    evaluator: Evaluator | None = None,
    products: ProductCache | None = None,
    check: bool = True,
) -> Representation | None:
    """Representation of z over products of the basis generators, or None.

    ``basis`` is a SubalgebraBasis or a sequence of GeneratorInfo/Poly.
    """
    gens = list(basis.generators) if isinstance(basis, SubalgebraBasis) else list(basis)
    n = z.n if n is None else n
    if not z:
        raise ZeroPolynomialError("membership of the zero polynomial is trivial")
    if check and apply(weitzenboeck(n), z):
        raise SignatureError("membership is tested for kernel elements of d only")
    target = z_signature or signature(z, n)
    polys = _as_polys(gens)
    names = tuple(g.name if isinstance(g, GeneratorInfo) else f"g{j}" for j, g in enumerate(gens))
    sols = signature_solutions(target, _signatures(gens))
    if not sols:
        return None
    evaluator = evaluator or Evaluator(n, modulus=None)
    products = products or ProductCache(polys, n)
    zero_alpha = any(not any(a) for a in sols)
    if zero_alpha:
        raise SignatureError("empty product matched a non-constant target")
    for attempt in range(3):
        count = len(sols) + 4 + 8 * attempt
        columns = [evaluator.product_values(polys, a, count) for a in sols]
        zvals = evaluator.values(z, count)
        beta = solve_exact(columns, zvals)
        if beta is None:
            return None  # z(pts) outside the span of the products: a proof of non-membership
        combo = Poly.zero(n)
        for a, b in zip(sols, beta):
            if b:
                combo = combo + products.product(a) * b
        if combo == z:
            return Representation([(a, _normal(b)) for a, b in zip(sols, beta) if b], names)
        log.debug("evaluation points were degenerate for a %s slice; retrying", target)
    return _member_by_monomials(z, sols, products, names)


def _normal(b):
    q = mpq(b)
    return mpz(q.numerator) if q.denominator == 1 else q


def _member_by_monomials(z, sols, products, names) -> Representation | None:
    ech = SparseEchelon()
    for a in sols:
        ech.add(dict(products.product(a)._terms))
    residual, combo = ech.reduce(dict(z._terms))
    if residual:
        return None
    return Representation([(sols[j], _normal(c)) for j, c in sorted(combo.items())], names)


# -- candidates ----------------------------------------------------------------


@dataclass(frozen=True)
class Candidate:
    """tau_k applied to prod(gens[j] ** e) for (j, e) in factors."""

    k: int
    factors: tuple[tuple[int, int], ...]
    provenance: str
    sig: Signature
    multiplicity: int

    def product(self, gens: Sequence[Poly], n: int) -> Poly:
        result = Poly.constant(1, n)
        for j, e in self.factors:
            result = result * gens[j] ** e
        return result

    def evaluate(self, gens: Sequence[Poly], n: int) -> Poly:
        p = self.product(gens, n)
        return tau(self.k, p, n, check=False)

    @property
    def sort_key(self):
        return (self.sig.deg, self.sig.ord, self.k, self.multiplicity, self.provenance)


def _product_text(names: Sequence[str], factors) -> str:
    return "*".join(_power_text(names[j], e) for j, e in factors)


def candidate_products(basis: SubalgebraBasis, n: int) -> list[Candidate]:
    """tau_k(product) candidates that survive the four exclusion rules.

    Kept: products of m generators, at least one fresh, none of order 0,
    with m <= k <= min(n, ord(product)); for m >= 2 additionally
    ord(product) - min factor order < k, since a split u*v with
    ord(v) >= k makes tau_k(u*v) reducible.
    """
    gens = basis.generators
    if not gens:
        raise SignatureError("candidate generation needs a nonempty basis")
    n_est = len(basis.established)
    names = [g.name or f"g{j}" for j, g in enumerate(gens)]
    usable = [j for j, g in enumerate(gens) if g.sig.ord > 0]
    out: list[Candidate] = []

    def emit(chosen: list[int]):
        if not any(j >= n_est for j in chosen):
            return
        m = len(chosen)
        ords = [gens[j].sig.ord for j in chosen]
        total = sum(ords)
        low = m if m == 1 else max(m, total - min(ords) + 1)
        high = min(n, total)
        if low > high:
            return
        factors = tuple((j, chosen.count(j)) for j in sorted(set(chosen)))
        deg = sum(gens[j].sig.deg for j in chosen)
        text = _product_text(names, factors)
        for k in range(low, high + 1):
            sig = predicted_signature(n, deg + 1, n + total - 2 * k)
            out.append(Candidate(k, factors, f"tau_{k}({text})", sig, m))

    def rec(start: int, chosen: list[int], total: int, low: int):
        if chosen:
            emit(chosen)
        if len(chosen) == n:
            return
        for idx in range(start, len(usable)):
            j = usable[idx]
            o = gens[j].sig.ord
            new_total = total + o
            new_low = min(low, o)
            # tau_k with k <= n needs ord(product) - min order < n once there are two factors
            if chosen and new_total - new_low >= n:
                continue
            chosen.append(j)
            rec(idx, chosen, new_total, new_low)
            chosen.pop()

    rec(0, [], 0, 1 << 30)
    out.sort(key=lambda c: (c.k, c.multiplicity, c.provenance))
    return out


# -- acceptable polynomials ----------------------------------------------------


@dataclass
class RoundStats:
    candidates: int = 0
    saturated: int = 0
    evaluated: int = 0
    zero: int = 0
    duplicate: int = 0
    members: int = 0
    accepted: int = 0
    notes: list[str] = field(default_factory=list)


class SliceTracker:
    """Decides whether current generator products already span a kernel slice.

    The rank of product values at points modulo a prime is a lower bound for
    the rank of the products themselves; when it reaches the kernel slice
    dimension the slice is full and every candidate in it is a member.
    """

    def __init__(self, n: int):
        self.n = n
        self.evaluator = Evaluator(n, modulus=PRIME, seed=1)
        self._full: set[tuple[int, int]] = set()

    def is_full(self, gens: Sequence[GeneratorInfo], deg: int, ord_: int) -> bool:
        if (deg, ord_) in self._full:
            return True
        target = kernel_slice_dim(self.n, deg, ord_)
        if target == 0:
            self._full.add((deg, ord_))
            return True
        polys = [g.poly for g in gens]
        sig = predicted_signature(self.n, deg, ord_)
        ech = ModEchelon(target)
        for alpha in _iter_solutions(sig, [g.sig for g in gens]):
            if ech.add(self.evaluator.product_values(polys, alpha, target)) and len(ech) == target:
                self._full.add((deg, ord_))
                return True
        return False


def name_for(sig: Signature, taken: set[str]) -> str:
    base = f"f{sig.deg}_{sig.ord}"
    if base not in taken:
        return base
    suffix = ord("b")
    while f"{base}{chr(suffix)}" in taken:
        suffix += 1
    return f"{base}{chr(suffix)}"


def acceptable_set(
    basis: SubalgebraBasis,
    n: int,
    *,
    round_no: int = 0,
    tracker: SliceTracker | None = None,
    degree_cap: int | None = None,
    stats: RoundStats | None = None,
    pool=None,
) -> list[GeneratorInfo]:
    """New generators from one round of tau candidates.

    Candidates are handled in increasing degree; each accepted polynomial
    joins the basis used for the membership tests of later candidates.
    """
    stats = stats if stats is not None else RoundStats()
    tracker = tracker or SliceTracker(n)
    gens = list(basis.generators)
    polys = [g.poly for g in gens]
    cands = sorted(candidate_products(basis, n), key=lambda c: c.sort_key)
    stats.candidates = len(cands)
    seen = {g.key for g in gens}
    taken = {g.name for g in gens}
    accepted: list[GeneratorInfo] = []
    evaluator = Evaluator(n, modulus=None, seed=2)

    by_degree: dict[int, list[Candidate]] = {}
    for c in cands:
        by_degree.setdefault(c.sig.deg, []).append(c)

    for deg in sorted(by_degree):
        if degree_cap is not None and deg > degree_cap:
            stats.notes.append(f"skipped {sum(len(v) for d, v in by_degree.items() if d > degree_cap)} candidates above degree cap {degree_cap}")
            break
        group = by_degree[deg]
        current = gens + accepted
        pending = [c for c in group if not tracker.is_full(current, c.sig.deg, c.sig.ord)]
        stats.saturated += len(group) - len(pending)
        if not pending:
            continue
        if pool is not None:
            values = list(pool.map(_evaluate_candidate, [(c, polys, n) for c in pending]))
        else:
            values = [c.evaluate(polys, n) for c in pending]
        stats.evaluated += len(pending)
        products = ProductCache([g.poly for g in current], n)
        for cand, value in zip(pending, values):
            current = gens + accepted
            if accepted and tracker.is_full(current, cand.sig.deg, cand.sig.ord):
                stats.saturated += 1
                continue
            if not value:
                stats.zero += 1
                continue
            if degree(value) != cand.sig.deg or weight(value) != cand.sig.ord:
                raise SignatureError(f"{cand.provenance} has an unexpected degree or weight")
            value = normalize_primitive(value)
            key = format_poly(value)
            if key in seen:
                stats.duplicate += 1
                continue
            seen.add(key)
            if len(products.gens) != len(current):
                products = ProductCache([g.poly for g in current], n)
            if is_member(value, current, n, z_signature=cand.sig, evaluator=evaluator, products=products, check=False):
                stats.members += 1
                continue
            name = name_for(cand.sig, taken)
            taken.add(name)
            info = GeneratorInfo(value, cand.sig, cand.provenance, round_no, name)
            accepted.append(info)
            stats.accepted += 1
            log.info("round %d: accepted %s = %s %s (%d terms)", round_no, name, cand.provenance, cand.sig, len(value))
    return accepted


def _evaluate_candidate(args):
    cand, polys, n = args
    return cand.evaluate(polys, n)
