"""Linear derivations of Q[x0..xn] stored as matrices.

Row i of the matrix gives the image of x_i: D(x_i) = sum_j lam[i][j] * x_j.
The Weitzenboeck triple is

    d(x_i)    = x_{i-1}                (lowering, d(x_0) = 0)
    dhat(x_i) = (i+1)(n-i) x_{i+1}     (raising)
    e(x_i)    = (n-2i) x_i             (toral)

and satisfies [d, dhat] = e, [d, e] = -2d, [dhat, e] = 2 dhat.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from gmpy2 import mpz

from .poly import (
    MASK,
    AmbientMismatch,
    Poly,
    PolyError,
    ZeroPolynomialError,
    _shift,
    degree,
    degrees,
    format_poly,
    monomial_weight_key,
    rational,
)


class DerivationError(PolyError):
    pass


@dataclass(frozen=True)
class LinearDerivation:
    n: int
    matrix: tuple[tuple, ...]

    def __post_init__(self):
        m = tuple(tuple(rational(x) for x in row) for row in self.matrix)
        if len(m) != self.n + 1 or any(len(row) != self.n + 1 for row in m):
            raise DerivationError(f"matrix must be {self.n + 1}x{self.n + 1}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "LinearDerivation":
        return cls(len(rows) - 1, tuple(tuple(r) for r in rows))

    def image(self, i: int) -> Poly:
        """D(x_i) as a linear form."""
        return Poly(self.n, {_unit(j, self.n): c for j, c in enumerate(self.matrix[i]) if c})

    def __call__(self, p: Poly) -> Poly:
        return apply(self, p)

    def __matmul__(self, other: "LinearDerivation") -> tuple[tuple, ...]:
        return _matmul(self.matrix, other.matrix)


def _unit(j: int, n: int) -> tuple[int, ...]:
    e = [0] * (n + 1)
    e[j] = 1
    return tuple(e)


def _matmul(a, b):
    size = len(a)
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(size)), mpz(0)) for j in range(size))
        for i in range(size)
    )


def weitzenboeck(n: int) -> LinearDerivation:
    """The lowering operator d(x_i) = x_{i-1}, d(x_0) = 0."""
    if n < 0:
        raise DerivationError("n must be non-negative")
    return LinearDerivation(n, tuple(tuple(1 if j == i - 1 else 0 for j in range(n + 1)) for i in range(n + 1)))


def raising(n: int) -> LinearDerivation:
    if n < 0:
        raise DerivationError("n must be non-negative")
    return LinearDerivation(
        n,
        tuple(tuple((i + 1) * (n - i) if j == i + 1 else 0 for j in range(n + 1)) for i in range(n + 1)),
    )


def toral(n: int) -> LinearDerivation:
    if n < 0:
        raise DerivationError("n must be non-negative")
    return LinearDerivation(n, tuple(tuple(n - 2 * i if j == i else 0 for j in range(n + 1)) for i in range(n + 1)))


@lru_cache(maxsize=None)
def _sparse_rows(D: LinearDerivation):
    # per variable i: (bit shift of x_i, [(key delta for x_i -> x_j, lam_ij)])
    n = D.n
    rows = []
    for i in range(n + 1):
        si = _shift(i, n)
        moves = [((1 << _shift(j, n)) - (1 << si), c) for j, c in enumerate(D.matrix[i]) if c]
        if moves:
            rows.append((si, moves))
    return tuple(rows)


def apply(D: LinearDerivation, p: Poly) -> Poly:
    """sum_i D(x_i) * d/dx_i (p)."""
    if D.n != p.n:
        raise AmbientMismatch(f"derivation on n={D.n} applied to polynomial with n={p.n}")
    rows = _sparse_rows(D)
    out: dict[int, object] = {}
    get = out.get
    for k, c in p._terms.items():
        for si, moves in rows:
            e = (k >> si) & MASK
            if e:
                ce = c * e
                for delta, lam in moves:
                    kk = k + delta
                    out[kk] = get(kk, 0) + ce * lam
    return Poly._raw(p.n, {k: c for k, c in out.items() if c})


def apply_power(D: LinearDerivation, p: Poly, times: int) -> Poly:
    for _ in range(times):
        if not p:
            break
        p = apply(D, p)
    return p


def commutator(A: LinearDerivation, B: LinearDerivation) -> LinearDerivation:
    """[A, B] = A o B - B o A as derivations.

    With row convention A(x_i) = sum_j a_ij x_j, the composite A(B(x_i)) has
    matrix B @ A, so the commutator matrix is B@A - A@B.
    """
    if A.n != B.n:
        raise AmbientMismatch("derivations act on different rings")
    ba = _matmul(B.matrix, A.matrix)
    ab = _matmul(A.matrix, B.matrix)
    return LinearDerivation(A.n, tuple(tuple(x - y for x, y in zip(r1, r2)) for r1, r2 in zip(ba, ab)))


def scaled(D: LinearDerivation, c) -> LinearDerivation:
    c = rational(c)
    return LinearDerivation(D.n, tuple(tuple(c * x for x in row) for row in D.matrix))


def order(p: Poly) -> int:
    """Largest s with dhat^s(p) != 0."""
    if not p:
        raise ZeroPolynomialError("order is undefined for the zero polynomial")
    n = p.n
    dh = raising(n)
    guard = n * degree(p) + 1
    s = 0
    cur = apply(dh, p)
    while cur:
        s += 1
        if s > guard:
            raise DerivationError(f"raising operator failed to terminate on {format_poly(p)[:80]}")
        cur = apply(dh, cur)
    return s


def isobaric_components(p: Poly) -> list[tuple[int, Poly]]:
    """Split p by (degree, weight); returns [(weight, part)] sorted by (degree, weight)."""
    n = p.n
    buckets: dict[tuple[int, int], dict] = {}
    for k, c in p._terms.items():
        d = sum((k >> _shift(i, n)) & MASK for i in range(n + 1))
        w = monomial_weight_key(k, n)
        buckets.setdefault((d, w), {})[k] = c
    return [(w, Poly._raw(n, buckets[(d, w)])) for d, w in sorted(buckets)]


def parse_matrix(text: str) -> LinearDerivation:
    """Whitespace-separated rational entries, one row per line."""
    rows = [line.split() for line in text.strip().splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        raise DerivationError("empty matrix")
    try:
        return LinearDerivation.from_rows([[rational(x) for x in r] for r in rows])
    except (ValueError, ZeroDivisionError) as exc:
        raise DerivationError(f"bad matrix entry: {exc}") from exc


def is_homogeneous_kernel_element(D: LinearDerivation, p: Poly) -> bool:
    return bool(p) and len(degrees(p)) == 1 and not apply(D, p)
