"""Dual modules, Casimir elements and the tau maps for the Weitzenboeck derivation.

Sign convention for tau, fixed once for the whole package:

    tau_i(z) = sum_{k=0}^{i} (-1)^k x_{i-k} v_k(z),   v_k(z) = alpha_k * dhat^k(z),
    alpha_k  = (w - k)! / (k! w!),                     w = weight(z) = order(z).

With it, deg(z) * z = sum_i tau_{n-i}(c(i)) holds exactly for the
decomposition computed by :func:`tau_decompose`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial

from gmpy2 import mpq, mpz

from .derivation import LinearDerivation, apply, isobaric_components, raising, weitzenboeck
from .linalg import SparseEchelon
from .poly import (
    Poly,
    PolyError,
    ZeroPolynomialError,
    _shift,
    degree,
    format_poly,
    is_homogeneous,
    is_isobaric,
    partial,
    weight,
)


class CasimirError(PolyError):
    pass


class ReconstructionError(RuntimeError):
    """The tau decomposition failed to reproduce deg(z)*z: a sign-convention bug."""


@dataclass(frozen=True)
class RealizedModule:
    """A D-module inside Q[X]: D(basis[i]) = sum_j matrix[i][j] * basis[j]."""

    basis: tuple[Poly, ...]
    matrix: tuple[tuple, ...]
    derivation: LinearDerivation

    def __post_init__(self):
        size = len(self.basis)
        if len(self.matrix) != size or any(len(r) != size for r in self.matrix):
            raise CasimirError("module matrix does not match basis size")
        n = self.derivation.n
        for i, b in enumerate(self.basis):
            image = Poly.zero(n)
            for j, c in enumerate(self.matrix[i]):
                if c:
                    image = image + self.basis[j] * c
            if apply(self.derivation, b) != image:
                raise CasimirError(f"basis element {i} is not mapped according to the module matrix")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_independent(self) -> bool:
        ech = SparseEchelon()
        return all(ech.add(dict(b._terms)) for b in self.basis)


@dataclass(frozen=True)
class StringModule:
    source: Poly
    omega: int
    vectors: tuple[Poly, ...]

    @property
    def m(self) -> int:
        return len(self.vectors) - 1


@dataclass(frozen=True)
class TauDecomposition:
    source: Poly
    c: tuple[Poly, ...] = field(default=())

    def terms(self) -> list[Poly]:
        """tau_{n-i}(c(i)) for i = 0..n."""
        n = self.source.n
        return [tau(n - i, ci, n) if ci else Poly.zero(n) for i, ci in enumerate(self.c)]


def _neg_transpose(matrix):
    size = len(matrix)
    return tuple(tuple(-matrix[j][i] for j in range(size)) for i in range(size))


def check_dual(V: RealizedModule, W: RealizedModule) -> bool:
    """True iff W's matrix is -(V's matrix)^T."""
    if V.dim != W.dim:
        raise CasimirError(f"modules have different dimensions: {V.dim} vs {W.dim}")
    return W.matrix == _neg_transpose(V.matrix)


def casimir_element(V: RealizedModule, W: RealizedModule) -> Poly:
    """sum_i V.basis[i] * W.basis[i] for a dual pair."""
    if not check_dual(V, W):
        raise CasimirError("modules are not dual")
    if V.derivation != W.derivation:
        raise CasimirError("modules are realized for different derivations")
    total = Poly.zero(V.derivation.n)
    for v, w in zip(V.basis, W.basis):
        total = total + v * w
    return total


def lowering_matrix(m: int) -> tuple[tuple, ...]:
    return tuple(tuple(1 if j == i - 1 else 0 for j in range(m + 1)) for i in range(m + 1))


def variable_module(m: int, n: int, D: LinearDerivation | None = None) -> RealizedModule:
    """X_m = <x_0..x_m> under d (or under D when m == n)."""
    if not 0 <= m <= n:
        raise CasimirError(f"level {m} out of range 0..{n}")
    basis = tuple(Poly.var(i, n) for i in range(m + 1))
    if D is None:
        return RealizedModule(basis, lowering_matrix(m), weitzenboeck(n))
    if m != n:
        raise CasimirError("a general derivation acts on the full variable span only")
    return RealizedModule(basis, D.matrix, D)


def standard_dual_pair(m: int, n: int) -> tuple[RealizedModule, RealizedModule]:
    """(X_m, X_m*) with X_m* realized as <x_m, -x_{m-1}, x_{m-2}, ...>."""
    V = variable_module(m, n)
    dual = tuple(Poly.var(m - i, n) * (-1) ** i for i in range(m + 1))
    W = RealizedModule(dual, _neg_transpose(V.matrix), V.derivation)
    return V, W


def standard_casimir(m: int, n: int) -> Poly:
    """sum_{i=0}^{m} (-1)^i x_i x_{m-i}; vanishes for odd m."""
    if m > n or m < 0:
        raise CasimirError(f"level {m} out of range 0..{n}")
    return casimir_element(*standard_dual_pair(m, n))


@lru_cache(maxsize=None)
def alpha(w: int, k: int) -> mpq:
    return mpq(factorial(w - k), factorial(k) * factorial(w))


def _require_kernel_isobaric(z: Poly) -> int:
    if not z:
        raise ZeroPolynomialError("expected a nonzero polynomial")
    if not is_isobaric(z):
        raise CasimirError("polynomial is not homogeneous isobaric")
    if apply(weitzenboeck(z.n), z):
        raise CasimirError(f"polynomial is not in the kernel of d: {format_poly(z)[:80]}")
    return weight(z)


def string_module(z: Poly, m: int, n: int | None = None) -> StringModule:
    """V_m(z) = <v_0..v_m>, v_i = alpha_i * dhat^i(z), with d(v_i) = v_{i-1}."""
    n = z.n if n is None else n
    if n != z.n:
        raise CasimirError("ambient size mismatch")
    w = _require_kernel_isobaric(z)
    if not 0 <= m <= min(w, n):
        raise CasimirError(f"string length {m} exceeds min(order={w}, n={n})")
    dh = raising(n)
    vectors = []
    cur = z
    for i in range(m + 1):
        vectors.append(cur * alpha(w, i))
        cur = apply(dh, cur)
    return StringModule(z, w, tuple(vectors))


def tau_dual_pair(i: int, z: Poly, n: int | None = None) -> tuple[RealizedModule, RealizedModule]:
    """(X_i, V_i(z)*) with the dual realized as u_k = (-1)^(i-k) v_{i-k}; its Casimir is tau_i(z)."""
    n = z.n if n is None else n
    sm = string_module(z, i, n)
    V = variable_module(i, n)
    dual = tuple(sm.vectors[i - k] * (-1) ** (i - k) for k in range(i + 1))
    return V, RealizedModule(dual, _neg_transpose(V.matrix), V.derivation)


def _tau_isobaric(i: int, z: Poly, w: int) -> Poly:
    # unchecked: z is a nonzero isobaric kernel element of weight w >= i
    n = z.n
    dh = raising(n)
    out: dict[int, object] = {}
    get = out.get
    cur = z
    for k in range(i + 1):
        if not cur:
            break
        c = alpha(w, k) if k % 2 == 0 else -alpha(w, k)
        if c.denominator == 1:
            c = mpz(c.numerator)
        unit = 1 << _shift(i - k, n)
        for key, v in cur._terms.items():
            kk = key + unit
            out[kk] = get(kk, 0) + c * v
        if k < i:
            cur = apply(dh, cur)
    return Poly._raw(n, {k: v for k, v in out.items() if v})


def tau(i: int, z: Poly, n: int | None = None, check: bool = True) -> Poly:
    """tau_i(z), extended linearly over the isobaric components of z."""
    n = z.n if n is None else n
    if n != z.n:
        raise CasimirError("ambient size mismatch")
    if not 0 <= i <= n:
        raise CasimirError(f"tau index {i} out of range 0..{n}")
    if not z:
        return Poly.zero(n)
    if check and apply(weitzenboeck(n), z):
        raise CasimirError("tau is defined on kernel elements of d only")
    total = Poly.zero(n)
    for w, part in isobaric_components(z):
        if i > w:
            raise CasimirError(f"tau_{i} is not admissible on a component of order {w}")
        total = total + _tau_isobaric(i, part, w)
    return total


def gradient_module(z: Poly, D: LinearDerivation) -> RealizedModule:
    """<d_0 z, ..., d_n z>, a realization of X_n* with matrix -lambda^T."""
    if not z:
        raise ZeroPolynomialError("expected a nonzero polynomial")
    if apply(D, z):
        raise CasimirError("polynomial is not in the kernel of the derivation")
    basis = tuple(partial(z, i) for i in range(D.n + 1))
    return RealizedModule(basis, _neg_transpose(D.matrix), D)


def euler_casimir(z: Poly, D: LinearDerivation) -> Poly:
    """Delta(X_n, Z_D) = sum x_i d_i z, checked against deg(z) * z."""
    if not is_homogeneous(z) or not z:
        raise CasimirError("expected a nonzero homogeneous polynomial")
    delta = casimir_element(variable_module(D.n, D.n, D), gradient_module(z, D))
    if delta != z * degree(z):
        raise AssertionError("Euler identity failed: input is not homogeneous")
    return delta


def tau_decompose(z: Poly, n: int | None = None) -> TauDecomposition:
    """c(0..n) with deg(z) * z = sum_i tau_{n-i}(c(i)).

    c(0) = d_n z,  c(i) = d_{n-i} z + sum_{k=1}^{i} (-1)^(k+1) c_k(i-k),
    c_k(j) = alpha_k(c(j)) * dhat^k(c(j)).
    """
    n = z.n if n is None else n
    if n != z.n:
        raise CasimirError("ambient size mismatch")
    _require_kernel_isobaric(z)
    dh = raising(n)
    d = weitzenboeck(n)
    cs: list[Poly] = []
    # powers[j][k] = dhat^k(c(j))
    powers: list[list[Poly]] = []
    for i in range(n + 1):
        ci = partial(z, n - i)
        for k in range(1, i + 1):
            ck = _string_vector(powers[i - k], k, dh)
            if ck:
                ci = ci + ck if k % 2 == 1 else ci - ck
        if ci and apply(d, ci):
            raise ReconstructionError(f"c({i}) is not in the kernel of d")
        cs.append(ci)
        powers.append([ci])
    recon = Poly.zero(n)
    for i, ci in enumerate(cs):
        if not ci:
            continue
        for w, part in isobaric_components(ci):
            if n - i > w:
                raise ReconstructionError(f"tau_{n - i} not admissible on c({i}) of order {w}")
            recon = recon + _tau_isobaric(n - i, part, w)
    if recon != z * degree(z):
        raise ReconstructionError("sum of tau_{n-i}(c(i)) differs from deg(z)*z")
    return TauDecomposition(z, tuple(cs))


def _string_vector(powers: list[Poly], k: int, dh) -> Poly:
    """c_k = alpha_k * dhat^k(c) for c = powers[0]; extends the cached powers."""
    base = powers[0]
    if not base:
        return base
    w = weight(base)
    if k > w:
        return Poly.zero(base.n)
    while len(powers) <= k:
        powers.append(apply(dh, powers[-1]))
    return powers[k] * alpha(w, k)
