"""Exact sparse multivariate polynomials over Q in the variables x0..xn.

Monomials are packed into a single Python int, one byte-aligned field of
``BITS`` bits per variable with x0 in the most significant field.  Adding
two packed keys multiplies the monomials, and for a fixed total degree the
integer order of keys is the lexicographic order with x0 > x1 > ... > xn.

Coefficients are gmpy2 ``mpz`` when integral and ``mpq`` otherwise; both
are exact and hash/compare like the Python numbers they represent.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce
from math import gcd
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence, Union

from gmpy2 import mpq, mpz

BITS = 8
MASK = (1 << BITS) - 1
MAX_EXPONENT = MASK

Scalar = Union[int, Fraction, "mpz", "mpq"]


class PolyError(ValueError):
    pass


class AmbientMismatch(PolyError):
    pass


class ZeroPolynomialError(PolyError):
    pass


class NotIsobaricError(PolyError):
    pass


class PolySyntaxError(PolyError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def rational(c) -> "mpz | mpq":
    """Coerce an int, Fraction, string or gmpy2 number to mpz/mpq."""
    if isinstance(c, str):
        c = Fraction(c)
    q = mpq(c)
    if q.denominator == 1:
        return mpz(q.numerator)
    return q


def _shift(i: int, n: int) -> int:
    return (n - i) * BITS


def pack(exponents: Sequence[int]) -> int:
    n = len(exponents) - 1
    key = 0
    for i, e in enumerate(exponents):
        if e < 0 or e > MAX_EXPONENT:
            raise PolyError(f"exponent {e} out of range")
        key |= e << _shift(i, n)
    return key


def unpack(key: int, n: int) -> tuple[int, ...]:
    return tuple((key >> _shift(i, n)) & MASK for i in range(n + 1))


def key_degree(key: int) -> int:
    d = 0
    while key:
        d += key & MASK
        key >>= BITS
    return d


def weight_of_monomial(m: Sequence[int], n: int) -> int:
    """Eigenvalue of the toral operator on a monomial: n*deg - 2*sum(i*a_i)."""
    if len(m) != n + 1:
        raise PolyError(f"monomial {tuple(m)} does not have {n + 1} exponents")
    return n * sum(m) - 2 * sum(i * a for i, a in enumerate(m))


class Poly:
    """Immutable polynomial in x0..xn with exact rational coefficients."""

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Sequence[int], Scalar] | None = None):
        if n < 0:
            raise PolyError("ambient size must be non-negative")
        self.n = n
        self._hash = None
        out: dict[int, object] = {}
        for m, c in (terms or {}).items():
            c = rational(c)
            if len(m) != n + 1:
                raise PolyError(f"monomial {tuple(m)} does not have {n + 1} exponents")
            k = pack(m)
            c = out.get(k, 0) + c
            if c:
                out[k] = c
            else:
                out.pop(k, None)
        self._terms = out

    @classmethod
    def _raw(cls, n: int, terms: dict) -> "Poly":
        # terms must already be packed keys with nonzero mpz/mpq values
        p = object.__new__(cls)
        p.n = n
        p._terms = terms
        p._hash = None
        return p

    # -- views --------------------------------------------------------------

    @property
    def terms(self) -> Mapping[tuple[int, ...], object]:
        return MappingProxyType({unpack(k, self.n): c for k, c in self._terms.items()})

    def keys(self) -> Iterable[int]:
        return self._terms.keys()

    def _sorted_keys(self) -> list[int]:
        return sorted(self._terms, key=lambda k: (key_degree(k), k), reverse=True)

    def __iter__(self) -> Iterator[tuple[tuple[int, ...], object]]:
        """Yield (exponents, coefficient) pairs in canonical order."""
        for k in self._sorted_keys():
            yield unpack(k, self.n), self._terms[k]

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Fraction)) or type(other) in (type(mpz(0)), type(mpq(0))):
            return self._terms == Poly.constant(other, self.n)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({self.n}, {format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls._raw(n, {})

    @classmethod
    def constant(cls, c: Scalar, n: int) -> "Poly":
        c = rational(c)
        return cls._raw(n, {0: c} if c else {})

    @classmethod
    def var(cls, i: int, n: int) -> "Poly":
        if not 0 <= i <= n:
            raise PolyError(f"variable index {i} out of range 0..{n}")
        return cls._raw(n, {1 << _shift(i, n): mpz(1)})

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.n != self.n:
                raise AmbientMismatch(f"ambient sizes differ: {self.n} vs {other.n}")
            return other
        return Poly.constant(other, self.n)

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        out = dict(a)
        for k, c in b.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                del out[k]
        return Poly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.n, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return scale(other, self)
        other = self._coerce(other)
        a, b = self._terms, other._terms
        if not a or not b:
            return Poly.zero(self.n)
        if len(a) < len(b):
            a, b = b, a
        if _max_key_degree(a) + _max_key_degree(b) > MAX_EXPONENT:
            raise PolyError("product degree exceeds the packed exponent range")
        out: dict[int, object] = {}
        get = out.get
        bitems = list(b.items())
        for k1, c1 in a.items():
            for k2, c2 in bitems:
                k = k1 + k2
                out[k] = get(k, 0) + c1 * c2
        return Poly._raw(self.n, {k: c for k, c in out.items() if c})

    def __rmul__(self, other) -> "Poly":
        return scale(other, self)

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise PolyError("negative power")
        result = Poly.constant(1, self.n)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result


def _max_key_degree(terms) -> int:
    return max(key_degree(k) for k in terms) if terms else 0


# -- module-level operations ---------------------------------------------------


def add(p: Poly, q: Poly) -> Poly:
    return p + q


def mul(p: Poly, q: Poly) -> Poly:
    return p * q


def scale(c: Scalar, p: Poly) -> Poly:
    c = rational(c)
    if not c:
        return Poly.zero(p.n)
    if c == 1:
        return p
    return Poly._raw(p.n, {k: c * v for k, v in p._terms.items()})


def product(factors: Iterable[Poly], n: int) -> Poly:
    return reduce(mul, factors, Poly.constant(1, n))


def partial(p: Poly, i: int) -> Poly:
    """Partial derivative with respect to x_i."""
    n = p.n
    if not 0 <= i <= n:
        raise PolyError(f"variable index {i} out of range 0..{n}")
    s = _shift(i, n)
    unit = 1 << s
    out = {}
    for k, c in p._terms.items():
        e = (k >> s) & MASK
        if e:
            out[k - unit] = c * e
    return Poly._raw(n, out)


def monomial_weight_key(key: int, n: int) -> int:
    total = 0
    w = 0
    for i in range(n + 1):
        e = (key >> _shift(i, n)) & MASK
        total += e
        w += i * e
    return n * total - 2 * w


def weights(p: Poly) -> set[int]:
    return {monomial_weight_key(k, p.n) for k in p._terms}


def degrees(p: Poly) -> set[int]:
    return {key_degree(k) for k in p._terms}


def is_homogeneous(p: Poly) -> bool:
    return len(degrees(p)) <= 1


def is_isobaric(p: Poly) -> bool:
    return is_homogeneous(p) and len(weights(p)) <= 1


def degree(p: Poly) -> int:
    """Total degree; the zero polynomial has none."""
    if not p:
        raise ZeroPolynomialError("the zero polynomial has no degree")
    return max(degrees(p))


def weight(p: Poly) -> int:
    if not p:
        raise ZeroPolynomialError("the zero polynomial has no weight")
    if not is_isobaric(p):
        raise NotIsobaricError(f"polynomial is not isobaric: {format_poly(p)[:80]}")
    return monomial_weight_key(next(iter(p._terms)), p.n)


def leading_term(p: Poly) -> tuple[tuple[int, ...], object]:
    if not p:
        raise ZeroPolynomialError("the zero polynomial has no leading term")
    k = max(p._terms, key=lambda k: (key_degree(k), k))
    return unpack(k, p.n), p._terms[k]


def normalize_primitive(p: Poly) -> Poly:
    """The rational multiple of p with coprime integer coefficients and positive leading coefficient."""
    if not p:
        raise ZeroPolynomialError("cannot normalize the zero polynomial")
    coeffs = list(p._terms.values())
    den = reduce(lambda a, b: a * b // gcd(a, b), (int(mpq(c).denominator) for c in coeffs), 1)
    ints = [int(c * den) for c in coeffs]
    g = reduce(gcd, ints, 0)
    _, lc = leading_term(p)
    if lc < 0:
        g = -g
    return Poly._raw(p.n, {k: mpz(v // g) for k, v in zip(p._terms, ints)})


def term_count(p: Poly) -> int:
    return len(p)


# -- text format ---------------------------------------------------------------


def _format_coeff(c) -> str:
    q = mpq(c)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _format_monomial(m: Sequence[int]) -> str:
    parts = []
    for i, e in enumerate(m):
        if e == 1:
            parts.append(f"x{i}")
        elif e > 1:
            parts.append(f"x{i}^{e}")
    return "*".join(parts)


def format_poly(p: Poly) -> str:
    """Canonical text: graded-lex order, integer or a/b coefficients."""
    if not p:
        return "0"
    out = []
    for idx, (m, c) in enumerate(p):
        neg = c < 0
        a = -c if neg else c
        mono = _format_monomial(m)
        if not mono:
            body = _format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coeff(a)}*{mono}"
        if idx == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\s*/\s*\d+)?)|(?P<var>x\s*(?P<idx>\d+)(?:\s*\^\s*(?P<exp>\d+))?)"
    r"|(?P<op>[+\-*]))"
)


def parse_poly(text: str, n: int) -> Poly:
    """Parse the canonical text grammar (terms of '*'-joined factors, '+'/'-' between terms)."""
    pos = 0
    tokens: list[tuple[str, object, int]] = []
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _TOKEN.match(stripped, pos)
        if not m or m.end() == pos:
            while stripped[pos].isspace():
                pos += 1
            raise PolySyntaxError(f"unexpected character {stripped[pos]!r}", pos)
        start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
        if m.group("num"):
            num, _, den = m.group("num").replace(" ", "").partition("/")
            if den and int(den) == 0:
                raise PolySyntaxError("zero denominator", start)
            tokens.append(("num", Fraction(int(num), int(den or 1)), start))
        elif m.group("var"):
            i = int(m.group("idx"))
            if i > n:
                raise PolySyntaxError(f"variable x{i} out of range for n={n}", start)
            e = int(m.group("exp")) if m.group("exp") else 1
            tokens.append(("var", (i, e), start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    if not tokens:
        raise PolySyntaxError("empty expression", 0)

    result = Poly.zero(n)
    i = 0
    first = True
    while i < len(tokens):
        sign = 1
        if tokens[i][0] == "op" and tokens[i][1] in "+-":
            sign = -1 if tokens[i][1] == "-" else 1
            i += 1
        elif not first:
            raise PolySyntaxError("expected '+' or '-'", tokens[i][2])
        first = False
        coeff = Fraction(sign)
        exps = [0] * (n + 1)
        expect_factor = True
        while i < len(tokens):
            kind, val, where = tokens[i]
            if expect_factor:
                if kind == "num":
                    coeff *= val
                elif kind == "var":
                    exps[val[0]] += val[1]
                else:
                    raise PolySyntaxError(f"expected a factor, got {val!r}", where)
                expect_factor = False
                i += 1
            elif kind == "op" and val == "*":
                expect_factor = True
                i += 1
            else:
                break
        if expect_factor:
            where = tokens[i][2] if i < len(tokens) else len(stripped)
            raise PolySyntaxError("expression ends with an operator", where)
        if coeff:
            result = result + Poly(n, {tuple(exps): coeff})
    return result
