"""Brute-force verification of generating sets, one graded slice at a time.

For a slice of fixed degree and weight the kernel of d is computed as the
exact nullspace of the integer matrix of d restricted to the slice; the
subalgebra side is the rank of all generator products landing in the slice.
Neither computation uses the tau machinery or the slice counting shortcut
of the solver.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from math import gcd
from typing import Sequence

from .derivation import apply, weitzenboeck
from .poly import Poly, normalize_primitive, pack, weight_of_monomial
from .subalgebra import GeneratorInfo, Signature, signature, signature_solutions


@dataclass(frozen=True)
class GradedSlice:
    n: int
    deg: int
    weight: int
    monomials: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.monomials)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def slice_basis(n: int, deg: int, weight: int) -> GradedSlice:
    """All monomials of the given degree and weight, in canonical (descending) order."""
    if deg < 0:
        raise ValueError("degree must be non-negative")
    monos = tuple(m for m in _compositions(deg, n + 1) if weight_of_monomial(m, n) == weight)
    return GradedSlice(n, deg, weight, monos)


def _content(row: list[int]) -> int:
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
            if g == 1:
                break
    return g


def _row_reduce(rows: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free reduced echelon form; returns (rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    width = len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(width):
        sel = next((i for i in range(r, len(m)) if m[i][col]), None)
        if sel is None:
            continue
        m[r], m[sel] = m[sel], m[r]
        p = m[r][col]
        for i in range(len(m)):
            if i != r and m[i][col]:
                a = m[i][col]
                m[i] = [p * x - a * y for x, y in zip(m[i], m[r])]
                g = _content(m[i])
                if g > 1:
                    m[i] = [x // g for x in m[i]]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def integer_rank(rows: list[list[int]]) -> int:
    return len(_row_reduce(rows)[1])


def integer_nullspace(rows: list[list[int]], width: int) -> list[list[int]]:
    """Integer basis of {x : rows . x = 0}, one vector per free column."""
    if not rows:
        return [[1 if j == f else 0 for j in range(width)] for f in range(width)]
    red, pivots = _row_reduce(rows)
    free = [c for c in range(width) if c not in set(pivots)]
    basis = []
    for f in free:
        lcm = 1
        for i, pc in enumerate(pivots):
            if red[i][f]:
                piv = abs(red[i][pc])
                lcm = lcm * piv // gcd(lcm, piv)
        x = [0] * width
        x[f] = lcm
        for i, pc in enumerate(pivots):
            x[pc] = -lcm * red[i][f] // red[i][pc]
        g = _content(x)
        basis.append([v // g for v in x])
    return basis


def kernel_slice(n: int, deg: int, weight: int) -> list[Poly]:
    """Basis of ker d inside the (deg, weight) slice, each element primitive."""
    src = slice_basis(n, deg, weight)
    if not src.monomials:
        return []
    dst = slice_basis(n, deg, weight + 2)
    d = weitzenboeck(n)
    index = {pack(m): i for i, m in enumerate(dst.monomials)}
    columns = []
    for m in src.monomials:
        image = apply(d, Poly(n, {m: 1}))
        col = [0] * len(dst.monomials)
        for key, c in image._terms.items():
            col[index[key]] = int(c)
        columns.append(col)
    rows = [[columns[j][i] for j in range(len(columns))] for i in range(len(dst.monomials))]
    vectors = integer_nullspace(rows, len(src.monomials))
    out = []
    for v in vectors:
        p = Poly(n, {m: c for m, c in zip(src.monomials, v) if c})
        if apply(d, p):
            raise AssertionError("nullspace vector is not annihilated by d")
        out.append(normalize_primitive(p))
    return out


def _polys_and_signatures(gens, n) -> tuple[list[Poly], list[Signature]]:
    polys = [g.poly if isinstance(g, GeneratorInfo) else g for g in gens]
    sigs = [g.sig if isinstance(g, GeneratorInfo) else signature(g, n) for g in gens]
    return polys, sigs


def subalgebra_slice_dim(gens: Sequence, n: int, deg: int, weight: int) -> int:
    """Dimension of the span of generator products in the (deg, weight) slice."""
    if deg == 0:
        return 1 if weight == 0 else 0
    if weight < 0 or (n * deg - weight) % 2:
        return 0
    polys, sigs = _polys_and_signatures(gens, n)
    target = Signature(deg, weight, (n * deg - weight) // 2)
    sols = signature_solutions(target, sigs)
    if not sols:
        return 0
    src = slice_basis(n, deg, weight)
    index = {pack(m): i for i, m in enumerate(src.monomials)}
    rows = []
    for alpha in sols:
        p = Poly.constant(1, n)
        for g, a in zip(polys, alpha):
            if a:
                p = p * g**a
        row = [0] * len(src.monomials)
        for key, c in p._terms.items():
            row[index[key]] = int(c)
        rows.append(row)
    return integer_rank(rows)


@dataclass(frozen=True)
class SliceRow:
    deg: int
    weight: int
    oracle_dim: int
    subalgebra_dim: int

    @property
    def ok(self) -> bool:
        return self.oracle_dim == self.subalgebra_dim


@dataclass
class CrossCheckReport:
    n: int
    deg_max: int
    rows: list[SliceRow]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def discrepancies(self) -> list[SliceRow]:
        return [r for r in self.rows if not r.ok]

    def text(self) -> str:
        lines = [f"# n={self.n} deg<={self.deg_max}: {len(self.discrepancies())} discrepancies"]
        lines.append(f"{'deg':>4} {'weight':>7} {'oracle':>7} {'algebra':>8}  ok")
        for r in self.rows:
            lines.append(f"{r.deg:>4} {r.weight:>7} {r.oracle_dim:>7} {r.subalgebra_dim:>8}  {'yes' if r.ok else 'NO'}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "deg_max": self.deg_max,
            "ok": self.ok,
            "slices": [dict(asdict(r), ok=r.ok) for r in self.rows],
        }
        return json.dumps(doc, indent=2) + "\n"


def _check_slice(args) -> SliceRow:
    polys, sigs, n, deg, w = args
    gens = [GeneratorInfo(p, s, "", 0) for p, s in zip(polys, sigs)]
    return SliceRow(deg, w, len(kernel_slice(n, deg, w)), subalgebra_slice_dim(gens, n, deg, w))


def cross_check(gens: Sequence, n: int, deg_max: int = 6, threads: int = 1) -> CrossCheckReport:
    """Compare kernel and subalgebra dimensions on every slice with deg <= deg_max, weight >= 0."""
    polys, sigs = _polys_and_signatures(gens, n)
    jobs = [
        (polys, sigs, n, deg, w)
        for deg in range(1, deg_max + 1)
        for w in range((n * deg) % 2, n * deg + 1, 2)
    ]
    if threads > 1:
        with ProcessPoolExecutor(threads) as pool:
            rows = list(pool.map(_check_slice, jobs))
    else:
        rows = [_check_slice(j) for j in jobs]
    return CrossCheckReport(n, deg_max, rows)
