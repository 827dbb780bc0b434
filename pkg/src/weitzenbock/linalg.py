"""Exact and modular linear algebra used by the module and membership code.

Vectors are sparse dicts (key -> coefficient) or dense lists.  Nothing here
uses floating point.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping, Sequence

from gmpy2 import mpq, mpz

PRIME = (1 << 61) - 1


class SparseEchelon:
    """Incremental row echelon form over Q for sparse vectors.

    Each stored row remembers how it was combined from the inserted
    vectors, so ``reduce`` can express a vector in terms of the inputs.
    """

    def __init__(self):
        self._rows: list[tuple[Hashable, dict, dict]] = []  # (pivot, vec with vec[pivot]==1, combo)
        self._pivots: dict[Hashable, int] = {}
        self.count = 0

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vec: Mapping) -> tuple[dict, dict]:
        """Return (residual, combo) with vec = residual + sum(combo[j] * input_j)."""
        v = {k: mpq(c) for k, c in vec.items() if c}
        combo: dict[int, object] = {}
        # pivots are eliminated in insertion order; a later row never reintroduces an earlier pivot
        for pivot, row, rcombo in self._rows:
            c = v.get(pivot)
            if not c:
                continue
            for k, x in row.items():
                y = v.get(k, 0) - c * x
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
            for j, x in rcombo.items():
                y = combo.get(j, 0) + c * x
                if y:
                    combo[j] = y
                else:
                    combo.pop(j, None)
        return v, combo

    def add(self, vec: Mapping) -> bool:
        """Insert a vector; True if it was independent of the previous ones."""
        index = self.count
        self.count += 1
        residual, combo = self.reduce(vec)
        if not residual:
            return False
        pivot = min(residual, key=_sort_key)
        inv = 1 / residual[pivot]
        row = {k: c * inv for k, c in residual.items()}
        rcombo = {j: -c * inv for j, c in combo.items()}
        rcombo[index] = inv
        # keep earlier rows free of the new pivot so reduce() is one pass
        for t, (p, r, rc) in enumerate(self._rows):
            c = r.get(pivot)
            if c:
                for k, x in row.items():
                    y = r.get(k, 0) - c * x
                    if y:
                        r[k] = y
                    else:
                        r.pop(k, None)
                for j, x in rcombo.items():
                    y = rc.get(j, 0) - c * x
                    if y:
                        rc[j] = y
                    else:
                        rc.pop(j, None)
        self._pivots[pivot] = len(self._rows)
        self._rows.append((pivot, row, rcombo))
        return True


def _sort_key(k):
    return (0, k) if isinstance(k, int) else (1, repr(k))


def sparse_rank(vectors: Iterable[Mapping]) -> int:
    ech = SparseEchelon()
    return sum(ech.add(v) for v in vectors)


class ModEchelon:
    """Incremental echelon form of dense vectors modulo a prime."""

    def __init__(self, width: int, p: int = PRIME):
        self.width = width
        self.p = p
        self._rows: list[tuple[int, list[int]]] = []

    def __len__(self) -> int:
        return len(self._rows)

    def _reduce(self, vec: Sequence[int]) -> list[int]:
        p = self.p
        v = [x % p for x in vec]
        for piv, row in self._rows:
            c = v[piv]
            if c:
                for j in range(piv, self.width):
                    if row[j]:
                        v[j] = (v[j] - c * row[j]) % p
        return v

    def add(self, vec: Sequence[int]) -> bool:
        v = self._reduce(vec)
        for piv, x in enumerate(v):
            if x:
                inv = pow(x, -1, self.p)
                self._rows.append((piv, [(y * inv) % self.p for y in v]))
                return True
        return False

    def contains(self, vec: Sequence[int]) -> bool:
        return not any(self._reduce(vec))


def solve_exact(columns: Sequence[Sequence], target: Sequence) -> list | None:
    """Solve sum_j beta_j * columns[j] = target exactly over Q.

    Free variables are set to zero.  Returns None when inconsistent.
    """
    rows = len(target)
    ncols = len(columns)
    m = [[mpq(columns[j][i]) for j in range(ncols)] + [mpq(target[i])] for i in range(rows)]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        sel = next((i for i in range(r, rows) if m[i][col]), None)
        if sel is None:
            continue
        m[r], m[sel] = m[sel], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][col]:
                c = m[i][col]
                m[i] = [x - c * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == rows:
            break
    if any(m[i][ncols] for i in range(r, rows)):
        return None
    beta = [mpq(0)] * ncols
    for i, col in enumerate(pivots):
        beta[col] = m[i][ncols]
    return beta


def as_rational(x):
    q = mpq(x)
    return mpz(q.numerator) if q.denominator == 1 else q
