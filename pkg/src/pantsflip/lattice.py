"""Integer symplectic lattice algebra on H_1 of a closed surface.

Classes are plain tuples of ints in the basis (a_1, b_1, ..., a_g, b_g).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form
from sympy.polys.domains import ZZ

ClassVector = tuple[int, ...]


class DimensionError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class SurfaceSig:
    """Genus and number of punctures of S_{g,n}."""

    genus: int
    punctures: int = 0

    def __post_init__(self):
        if self.genus < 0 or self.punctures < 0:
            raise ValueError(f"negative signature {self}")
        if 2 * self.genus + self.punctures <= 2:
            raise ValueError(f"signature (g={self.genus}, n={self.punctures}) violates 2g+n>2")

    @property
    def rank(self) -> int:
        return 2 * self.genus

    @property
    def num_edges(self) -> int:
        return 3 * self.genus - 3 + self.punctures

    @property
    def num_vertices(self) -> int:
        return 2 * self.genus - 2 + self.punctures


def zero(g: int) -> ClassVector:
    return (0,) * (2 * g)


def basis_a(g: int, i: int) -> ClassVector:
    """The class a_i (1-based)."""
    v = [0] * (2 * g)
    v[2 * (i - 1)] = 1
    return tuple(v)


def basis_b(g: int, i: int) -> ClassVector:
    v = [0] * (2 * g)
    v[2 * (i - 1) + 1] = 1
    return tuple(v)


def add(u: Sequence[int], v: Sequence[int]) -> ClassVector:
    return tuple(x + y for x, y in zip(u, v))


def scale(k: int, v: Sequence[int]) -> ClassVector:
    return tuple(k * x for x in v)


def neg(v: Sequence[int]) -> ClassVector:
    return tuple(-x for x in v)


def combine(pairs: Iterable[tuple[int, Sequence[int]]], length: int) -> ClassVector:
    out = [0] * length
    for k, v in pairs:
        for i, x in enumerate(v):
            out[i] += k * x
    return tuple(out)


def is_zero(v: Sequence[int]) -> bool:
    return not any(v)


def content(v: Sequence[int]) -> int:
    c = 0
    for x in v:
        c = gcd(c, x)
    return c


def is_primitive(v: Sequence[int]) -> bool:
    return content(v) == 1


def unoriented(v: Sequence[int]) -> ClassVector:
    """Canonical representative of {v, -v}: first nonzero coordinate positive."""
    for x in v:
        if x:
            return tuple(v) if x > 0 else neg(v)
    return tuple(v)


def symplectic_pairing(u: Sequence[int], v: Sequence[int]) -> int:
    if len(u) != len(v) or len(u) % 2:
        raise DimensionError(f"cannot pair vectors of lengths {len(u)} and {len(v)}")
    return sum(u[2 * i] * v[2 * i + 1] - u[2 * i + 1] * v[2 * i] for i in range(len(u) // 2))


@dataclass(frozen=True)
class SpanBasis:
    """Row Hermite normal form of an integer span; equal lattices give equal rows."""

    rows: tuple[ClassVector, ...]
    dim: int

    @property
    def rank(self) -> int:
        return len(self.rows)

    def contains(self, v: Sequence[int]) -> bool:
        return span_basis(list(self.rows) + [tuple(v)], self.dim) == self


def _check_dims(vectors: Sequence[Sequence[int]], dim: int | None) -> int:
    if dim is None:
        if not vectors:
            raise DimensionError("dimension of an empty family is unknown")
        dim = len(vectors[0])
    for v in vectors:
        if len(v) != dim:
            raise DimensionError(f"vector of length {len(v)} in a family of length {dim}")
    return dim


def hermite_rows(vectors: Sequence[Sequence[int]], dim: int) -> list[list[int]]:
    rows = [list(v) for v in vectors if any(v)]
    r = 0
    for c in range(dim):
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(rows[i][c]))
            rows[r], rows[piv] = rows[piv], rows[r]
            done = True
            for i in range(r + 1, len(rows)):
                if rows[i][c]:
                    q = rows[i][c] // rows[r][c]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                    if rows[i][c]:
                        done = False
            if done:
                break
        if r < len(rows) and rows[r][c]:
            if rows[r][c] < 0:
                rows[r] = [-x for x in rows[r]]
            for i in range(r):
                q = rows[i][c] // rows[r][c]
                if q:
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
            r += 1
    return rows[:r]


def span_basis(vectors: Sequence[Sequence[int]], dim: int | None = None) -> SpanBasis:
    if not vectors and dim is None:
        return SpanBasis((), 0)
    dim = _check_dims(vectors, dim)
    return SpanBasis(tuple(tuple(r) for r in hermite_rows(vectors, dim)), dim)


def spans_full(vectors: Sequence[Sequence[int]], dim: int | None = None) -> bool:
    """True iff the integer span of ``vectors`` is all of Z^dim (Smith form all ones)."""
    if not vectors:
        return dim == 0
    dim = _check_dims(vectors, dim)
    if len(vectors) < dim:
        return False
    snf = smith_normal_form(Matrix([list(v) for v in vectors]), domain=ZZ)
    return all(abs(snf[i, i]) == 1 for i in range(dim))


def is_lagrangian(vectors: Sequence[Sequence[int]], g: int) -> bool:
    for v in vectors:
        if len(v) != 2 * g:
            raise DimensionError(f"expected length {2 * g}, got {len(v)}")
    if span_basis(vectors, 2 * g).rank != g:
        return False
    return all(symplectic_pairing(u, v) == 0 for i, u in enumerate(vectors) for v in vectors[i + 1:])


def coordinates_in(w: Sequence[int], u: Sequence[int], v: Sequence[int]) -> tuple[int, int] | None:
    """Integers (x, y) with w = x*u + y*v, for a hyperbolic pair <u, v> = +-1; None if w is outside."""
    d = symplectic_pairing(u, v)
    if abs(d) != 1:
        raise ValueError("basis pair must have pairing +-1")
    x = symplectic_pairing(w, v) * d
    y = symplectic_pairing(u, w) * d
    if combine([(x, u), (y, v)], len(w)) != tuple(w):
        return None
    return x, y
