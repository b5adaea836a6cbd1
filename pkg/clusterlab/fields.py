"""Exact coefficient fields (rationals and prime fields) and linear algebra over them.

Elements are sympy domain elements and matrices wrap sympy's DomainMatrix, so
row reduction, rank and characteristic polynomials are sympy's."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any, Iterator, List, Optional, Sequence, Tuple

import sympy
from sympy.polys.domains import GF
from sympy.polys.domains import QQ as _QQ
from sympy.polys.domains.domain import Domain
from sympy.polys.matrices import DomainMatrix

Vector = List[Any]


class FieldMismatch(ValueError):
    """Raised when elements or matrices over different fields are combined."""


@lru_cache(maxsize=None)
def _prime_domain(p: int) -> Domain:
    return GF(p, symmetric=False)


class Field:
    """Base class for the exact fields that representations live over."""

    tag: str = ""

    @property
    def domain(self) -> Domain:
        raise NotImplementedError

    def __call__(self, x) -> Any:
        K = self.domain
        if K.of_type(x):
            return x
        if isinstance(x, int):
            return K(x)
        if isinstance(x, str):
            x = sympy.Rational(x)
        if isinstance(x, sympy.Rational):
            return K(int(x.p)) / K(int(x.q))
        if hasattr(x, "numerator") and hasattr(x, "denominator"):
            return K(int(x.numerator)) / K(int(x.denominator))
        raise FieldMismatch(f"{x!r} is not an element of {self!r}")

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    @property
    def is_finite(self) -> bool:
        return False

    def random_element(self, rng: random.Random, bound: int = 3):
        raise NotImplementedError

    def to_json(self, x) -> Any:
        raise NotImplementedError

    # Matrix constructors

    def _wrap(self, rows: List[List[Any]], nrows: int, ncols: int) -> Matrix:
        return Matrix(self, DomainMatrix(rows, (nrows, ncols), self.domain))

    def matrix(self, rows: Sequence[Sequence], ncols: Optional[int] = None) -> Matrix:
        rows = [[self(x) for x in row] for row in rows]
        if ncols is None:
            if not rows:
                raise ValueError("Column count required for a matrix without rows")
            ncols = len(rows[0])
        return self._wrap(rows, len(rows), ncols)

    def zero_matrix(self, nrows: int, ncols: int) -> Matrix:
        return Matrix(self, DomainMatrix.zeros((nrows, ncols), self.domain))

    def identity_matrix(self, n: int) -> Matrix:
        return Matrix(self, DomainMatrix.eye(n, self.domain))

    def from_flat(self, values: Sequence, nrows: int, ncols: int) -> Matrix:
        values = [self(x) for x in values]
        return self._wrap([values[r * ncols : (r + 1) * ncols] for r in range(nrows)], nrows, ncols)

    def from_columns(self, columns: Sequence[Sequence], nrows: int) -> Matrix:
        return self._wrap(
            [[self(col[r]) for col in columns] for r in range(nrows)], nrows, len(columns)
        )

    def block_diagonal(self, blocks: Sequence[Matrix]) -> Matrix:
        nrows = sum(b.nrows for b in blocks)
        ncols = sum(b.ncols for b in blocks)
        rows = []
        offset = 0
        for b in blocks:
            for row in b.rows:
                rows.append(
                    [self.zero] * offset + list(row) + [self.zero] * (ncols - offset - b.ncols)
                )
            offset += b.ncols
        return self._wrap(rows, nrows, ncols)

    # Row reduction and everything derived from it

    def rref(self, rows: Sequence[Sequence], ncols: int) -> Tuple[List[Vector], List[int]]:
        """Reduced row echelon form: the nonzero rows and their pivot columns."""
        if not rows or ncols == 0:
            return [], []
        reduced, pivots = self.matrix(rows, ncols).dm.rref()
        return [list(r) for r in reduced.to_list()[: len(pivots)]], list(pivots)

    def rank(self, rows: Sequence[Sequence], ncols: int) -> int:
        if not rows or ncols == 0:
            return 0
        return self.matrix(rows, ncols).dm.rank()

    def kernel_basis(self, rows: Sequence[Sequence], ncols: int) -> Tuple[List[Vector], List[int]]:
        """Null space of the system given by `rows`.

        Each basis vector carries a 1 at its own free column and 0 at the
        others, so the coordinates of a kernel element are its entries at the
        returned free columns."""
        reduced, pivots = self.rref(rows, ncols)
        pivot_set = set(pivots)
        free = [c for c in range(ncols) if c not in pivot_set]
        basis = []
        for f in free:
            v = [self.zero] * ncols
            v[f] = self.one
            for row, p in zip(reduced, pivots):
                v[p] = -row[f]
            basis.append(v)
        return basis, free

    def column_space_basis(self, vectors: Sequence[Vector], dim: int) -> List[Vector]:
        """A basis (in RREF) of the span of `vectors` inside a space of dimension `dim`."""
        reduced, _ = self.rref(vectors, dim)
        return reduced

    def find_coordinates(self, basis: Sequence[Vector], v: Vector) -> Optional[Vector]:
        """Coordinates of v in a linearly independent family, or None if v is outside its span."""
        n = len(basis)
        if n == 0:
            return [] if not any(v) else None
        rows = [[b[r] for b in basis] + [v[r]] for r in range(len(v))]
        reduced, pivots = self.rref(rows, n + 1)
        if n in pivots:
            return None
        coords = [self.zero] * n
        for row, p in zip(reduced, pivots):
            coords[p] = row[n]
        return coords

    def quotient(self, spanning: Sequence[Vector], ambient: int) -> Quotient:
        reduced, pivots = self.rref(spanning, ambient)
        pivot_set = set(pivots)
        return Quotient(
            field=self,
            ambient=ambient,
            reduced=tuple(tuple(r) for r in reduced),
            pivots=tuple(pivots),
            free=tuple(c for c in range(ambient) if c not in pivot_set),
        )

    def is_invertible(self, m: Matrix) -> bool:
        return m.nrows == m.ncols and self.rank(m.rows, m.ncols) == m.nrows

    def charpoly(self, m: Matrix) -> List[Any]:
        """Coefficients of det(x - m), leading coefficient first."""
        if m.nrows == 0:
            return [self.one]
        return list(m.dm.charpoly())


@dataclass(frozen=True)
class RationalField(Field):
    tag = "Q"

    @property
    def domain(self) -> Domain:
        return _QQ

    def random_element(self, rng: random.Random, bound: int = 3):
        return _QQ(rng.randint(-bound, bound))

    def to_json(self, x) -> Any:
        n, d = int(x.numerator), int(x.denominator)
        return n if d == 1 else f"{n}/{d}"

    def __repr__(self):
        return "QQ"


@dataclass(frozen=True)
class PrimeField(Field):
    p: int

    @property
    def tag(self) -> str:  # type: ignore[override]
        return f"Fp:{self.p}"

    @property
    def domain(self) -> Domain:
        return _prime_domain(self.p)

    @property
    def is_finite(self) -> bool:
        return True

    def elements(self) -> Iterator[Any]:
        K = self.domain
        return (K(v) for v in range(self.p))

    def random_element(self, rng: random.Random, bound: int = 3):
        return self.domain(rng.randrange(self.p))

    def to_json(self, x) -> Any:
        return int(x)

    def __repr__(self):
        return f"GF({self.p})"


QQ = RationalField()


def field_from_tag(tag: str) -> Field:
    """Parse the serialization tag of a field: "Q" or "Fp:<p>"."""
    if tag == "Q":
        return QQ
    if tag.startswith("Fp:"):
        return PrimeField(int(tag[3:]))
    raise ValueError(f"Unknown field tag {tag!r}")


@dataclass(frozen=True, eq=False)
class Matrix:
    """An immutable matrix over a Field; shapes are explicit so empty blocks keep their size."""

    field: Field
    dm: DomainMatrix

    @property
    def nrows(self) -> int:
        return self.dm.shape[0]

    @property
    def ncols(self) -> int:
        return self.dm.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    @cached_property
    def rows(self) -> Tuple[Tuple[Any, ...], ...]:
        if self.ncols == 0:
            return tuple(() for _ in range(self.nrows))
        return tuple(tuple(r) for r in self.dm.to_list())

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.ncols != other.nrows:
            raise ValueError(
                f"Shape mismatch: {self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}"
            )
        if 0 in (self.nrows, self.ncols, other.ncols):
            return self.field.zero_matrix(self.nrows, other.ncols)
        return Matrix(self.field, self.dm.matmul(other.dm))

    def __add__(self, other: Matrix) -> Matrix:
        return Matrix(self.field, self.dm + other.dm)

    def __sub__(self, other: Matrix) -> Matrix:
        return Matrix(self.field, self.dm - other.dm)

    def __neg__(self) -> Matrix:
        return Matrix(self.field, -self.dm)

    def scale(self, c) -> Matrix:
        return Matrix(self.field, self.dm * self.field(c))

    def transpose(self) -> Matrix:
        return Matrix(self.field, self.dm.transpose())

    def column(self, j: int) -> Vector:
        return [r[j] for r in self.rows]

    def apply(self, v: Sequence) -> Vector:
        if self.ncols == 0:
            return [self.field.zero] * self.nrows
        col = self.field.from_columns([v], self.ncols)
        return (self @ col).column(0)

    def flat(self) -> Vector:
        return [x for r in self.rows for x in r]

    def is_zero(self) -> bool:
        return not any(self.flat())


@dataclass(frozen=True)
class Quotient:
    """An ambient coordinate space modulo a subspace.

    The standard unit vectors at the non-pivot columns of the subspace's RREF
    form the chosen basis of the quotient."""

    field: Field
    ambient: int
    reduced: Tuple[Tuple[Any, ...], ...]
    pivots: Tuple[int, ...]
    free: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.free)

    def reduce(self, v: Sequence) -> Vector:
        v = list(v)
        for row, p in zip(self.reduced, self.pivots):
            c = v[p]
            if c:
                v = [a - c * b for a, b in zip(v, row)]
        return v

    def coordinates(self, v: Sequence) -> Vector:
        r = self.reduce(v)
        return [r[f] for f in self.free]

    def lift(self, coords: Sequence) -> Vector:
        v = [self.field.zero] * self.ambient
        for f, c in zip(self.free, coords):
            v[f] = c
        return v

    def contains(self, v: Sequence) -> bool:
        return not any(self.reduce(v))
