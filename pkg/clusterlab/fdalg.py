"""Finite-dimensional algebras given by structure constants, and their modules.

An algebra here comes with a complete set of orthogonal idempotents e_1..e_q
that are themselves basis elements, and every other basis element b lies in a
single block e_i A e_j. Modules store one matrix per basis element, mapping
component j to component i.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import sympy
from sympy.polys.polyfuncs import interpolate

from clusterlab.combinatorics import Quiver
from clusterlab.fields import Field, Matrix, Vector

logger = logging.getLogger(__name__)

DEFAULT_PRIMES = (2, 3, 5, 7, 11, 13)
DEFAULT_SUBMODULE_BUDGET = 2_000_000
"""Maximum number of candidate subspace tuples examined by one point count."""

Sparse = Tuple[Tuple[int, Any], ...]


class AlgebraIntegrityError(RuntimeError):
    """The structure constants do not describe the kind of algebra we assumed."""


class AlgebraMismatch(ValueError):
    """Modules over different algebras were combined."""


class CountingPolynomialError(ArithmeticError):
    """Submodule counts at different primes do not lie on one polynomial evaluating to an integer."""


class SubmoduleBudgetExceeded(RuntimeError):
    """A quiver Grassmannian point count needed more candidates than the budget allows."""

    def __init__(self, budget: int, dims: Sequence[int], e: Sequence[int], p: int):
        super().__init__(
            f"Counting submodules of dimension {tuple(e)} in a module of dimension "
            f"{tuple(dims)} over GF({p}) exceeds the budget of {budget} candidates"
        )
        self.budget = budget


@dataclass(frozen=True, eq=False)
class FDAlgebra:
    field: Field
    q: int
    blocks: Tuple[Tuple[int, int], ...]
    """blocks[b] = (i, j) when e_i b e_j = b."""
    mult: Mapping[Tuple[int, int], Sparse]
    """Products of basis elements; pairs missing from the table multiply to zero."""
    units: Tuple[int, ...]
    """Basis index of each idempotent e_i."""
    labels: Tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.blocks)

    def basis_in(self, i: int, j: int) -> List[int]:
        return self._block_index[(i, j)]

    @cached_property
    def _block_index(self) -> Dict[Tuple[int, int], List[int]]:
        index: Dict[Tuple[int, int], List[int]] = {
            (i, j): [] for i in range(self.q) for j in range(self.q)
        }
        for b, ij in enumerate(self.blocks):
            index[ij].append(b)
        return index

    def product(self, a: int, b: int) -> Sparse:
        return self.mult.get((a, b), ())

    def multiply(self, x: Mapping[int, Any], y: Mapping[int, Any]) -> Dict[int, Any]:
        """Product of two sparse elements."""
        out: Dict[int, Any] = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for c, k in self.product(a, b):
                    out[c] = out.get(c, self.field.zero) + ca * cb * k
        return {c: v for c, v in out.items() if v}

    def check_associativity(self):
        """Audit (ab)c = a(bc) on all composable basis triples."""
        for a, b, c in itertools.product(range(self.dim), repeat=3):
            if self.blocks[a][1] != self.blocks[b][0] or self.blocks[b][1] != self.blocks[c][0]:
                continue
            left = self.multiply(self.multiply({a: self.field.one}, {b: self.field.one}), {c: self.field.one})
            right = self.multiply({a: self.field.one}, self.multiply({b: self.field.one}, {c: self.field.one}))
            if left != right:
                raise AlgebraIntegrityError(
                    f"Associativity fails on ({self._label(a)}, {self._label(b)}, {self._label(c)})"
                )

    def check_idempotents(self):
        one = self.field.one
        for i, ei in enumerate(self.units):
            for j, ej in enumerate(self.units):
                expected = {ei: one} if i == j else {}
                if self.multiply({ei: one}, {ej: one}) != expected:
                    raise AlgebraIntegrityError(f"e_{i + 1} e_{j + 1} is wrong")
        for b, (i, j) in enumerate(self.blocks):
            if self.multiply({self.units[i]: one}, {b: one}) != {b: one}:
                raise AlgebraIntegrityError(f"e_{i + 1} does not fix {self._label(b)} on the left")
            if self.multiply({b: one}, {self.units[j]: one}) != {b: one}:
                raise AlgebraIntegrityError(f"e_{j + 1} does not fix {self._label(b)} on the right")

    def _label(self, b: int) -> str:
        return self.labels[b] if self.labels else str(b)

    @cached_property
    def residues(self) -> Dict[int, Any]:
        """The residue functional on each local corner algebra e_i A e_i.

        Left multiplication by b is a scalar plus a nilpotent; the scalar is its
        trace divided by the corner dimension, or over a small prime field the
        unique value making it singular."""
        out = {}
        for i in range(self.q):
            corner = self.basis_in(i, i)
            pos = {b: k for k, b in enumerate(corner)}
            d = len(corner)
            for b in corner:
                cols = []
                for x in corner:
                    col = [self.field.zero] * d
                    for c, k in self.product(b, x):
                        col[pos[c]] += k
                    cols.append(col)
                left = self.field.from_columns(cols, d)
                out[b] = self._scalar_part(left, d, i)
        return out

    def _scalar_part(self, m: Matrix, d: int, i: int):
        field = self.field
        if not field.is_finite or d % field.p:  # type: ignore[attr-defined]
            return sum((m.rows[k][k] for k in range(d)), field.zero) / field(d)
        for c in field.elements():  # type: ignore[attr-defined]
            if not field.is_invertible(m - field.identity_matrix(d).scale(c)):
                return c
        raise AlgebraIntegrityError(f"The corner algebra at {i + 1} is not local")

    @cached_property
    def radical(self) -> Tuple[Tuple[int, int, Sparse], ...]:
        """A basis of rad A as (i, j, sparse element of e_i A e_j)."""
        out: List[Tuple[int, int, Sparse]] = []
        one = self.field.one
        for (i, j), members in self._block_index.items():
            if i != j:
                out.extend((i, j, ((b, one),)) for b in members)
                continue
            functional = [self.residues[b] for b in members]
            kernel, _ = self.field.kernel_basis([functional], len(members))
            for v in kernel:
                out.append((i, i, tuple((b, c) for b, c in zip(members, v) if c)))
        self._check_nilpotent(out)
        return tuple(out)

    def _check_nilpotent(self, rad: Sequence[Tuple[int, int, Sparse]]):
        power = [dict(x) for _, _, x in rad]
        for _ in range(self.dim + 1):
            if not power:
                return
            products = [
                self.multiply(x, dict(y)) for x in power for _, _, y in rad
            ]
            rows = [[p.get(b, self.field.zero) for b in range(self.dim)] for p in products if p]
            reduced = self.field.column_space_basis(rows, self.dim)
            power = [{b: c for b, c in enumerate(r) if c} for r in reduced]
        raise AlgebraIntegrityError("The candidate radical is not nilpotent")


@dataclass(frozen=True, eq=False)
class FDModule:
    algebra: FDAlgebra
    dims: Tuple[int, ...]
    actions: Tuple[Matrix, ...]
    """actions[b] maps component j to component i, where blocks[b] = (i, j)."""

    @property
    def total(self) -> int:
        return sum(self.dims)

    @property
    def field(self) -> Field:
        return self.algebra.field

    def act(self, element: Sparse, i: int, j: int) -> Matrix:
        out = self.field.zero_matrix(self.dims[i], self.dims[j])
        for b, c in element:
            out = out + self.actions[b].scale(c)
        return out

    def check(self):
        """Audit that the actions form a representation of the algebra."""
        A = self.algebra
        for a, b in itertools.product(range(A.dim), repeat=2):
            i, j = A.blocks[a]
            j2, l = A.blocks[b]
            if j != j2:
                continue
            lhs = self.act(A.product(a, b), i, l)
            rhs = self.actions[a] @ self.actions[b]
            if not (lhs - rhs).is_zero():
                raise AlgebraIntegrityError(f"Module action fails on the product ({a}, {b})")


def _check_same_algebra(M: FDModule, N: FDModule):
    if M.algebra is not N.algebra:
        raise AlgebraMismatch("Modules over different algebras")


def simple_module(A: FDAlgebra, i: int) -> FDModule:
    dims = tuple(int(v == i) for v in range(A.q))
    actions = []
    for b, (k, l) in enumerate(A.blocks):
        if k == l == i:
            actions.append(A.field.matrix([[A.residues[b]]], 1))
        else:
            actions.append(A.field.zero_matrix(dims[k], dims[l]))
    return FDModule(A, dims, tuple(actions))


def projective_module(A: FDAlgebra, j: int) -> FDModule:
    """A e_j: component i is e_i A e_j, acted on by left multiplication."""
    comps = [A.basis_in(i, j) for i in range(A.q)]
    pos = [{x: k for k, x in enumerate(c)} for c in comps]
    actions = []
    for a, (i2, i) in enumerate(A.blocks):
        cols = []
        for x in comps[i]:
            col = [A.field.zero] * len(comps[i2])
            for c, k in A.product(a, x):
                col[pos[i2][c]] += k
            cols.append(col)
        actions.append(A.field.from_columns(cols, len(comps[i2])))
    return FDModule(A, tuple(len(c) for c in comps), tuple(actions))


def direct_sum_modules(modules: Sequence[FDModule]) -> FDModule:
    first = modules[0]
    for m in modules[1:]:
        _check_same_algebra(first, m)
    A = first.algebra
    dims = tuple(sum(m.dims[i] for m in modules) for i in range(A.q))
    actions = tuple(
        A.field.block_diagonal([m.actions[b] for m in modules]) for b in range(A.dim)
    )
    return FDModule(A, dims, actions)


def submodule(M: FDModule, basis: Sequence[Sequence[Vector]]) -> FDModule:
    """Restriction of M to the given (stable) subspaces, one independent family per component."""
    field = M.field
    actions = []
    for b, (i, j) in enumerate(M.algebra.blocks):
        cols = []
        for u in basis[j]:
            coords = field.find_coordinates(basis[i], M.actions[b].apply(u))
            if coords is None:
                raise ValueError("Subspaces are not stable under the action")
            cols.append(coords)
        actions.append(field.from_columns(cols, len(basis[i])))
    return FDModule(M.algebra, tuple(len(b) for b in basis), tuple(actions))


def radical_of(M: FDModule) -> List[List[Vector]]:
    """rad A . M, as a spanning family per component."""
    out: List[List[Vector]] = [[] for _ in range(M.algebra.q)]
    for i, j, element in M.algebra.radical:
        m = M.act(element, i, j)
        out[i].extend(m.column(c) for c in range(m.ncols))
    return out


def top_dims(M: FDModule) -> Tuple[int, ...]:
    rad = radical_of(M)
    return tuple(d - M.field.rank(r, d) for d, r in zip(M.dims, rad))


@dataclass(frozen=True, eq=False)
class ProjectiveCover:
    module: FDModule
    map: Tuple[Matrix, ...]
    """Component matrices of the surjection onto the covered module."""
    tops: Tuple[int, ...]
    """Vertex of each indecomposable projective summand, in order."""


def projective_cover(N: FDModule) -> ProjectiveCover:
    A, field = N.algebra, N.field
    rad = radical_of(N)
    generators = []
    for i in range(A.q):
        quotient = field.quotient(rad[i], N.dims[i])
        for f in quotient.free:
            generators.append((i, [field.one if k == f else field.zero for k in range(N.dims[i])]))
    if not generators:
        zero = FDModule(
            A, (0,) * A.q, tuple(field.zero_matrix(0, 0) for _ in range(A.dim))
        )
        return ProjectiveCover(zero, tuple(field.zero_matrix(d, 0) for d in N.dims), ())
    cover = direct_sum_modules([projective_module(A, i) for i, _ in generators])
    comps = []
    for k in range(A.q):
        cols = []
        for i, v in generators:
            for x in A.basis_in(k, i):
                cols.append(N.actions[x].apply(v))
        comps.append(field.from_columns(cols, N.dims[k]))
    return ProjectiveCover(cover, tuple(comps), tuple(i for i, _ in generators))


def syzygy(N: FDModule) -> FDModule:
    cover = projective_cover(N)
    field = N.field
    basis = [
        field.kernel_basis(m.rows, cover.module.dims[k])[0] for k, m in enumerate(cover.map)
    ]
    return submodule(cover.module, basis)


def hom_A(M: FDModule, N: FDModule) -> int:
    _check_same_algebra(M, N)
    field = M.field
    off = list(itertools.accumulate((n * m for m, n in zip(M.dims, N.dims)), initial=0))
    rows = []
    for b, (i, j) in enumerate(M.algebra.blocks):
        Nb, Mb = N.actions[b], M.actions[b]
        for r in range(N.dims[i]):
            for c in range(M.dims[j]):
                row = [field.zero] * off[-1]
                for k in range(N.dims[j]):
                    row[off[j] + k * M.dims[j] + c] += Nb.rows[r][k]
                for k in range(M.dims[i]):
                    row[off[i] + r * M.dims[i] + k] -= Mb.rows[k][c]
                rows.append(row)
    return off[-1] - field.rank(rows, off[-1])


def ext1_A(M: FDModule, N: FDModule) -> int:
    """dim Ext^1 from 0 -> Hom(M,N) -> Hom(P0,N) -> Hom(Omega M,N) -> Ext^1(M,N) -> 0."""
    _check_same_algebra(M, N)
    cover = projective_cover(M)
    return hom_A(syzygy(M), N) - hom_A(cover.module, N) + hom_A(M, N)


def euler_form(M: FDModule, N: FDModule) -> int:
    return hom_A(M, N) - ext1_A(M, N)


def antisym_form_matrix(A: FDAlgebra) -> List[List[int]]:
    """Entry (i, j) is <S_i,S_j> - <S_j,S_i>."""
    simples = [simple_module(A, i) for i in range(A.q)]
    form = [[euler_form(s, t) for t in simples] for s in simples]
    return [[form[i][j] - form[j][i] for j in range(A.q)] for i in range(A.q)]


def pair_with_dimension(matrix: Sequence[Sequence[int]], e: Sequence[int]) -> Tuple[int, ...]:
    """The vector (<S_i, e>_a)_i."""
    return tuple(sum(a * x for a, x in zip(row, e)) for row in matrix)


def quiver_of(A: FDAlgebra) -> Quiver:
    """The Gabriel quiver: dim Ext^1(S_i,S_j) arrows i -> j."""
    simples = [simple_module(A, i) for i in range(A.q)]
    arrows = []
    for i, j in itertools.product(range(A.q), repeat=2):
        count = ext1_A(simples[i], simples[j])
        if not count:
            continue
        if i == j:
            raise AlgebraIntegrityError(f"The quiver has a loop at {i + 1}")
        if ext1_A(simples[j], simples[i]):
            raise AlgebraIntegrityError(f"The quiver has a 2-cycle between {i + 1} and {j + 1}")
        arrows.append((i, j, count))
    return Quiver.from_arrows(A.q, arrows)


# Quiver Grassmannians


def subspaces(field: Field, d: int, e: int) -> Iterator[List[Vector]]:
    """All e-dimensional subspaces of GF(p)^d, as RREF row bases."""
    values = list(field.elements())  # type: ignore[attr-defined]
    for pivots in itertools.combinations(range(d), e):
        pivot_set = set(pivots)
        slots = [(r, c) for r, p in enumerate(pivots) for c in range(p + 1, d) if c not in pivot_set]
        for fill in itertools.product(values, repeat=len(slots)):
            rows = [[field.zero] * d for _ in range(e)]
            for r, p in enumerate(pivots):
                rows[r][p] = field.one
            for (r, c), x in zip(slots, fill):
                rows[r][c] = x
            yield rows


def count_submodules(
    N: FDModule, e: Sequence[int], budget: int = DEFAULT_SUBMODULE_BUDGET
) -> int:
    """Number of submodules of N with dimension vector e, over the prime field of N."""
    field, A = N.field, N.algebra
    if not field.is_finite:
        raise ValueError("Submodules can only be counted over a finite field")
    if any(x < 0 or x > d for x, d in zip(e, N.dims)):
        return 0
    checks: List[List[Tuple[int, int, int]]] = [[] for _ in range(A.q)]
    for b, (i, j) in enumerate(A.blocks):
        if not N.actions[b].is_zero():
            checks[max(i, j)].append((b, i, j))
    visited = 0
    chosen: List[Any] = [None] * A.q

    def stable(k: int) -> bool:
        for b, i, j in checks[k]:
            sub_i = chosen[i]
            for u in chosen[j][1]:
                if not sub_i[0].contains(N.actions[b].apply(u)):
                    return False
        return True

    def search(k: int) -> int:
        nonlocal visited
        if k == A.q:
            return 1
        total = 0
        for rows in subspaces(field, N.dims[k], e[k]):
            visited += 1
            if visited > budget:
                raise SubmoduleBudgetExceeded(budget, N.dims, e, field.p)  # type: ignore[attr-defined]
            chosen[k] = (field.quotient(rows, N.dims[k]), rows)
            if stable(k):
                total += search(k + 1)
        chosen[k] = None
        return total

    return search(0)


def degree_bound(dims: Sequence[int], e: Sequence[int]) -> int:
    """Dimension of the product of ordinary Grassmannians containing Gr_e."""
    return sum(x * (d - x) for x, d in zip(e, dims))


def prime_list(base: Sequence[int], needed: int) -> List[int]:
    primes = list(base)
    while len(primes) < needed:
        primes.append(int(sympy.nextprime(primes[-1] if primes else 1)))
    return primes


@dataclass(frozen=True)
class GrassmannianEuler:
    e: Tuple[int, ...]
    value: int
    counts: Dict[int, int] = field(default_factory=dict)
    polynomial: str = ""


def euler_characteristic(
    module_at: Callable[[int], FDModule],
    e: Sequence[int],
    primes: Sequence[int] = DEFAULT_PRIMES,
    budget: int = DEFAULT_SUBMODULE_BUDGET,
) -> GrassmannianEuler:
    """chi(Gr_e(N)) from point counts over GF(p), fitted by a polynomial in q and evaluated at 1.

    `module_at(p)` must return the module over GF(p). The fit uses one more
    point than the degree bound and at least two further points to check it."""
    dims = module_at(primes[0]).dims
    bound = degree_bound(dims, e)
    ps = prime_list(primes, bound + 3)
    counts = {}
    for p in ps:
        N = module_at(p)
        counts[p] = count_submodules(N, e, budget)
        logger.debug(f"|Gr_{tuple(e)}| over GF({p}) = {counts[p]}")
    q = sympy.Symbol("q")
    fit_points = [(p, counts[p]) for p in ps[: bound + 1]]
    poly = sympy.expand(interpolate(fit_points, q)) if len(fit_points) > 1 else sympy.Integer(fit_points[0][1])
    for p in ps[bound + 1 :]:
        if poly.subs(q, p) != counts[p]:
            raise CountingPolynomialError(
                f"Counts of Gr_{tuple(e)} at {sorted(counts)} do not fit a polynomial of degree <= {bound}: {counts}"
            )
    value = poly.subs(q, 1)
    if not value.is_integer:
        raise CountingPolynomialError(f"Counting polynomial {poly} is not integral at q=1")
    return GrassmannianEuler(tuple(e), int(value), counts, str(poly))
