"""Representations of acyclic quivers: Hom and Ext spaces, AR translates, decomposition."""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import sympy

from clusterlab.combinatorics import Quiver
from clusterlab.fields import Field, Matrix, Quotient, Vector, field_from_tag

logger = logging.getLogger(__name__)

RANDOM_CANDIDATES = 64
"""Random endomorphisms tried when looking for a splitting or an isomorphism."""


class QuiverMismatch(ValueError):
    """Representations over different quivers or fields were combined."""


class TauDomainError(ValueError):
    """The AR translate was asked for a module with a projective (or injective) summand."""

    def __init__(self, kind: str, summand: Rep):
        super().__init__(f"Module has an {kind} summand with dimension vector {summand.dims}")
        self.kind = kind
        self.summand = summand


# Paths


@dataclass(frozen=True, order=True)
class Path:
    """A path in an acyclic quiver: arrows (indices into `arrow_list`) from start to end."""

    start: int
    end: int
    arrows: Tuple[int, ...]

    def __len__(self):
        return len(self.arrows)

    def then(self, other: Path) -> Path:
        if self.end != other.start:
            raise ValueError("Paths do not compose")
        return Path(self.start, other.end, self.arrows + other.arrows)


@lru_cache(maxsize=None)
def arrow_list(q: Quiver) -> Tuple[Tuple[int, int], ...]:
    """Arrows of q with multiplicities expanded, as (source, target) pairs."""
    return tuple((i, j) for i, j, m in q.arrows() for _ in range(m))


@lru_cache(maxsize=None)
def _all_paths(q: Quiver) -> Tuple[Path, ...]:
    arrows = arrow_list(q)
    out = [Path(v, v, ()) for v in range(q.n)]
    frontier = list(out)
    while frontier:
        grown = []
        for p in frontier:
            for a, (s, t) in enumerate(arrows):
                if s == p.end:
                    grown.append(Path(p.start, t, p.arrows + (a,)))
        out.extend(grown)
        frontier = grown
    return tuple(sorted(out, key=lambda p: (len(p), p.start, p.end, p.arrows)))


@lru_cache(maxsize=None)
def paths_between(q: Quiver, i: int, j: int) -> Tuple[Path, ...]:
    return tuple(p for p in _all_paths(q) if p.start == i and p.end == j)


def path_count(q: Quiver) -> int:
    """Dimension of the path algebra."""
    return len(_all_paths(q))


# Representations


@dataclass(frozen=True)
class Rep:
    quiver: Quiver
    field: Field
    dims: Tuple[int, ...]
    maps: Tuple[Matrix, ...]
    """One dims[t] x dims[s] matrix per arrow of `arrow_list(quiver)`."""

    def __post_init__(self):
        arrows = arrow_list(self.quiver)
        if len(self.dims) != self.quiver.n or any(d < 0 for d in self.dims):
            raise ValueError(f"Bad dimension vector {self.dims}")
        if len(self.maps) != len(arrows):
            raise ValueError("One matrix per arrow is required")
        for (s, t), m in zip(arrows, self.maps):
            if m.shape != (self.dims[t], self.dims[s]):
                raise ValueError(
                    f"Arrow {s + 1}->{t + 1} needs a {self.dims[t]}x{self.dims[s]} matrix, got {m.shape}"
                )

    @property
    def total(self) -> int:
        return sum(self.dims)

    @property
    def is_zero(self) -> bool:
        return self.total == 0

    def path_map(self, p: Path) -> Matrix:
        m = self.field.identity_matrix(self.dims[p.start])
        for a in p.arrows:
            m = self.maps[a] @ m
        return m

    def over(self, field: Field) -> Rep:
        """The same representation with entries reinterpreted in another field."""
        return Rep(
            self.quiver,
            field,
            self.dims,
            tuple(field.matrix(m.rows, m.ncols) for m in self.maps),
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            "field": self.field.tag,
            "dims": list(self.dims),
            "maps": [[[self.field.to_json(x) for x in row] for row in m.rows] for m in self.maps],
        }

    @classmethod
    def from_json(cls, quiver: Quiver, data: Dict[str, Any]) -> Rep:
        field = field_from_tag(data["field"])
        dims = tuple(data["dims"])
        maps = tuple(
            field.matrix([[_parse_scalar(x) for x in row] for row in m], dims[s])
            for (s, t), m in zip(arrow_list(quiver), data["maps"])
        )
        return cls(quiver, field, dims, maps)

    def __repr__(self):
        return f"Rep(dims={self.dims}, field={self.field!r})"


def _parse_scalar(x) -> sympy.Rational:
    return sympy.Rational(x) if isinstance(x, str) else sympy.Integer(int(x))


def zero_rep(q: Quiver, field: Field) -> Rep:
    return Rep(q, field, (0,) * q.n, tuple(field.zero_matrix(0, 0) for _ in arrow_list(q)))


def direct_sum(reps: Sequence[Rep]) -> Rep:
    if not reps:
        raise ValueError("direct_sum needs at least one summand")
    _check_compatible(*reps)
    first = reps[0]
    dims = tuple(sum(r.dims[v] for r in reps) for v in range(first.quiver.n))
    maps = tuple(
        first.field.block_diagonal([r.maps[a] for r in reps])
        for a in range(len(arrow_list(first.quiver)))
    )
    return Rep(first.quiver, first.field, dims, maps)


def _check_compatible(*reps: Rep):
    first = reps[0]
    for r in reps[1:]:
        if r.quiver != first.quiver:
            raise QuiverMismatch("Representations of different quivers")
        if r.field != first.field:
            raise QuiverMismatch(f"Representations over {first.field!r} and {r.field!r}")


@lru_cache(maxsize=None)
def simple(q: Quiver, field: Field, i: int) -> Rep:
    dims = tuple(int(v == i) for v in range(q.n))
    return Rep(q, field, dims, tuple(field.zero_matrix(dims[t], dims[s]) for s, t in arrow_list(q)))


@lru_cache(maxsize=None)
def projective(q: Quiver, field: Field, i: int) -> Rep:
    """P_i: at v, the paths i ~> v; arrows act by appending."""
    basis = [paths_between(q, i, v) for v in range(q.n)]
    index = [{p: k for k, p in enumerate(b)} for b in basis]
    maps = []
    for a, (s, t) in enumerate(arrow_list(q)):
        rows = [[0] * len(basis[s]) for _ in basis[t]]
        for k, p in enumerate(basis[s]):
            rows[index[t][Path(i, t, p.arrows + (a,))]][k] = 1
        maps.append(field.matrix(rows, len(basis[s])))
    return Rep(q, field, tuple(len(b) for b in basis), tuple(maps))


@lru_cache(maxsize=None)
def injective(q: Quiver, field: Field, i: int) -> Rep:
    """I_i: at v, the paths v ~> i; an arrow a strips a leading a and kills other paths."""
    basis = [paths_between(q, v, i) for v in range(q.n)]
    index = [{p: k for k, p in enumerate(b)} for b in basis]
    maps = []
    for a, (s, t) in enumerate(arrow_list(q)):
        rows = [[0] * len(basis[s]) for _ in basis[t]]
        for k, p in enumerate(basis[s]):
            if p.arrows and p.arrows[0] == a:
                rows[index[t][Path(t, i, p.arrows[1:])]][k] = 1
        maps.append(field.matrix(rows, len(basis[s])))
    return Rep(q, field, tuple(len(b) for b in basis), tuple(maps))


@dataclass(frozen=True)
class StandardModules:
    P: Tuple[Rep, ...]
    I: Tuple[Rep, ...]
    S: Tuple[Rep, ...]


def standard_modules(q: Quiver, field: Field) -> StandardModules:
    return StandardModules(
        tuple(projective(q, field, i) for i in range(q.n)),
        tuple(injective(q, field, i) for i in range(q.n)),
        tuple(simple(q, field, i) for i in range(q.n)),
    )


# Morphisms


@dataclass(frozen=True)
class Morphism:
    source: Rep
    target: Rep
    comps: Tuple[Matrix, ...]
    """One target.dims[v] x source.dims[v] matrix per vertex."""

    def __matmul__(self, other: Morphism) -> Morphism:
        """Composition self after other."""
        if other.target.dims != self.source.dims:
            raise ValueError("Morphisms do not compose")
        return Morphism(
            other.source, self.target, tuple(f @ g for f, g in zip(self.comps, other.comps))
        )

    def __add__(self, other: Morphism) -> Morphism:
        return Morphism(
            self.source, self.target, tuple(f + g for f, g in zip(self.comps, other.comps))
        )

    def scale(self, c) -> Morphism:
        return Morphism(self.source, self.target, tuple(f.scale(c) for f in self.comps))

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.comps)

    def is_iso(self) -> bool:
        field = self.source.field
        return self.source.dims == self.target.dims and all(
            field.is_invertible(f) for f in self.comps
        )

    def flat(self) -> Vector:
        return [x for f in self.comps for x in f.flat()]

    def is_morphism(self) -> bool:
        return all(
            (self.target.maps[a] @ self.comps[s] - self.comps[t] @ self.source.maps[a]).is_zero()
            for a, (s, t) in enumerate(arrow_list(self.source.quiver))
        )


def identity(M: Rep) -> Morphism:
    return Morphism(M, M, tuple(M.field.identity_matrix(d) for d in M.dims))


def zero_morphism(M: Rep, N: Rep) -> Morphism:
    return Morphism(M, N, tuple(M.field.zero_matrix(n, m) for m, n in zip(M.dims, N.dims)))


def projective_map(q: Quiver, field: Field, c: Path) -> Morphism:
    """P_j -> P_k given by a path c: k ~> j, sending p to c followed by p."""
    k, j = c.start, c.end
    src, dst = projective(q, field, j), projective(q, field, k)
    comps = []
    for v in range(q.n):
        src_basis = paths_between(q, j, v)
        dst_index = {p: r for r, p in enumerate(paths_between(q, k, v))}
        rows = [[0] * len(src_basis) for _ in dst_index]
        for col, p in enumerate(src_basis):
            rows[dst_index[c.then(p)]][col] = 1
        comps.append(field.matrix(rows, len(src_basis)))
    return Morphism(src, dst, tuple(comps))


def map_from_projective(X: Rep, j: int, v: Sequence) -> Morphism:
    """P_j -> X determined by v in X_j: a path p goes to X_p v."""
    q, field = X.quiver, X.field
    src = projective(q, field, j)
    comps = []
    for w in range(q.n):
        cols = [X.path_map(p).apply(v) for p in paths_between(q, j, w)]
        comps.append(field.from_columns(cols, X.dims[w]))
    return Morphism(src, X, tuple(comps))


def injective_map(q: Quiver, field: Field, c: Path) -> Morphism:
    """I_j -> I_i given by a path c: i ~> j, stripping the suffix c where present."""
    i, j = c.start, c.end
    src, dst = injective(q, field, j), injective(q, field, i)
    comps = []
    for v in range(q.n):
        src_basis = paths_between(q, v, j)
        dst_index = {p: r for r, p in enumerate(paths_between(q, v, i))}
        rows = [[0] * len(src_basis) for _ in dst_index]
        for col, p in enumerate(src_basis):
            if len(p) >= len(c) and p.arrows[len(p) - len(c) :] == c.arrows:
                head = Path(v, i, p.arrows[: len(p) - len(c)])
                if head in dst_index:
                    rows[dst_index[head]][col] = 1
        comps.append(field.matrix(rows, len(src_basis)))
    return Morphism(src, dst, tuple(comps))


# Hom and Ext


def _hom_offsets(M: Rep, N: Rep) -> List[int]:
    return list(itertools.accumulate((N.dims[v] * M.dims[v] for v in range(M.quiver.n)), initial=0))


def _ext_offsets(M: Rep, N: Rep) -> List[int]:
    return list(
        itertools.accumulate(
            (N.dims[t] * M.dims[s] for s, t in arrow_list(M.quiver)), initial=0
        )
    )


@lru_cache(maxsize=None)
def _delta(M: Rep, N: Rep) -> Tuple[Tuple[Any, ...], ...]:
    """Rows of the map (phi_v) -> (N_a phi_s - phi_t M_a) from vertex Homs to arrow Homs."""
    field = M.field
    h_off = _hom_offsets(M, N)
    ncols = h_off[-1]
    rows = []
    for a, (s, t) in enumerate(arrow_list(M.quiver)):
        Na, Ma = N.maps[a], M.maps[a]
        for r in range(N.dims[t]):
            for c in range(M.dims[s]):
                row = [field.zero] * ncols
                for k in range(N.dims[s]):
                    row[h_off[s] + k * M.dims[s] + c] += Na.rows[r][k]
                for k in range(M.dims[t]):
                    row[h_off[t] + r * M.dims[t] + k] -= Ma.rows[k][c]
                rows.append(tuple(row))
    return tuple(rows)


@dataclass(frozen=True)
class HomSpace:
    source: Rep
    target: Rep
    basis: Tuple[Morphism, ...]
    free: Tuple[int, ...]
    """Flat positions whose entries are the coordinates of an element."""

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinates(self, f: Morphism) -> Vector:
        flat = f.flat()
        return [flat[k] for k in self.free]

    def combine(self, coords: Sequence) -> Morphism:
        out = zero_morphism(self.source, self.target)
        for c, b in zip(coords, self.basis):
            if c:
                out = out + b.scale(c)
        return out


def _unflatten(M: Rep, N: Rep, flat: Sequence) -> Morphism:
    field = M.field
    off = _hom_offsets(M, N)
    return Morphism(
        M,
        N,
        tuple(
            field.from_flat(flat[off[v] : off[v + 1]], N.dims[v], M.dims[v])
            for v in range(M.quiver.n)
        ),
    )


@lru_cache(maxsize=None)
def hom_space(M: Rep, N: Rep) -> HomSpace:
    """Hom(M,N) as the solution space of the intertwiner equations."""
    _check_compatible(M, N)
    ncols = _hom_offsets(M, N)[-1]
    basis, free = M.field.kernel_basis(_delta(M, N), ncols)
    return HomSpace(M, N, tuple(_unflatten(M, N, b) for b in basis), tuple(free))


def hom_dim(M: Rep, N: Rep) -> int:
    return hom_space(M, N).dim


@dataclass(frozen=True)
class ExtSpace:
    """Ext^1(M,N) as arrow cocycles (psi_a: M_s -> N_t) modulo the image of the intertwiner map.

    This is Hom(-,N) applied to the standard projective resolution of M."""

    source: Rep
    target: Rep
    quotient: Quotient

    @property
    def dim(self) -> int:
        return self.quotient.dim

    def blocks(self, coords: Sequence) -> List[Matrix]:
        """Cocycle representing the class with the given coordinates."""
        flat = self.quotient.lift(coords)
        off = _ext_offsets(self.source, self.target)
        field = self.source.field
        return [
            field.from_flat(flat[off[a] : off[a + 1]], self.target.dims[t], self.source.dims[s])
            for a, (s, t) in enumerate(arrow_list(self.source.quiver))
        ]

    def class_of(self, blocks: Sequence[Matrix]) -> Vector:
        return self.quotient.coordinates([x for b in blocks for x in b.flat()])


@lru_cache(maxsize=None)
def ext_space(M: Rep, N: Rep) -> ExtSpace:
    _check_compatible(M, N)
    field = M.field
    rows = _delta(M, N)
    ambient = _ext_offsets(M, N)[-1]
    ncols = _hom_offsets(M, N)[-1]
    image = [[row[j] for row in rows] for j in range(ncols)]
    return ExtSpace(M, N, field.quotient(image, ambient))


def ext1(M: Rep, N: Rep) -> int:
    return ext_space(M, N).dim


def push_class(g: Morphism, src: ExtSpace, dst: ExtSpace, coords: Sequence) -> Vector:
    """Image of one class of Ext^1(M,N) in Ext^1(M,N') under g: N -> N'."""
    blocks = src.blocks(coords)
    return dst.class_of(
        [g.comps[t] @ b for b, (s, t) in zip(blocks, arrow_list(src.source.quiver))]
    )


def pull_class(f: Morphism, src: ExtSpace, dst: ExtSpace, coords: Sequence) -> Vector:
    """Image of one class of Ext^1(M,N) in Ext^1(M',N) under f: M' -> M."""
    blocks = src.blocks(coords)
    return dst.class_of(
        [b @ f.comps[s] for b, (s, t) in zip(blocks, arrow_list(src.source.quiver))]
    )


def ext_pushforward(g: Morphism, src: ExtSpace, dst: ExtSpace) -> Matrix:
    """Matrix of Ext^1(M,g): Ext^1(M,N) -> Ext^1(M,N') in the chosen bases."""
    field = src.source.field
    cols = [push_class(g, src, dst, _unit(field, src.dim, k)) for k in range(src.dim)]
    return field.from_columns(cols, dst.dim)


def ext_pullback(f: Morphism, src: ExtSpace, dst: ExtSpace) -> Matrix:
    """Matrix of Ext^1(f,N): Ext^1(M,N) -> Ext^1(M',N) for f: M' -> M."""
    field = src.source.field
    cols = [pull_class(f, src, dst, _unit(field, src.dim, k)) for k in range(src.dim)]
    return field.from_columns(cols, dst.dim)


def _unit(field: Field, n: int, k: int) -> Vector:
    return [field.one if i == k else field.zero for i in range(n)]


# Projectivity, rigidity and the AR translates


def is_projective(M: Rep) -> bool:
    return all(ext1(M, projective(M.quiver, M.field, i)) == 0 for i in range(M.quiver.n))


def is_injective(M: Rep) -> bool:
    return all(ext1(injective(M.quiver, M.field, i), M) == 0 for i in range(M.quiver.n))


def is_rigid(M: Rep) -> bool:
    return ext1(M, M) == 0


def is_brick(M: Rep) -> bool:
    """End(M) is the ground field."""
    return hom_dim(M, M) == 1


def _glue(parts: Sequence[Morphism], target: Rep) -> Morphism:
    """The morphism from the direct sum of the sources of `parts` into their common target."""
    field = target.field
    source = direct_sum([f.source for f in parts])
    comps = []
    for w in range(target.quiver.n):
        cols = [f.comps[w].column(j) for f in parts for j in range(f.comps[w].ncols)]
        comps.append(field.from_columns(cols, target.dims[w]))
    return Morphism(source, target, tuple(comps))


def top_generators(M: Rep) -> List[Tuple[int, Vector]]:
    """Vectors at each vertex whose classes form a basis of M / rad M."""
    q, field = M.quiver, M.field
    gens = []
    for v in range(q.n):
        rad = [
            M.maps[a].column(c)
            for a, (s, t) in enumerate(arrow_list(q))
            if t == v
            for c in range(M.dims[s])
        ]
        top = field.quotient(rad, M.dims[v])
        gens.extend((v, top.lift(_unit(field, top.dim, k))) for k in range(top.dim))
    return gens


def projective_cover(M: Rep) -> Morphism:
    """P_0 -> M, one indecomposable projective per top generator."""
    gens = top_generators(M)
    if not gens:
        return zero_morphism(zero_rep(M.quiver, M.field), M)
    return _glue([map_from_projective(M, v, g) for v, g in gens], M)


def projective_presentation(M: Rep) -> Tuple[Morphism, Morphism]:
    """The minimal presentation P_1 -> P_0 -> M -> 0 as (P_1 -> P_0, P_0 -> M).

    P_1 -> P_0 is injective, path algebras being hereditary."""
    field = M.field
    cover = projective_cover(M)
    P0 = cover.source
    basis = [field.kernel_basis(cover.comps[w].rows, P0.dims[w])[0] for w in range(M.quiver.n)]
    K = subrep(P0, basis)
    inclusion = Morphism(
        K, P0, tuple(field.from_columns(b, P0.dims[w]) for w, b in enumerate(basis))
    )
    return inclusion @ projective_cover(K), cover


def _nakayama_spaces(P: Rep) -> List[HomSpace]:
    return [hom_space(P, projective(P.quiver, P.field, k)) for k in range(P.quiver.n)]


@lru_cache(maxsize=None)
def nakayama(P: Rep) -> Rep:
    """nu P = D Hom(P, kQ): at k the dual of Hom(P, P_k); nu P_i is I_i."""
    q, field = P.quiver, P.field
    spaces = _nakayama_spaces(P)
    maps = []
    for a, (s, t) in enumerate(arrow_list(q)):
        g = projective_map(q, field, Path(s, t, (a,)))
        cols = [spaces[s].coordinates(g @ h) for h in spaces[t].basis]
        maps.append(field.from_columns(cols, spaces[s].dim).transpose())
    return Rep(q, field, tuple(sp.dim for sp in spaces), tuple(maps))


def nakayama_morphism(f: Morphism) -> Morphism:
    """nu f: nu P -> nu P' for f: P -> P' between projectives."""
    field = f.source.field
    src, dst = _nakayama_spaces(f.source), _nakayama_spaces(f.target)
    comps = []
    for k in range(f.source.quiver.n):
        cols = [src[k].coordinates(h @ f) for h in dst[k].basis]
        comps.append(field.from_columns(cols, src[k].dim).transpose())
    return Morphism(nakayama(f.source), nakayama(f.target), tuple(comps))


@lru_cache(maxsize=None)
def tau_inv(M: Rep) -> Rep:
    """tau^-1 M, with (tau^-1 M)_v = Ext^1(I_v, M)."""
    q, field = M.quiver, M.field
    for summand in decompose(M):
        if is_injective(summand):
            raise TauDomainError("injective", summand)
    spaces = [ext_space(injective(q, field, v), M) for v in range(q.n)]
    maps = []
    for a, (s, t) in enumerate(arrow_list(q)):
        a_path = Path(s, t, (a,))
        maps.append(ext_pullback(injective_map(q, field, a_path), spaces[s], spaces[t]))
    return Rep(q, field, tuple(sp.dim for sp in spaces), tuple(maps))


def tau_inv_morphism(g: Morphism) -> Morphism:
    """tau^-1 on a morphism between modules without injective summands."""
    q, field = g.source.quiver, g.source.field
    src, dst = tau_inv(g.source), tau_inv(g.target)
    comps = []
    for v in range(q.n):
        I = injective(q, field, v)
        comps.append(ext_pushforward(g, ext_space(I, g.source), ext_space(I, g.target)))
    return Morphism(src, dst, tuple(comps))


@lru_cache(maxsize=None)
def tau(M: Rep) -> Rep:
    """tau M = ker(nu P_1 -> nu P_0) for the minimal projective presentation of M."""
    q, field = M.quiver, M.field
    for summand in decompose(M):
        if is_projective(summand):
            raise TauDomainError("projective", summand)
    presentation, _ = projective_presentation(M)
    nu = nakayama_morphism(presentation)
    basis = [
        field.kernel_basis(nu.comps[k].rows, nu.source.dims[k])[0] for k in range(q.n)
    ]
    return subrep(nu.source, basis)


# Decomposition and isomorphism


def _candidates(space: HomSpace, rng: random.Random) -> Iterator[Morphism]:
    yield from space.basis
    for f, g in itertools.combinations(space.basis, 2):
        yield f + g
    field = space.source.field
    for _ in range(RANDOM_CANDIDATES):
        yield space.combine([field.random_element(rng) for _ in range(space.dim)])


def _irreducible_factors(field: Field, m: Matrix) -> List[List[Any]]:
    """Distinct irreducible factors of the characteristic polynomial, as coefficient lists."""
    x = sympy.Symbol("x")
    coeffs = field.charpoly(m)
    if field.is_finite:
        poly = sympy.Poly([int(c) for c in coeffs], x, modulus=field.p)  # type: ignore[attr-defined]
    else:
        rationals = [sympy.Rational(int(c.numerator), int(c.denominator)) for c in coeffs]
        poly = sympy.Poly(rationals, x, domain=sympy.QQ)
    _, factors = poly.factor_list()
    return [[field(c) for c in f.all_coeffs()] for f, _ in factors]


def _evaluate(field: Field, coeffs: Sequence, m: Matrix) -> Matrix:
    out = field.zero_matrix(m.nrows, m.ncols)
    eye = field.identity_matrix(m.nrows)
    for c in coeffs:
        out = out @ m + eye.scale(c)
    return out


def _power(m: Matrix, k: int) -> Matrix:
    out = m.field.identity_matrix(m.nrows)
    for _ in range(k):
        out = out @ m
    return out


def subrep(M: Rep, basis: Sequence[Sequence[Vector]]) -> Rep:
    """The subrepresentation spanned at each vertex by the given independent vectors."""
    field = M.field
    maps = []
    for a, (s, t) in enumerate(arrow_list(M.quiver)):
        cols = []
        for u in basis[s]:
            coords = field.find_coordinates(basis[t], M.maps[a].apply(u))
            if coords is None:
                raise ValueError("Subspaces are not stable under the arrow maps")
            cols.append(coords)
        maps.append(field.from_columns(cols, len(basis[t])))
    return Rep(M.quiver, field, tuple(len(b) for b in basis), tuple(maps))


def _fitting_split(M: Rep, phi: Morphism) -> Optional[Tuple[Rep, Rep]]:
    field = M.field
    factors = _irreducible_factors(field, field.block_diagonal(phi.comps))
    if len(factors) < 2:
        return None
    first, rest = factors[0], factors[1:]
    parts = []
    for group in ([first], rest):
        basis = []
        for v, f in enumerate(phi.comps):
            m = field.identity_matrix(M.dims[v])
            for coeffs in group:
                m = m @ _evaluate(field, coeffs, f)
            basis.append(field.kernel_basis(_power(m, M.dims[v]).rows, M.dims[v])[0])
        parts.append(subrep(M, basis))
    return parts[0], parts[1]


def _sort_key(M: Rep):
    return (M.dims, tuple(tuple(str(x) for x in m.flat()) for m in M.maps))


@lru_cache(maxsize=None)
def decompose(M: Rep) -> Tuple[Rep, ...]:
    """Indecomposable summands (Krull-Schmidt), found by splitting along the
    generalized eigenspaces of endomorphisms."""
    if M.is_zero:
        return ()
    end = hom_space(M, M)
    if end.dim > 1:
        rng = random.Random(0)
        for phi in _candidates(end, rng):
            split = _fitting_split(M, phi)
            if split is not None:
                return tuple(sorted(decompose(split[0]) + decompose(split[1]), key=_sort_key))
    return (M,)


def is_indecomposable(M: Rep) -> bool:
    return len(decompose(M)) == 1


def find_isomorphism(M: Rep, N: Rep) -> Optional[Morphism]:
    if M.dims != N.dims:
        return None
    space = hom_space(M, N)
    if M.is_zero:
        return zero_morphism(M, N)
    for f in _candidates(space, random.Random(0)):
        if f.is_iso():
            return f
    return None


def is_isomorphic(M: Rep, N: Rep) -> bool:
    return find_isomorphism(M, N) is not None


def random_rep(q: Quiver, field: Field, dims: Sequence[int], rng: random.Random, bound: int = 2) -> Rep:
    maps = tuple(
        field.matrix(
            [[field.random_element(rng, bound) for _ in range(dims[s])] for _ in range(dims[t])],
            dims[s],
        )
        for s, t in arrow_list(q)
    )
    return Rep(q, field, tuple(dims), maps)


def find_exceptional(
    q: Quiver, field: Field, dims: Sequence[int], rng: random.Random, tries: int = 32
) -> Optional[Rep]:
    """Search for a rigid brick of the given dimension vector among random representations."""
    for _ in range(tries):
        M = random_rep(q, field, dims, rng)
        if is_brick(M) and is_rigid(M):
            return M
    logger.debug(f"No exceptional representation of dimension {tuple(dims)} found in {tries} tries")
    return None
