"""The cluster category of an acyclic quiver.

Indecomposable objects are indecomposable modules and shifted projectives SP_i.
Morphism spaces split into a degree 0 part, Hom in the derived category, and a
degree 1 part, Hom into the image under F = tau^-1 [1]:

    Hom_C(M, N)       = Hom(M, N)           + Ext^1(M, tau^-1 N)  (0 if N injective)
    Hom_C(M, SP_j)    = Ext^1(M, P_j)       + 0
    Hom_C(SP_i, N)    = 0                   + (tau^-1 N)_i        (0 if N injective)
    Hom_C(SP_i, SP_j) = (P_j)_i             + 0

Elements are coordinate vectors listing the degree 0 part first.
"""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from clusterlab.combinatorics import (
    InternalConsistencyError,
    Quiver,
    Seed,
    UnresolvedExchange,
    positive_roots,
)
from clusterlab.fdalg import (
    AlgebraIntegrityError,
    FDAlgebra,
    FDModule,
    antisym_form_matrix,
    direct_sum_modules,
    quiver_of,
    simple_module,
)
from clusterlab.fields import QQ, Field, PrimeField, Vector
from clusterlab.repkit import (
    Rep,
    decompose,
    ext1,
    ext_space,
    find_exceptional,
    hom_space,
    identity,
    is_injective,
    is_projective,
    map_from_projective,
    pull_class,
    push_class,
    standard_modules,
    tau,
    tau_inv,
    tau_inv_morphism,
)

logger = logging.getLogger(__name__)

DEFAULT_CAP_DIM = 12
"""Largest total dimension of a module in the pool outside Dynkin type."""

Key = Tuple


class SearchBoundError(UnresolvedExchange):
    """No exchange partner exists in the (dimension-bounded) pool of indecomposables."""


class NotBasicError(ValueError):
    """An object expected to be basic has repeated summands."""


@dataclass(frozen=True, eq=False)
class CInd:
    """An indecomposable of the cluster category: a module, or the shift SP_i of a projective."""

    rep: Optional[Rep] = None
    vertex: Optional[int] = None

    def __post_init__(self):
        if (self.rep is None) == (self.vertex is None):
            raise ValueError("CInd is either a module or a shifted projective")

    @property
    def is_shift(self) -> bool:
        return self.vertex is not None

    @property
    def key(self) -> Key:
        if self.rep is not None:
            return ("M", self.rep.dims)
        return ("P", self.vertex)

    @property
    def label(self) -> str:
        if self.rep is not None:
            return "dim:" + ",".join(map(str, self.rep.dims))
        return f"sp:{self.vertex + 1}"  # type: ignore[operator]

    def __eq__(self, other):
        return isinstance(other, CInd) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return self.label


CObj = Tuple[CInd, ...]
"""A formal direct sum; repeated entries are multiplicities."""

_LABEL_RE = re.compile(r"^\s*(?:dim:\s*(\d+(?:\s*,\s*\d+)*)|sp:\s*(\d+))\s*$")


def parse_label(text: str, n: int) -> Key:
    """Key of an indecomposable written as "dim:1,0" or "sp:2"."""
    match = _LABEL_RE.match(text)
    if not match:
        raise ValueError(f"Cannot parse object {text!r}; expected 'dim:a,b,...' or 'sp:i'")
    if match.group(2) is not None:
        i = int(match.group(2)) - 1
        if not 0 <= i < n:
            raise ValueError(f"Vertex {i + 1} is out of range")
        return ("P", i)
    dims = tuple(int(x) for x in match.group(1).split(","))
    if len(dims) != n:
        raise ValueError(f"Dimension vector {dims} needs {n} entries")
    return ("M", dims)


def render_object(obj: Sequence[CInd]) -> str:
    return " + ".join(x.label for x in obj) if obj else "0"


@dataclass(frozen=True)
class HomC:
    source: CInd
    target: CInd
    deg0: int
    deg1: int

    @property
    def dim(self) -> int:
        return self.deg0 + self.deg1

    def degrees(self) -> Tuple[int, ...]:
        return (0,) * self.deg0 + (1,) * self.deg1


@dataclass(frozen=True)
class Exchange:
    ustar: CInd
    E: CObj
    Eprime: CObj


class ClusterCategory:
    """The cluster category of `quiver` over `field`, with a finite pool of indecomposables."""

    def __init__(
        self,
        quiver: Quiver,
        field: Field = QQ,
        cap_dim: int = DEFAULT_CAP_DIM,
        seed: int = 0,
    ):
        self.quiver = quiver
        self.field = field
        self.cap_dim = cap_dim
        self.seed = seed
        self.finite = quiver.is_dynkin()
        self.std = standard_modules(quiver, field)
        self._homs: Dict[Tuple[Key, Key], HomC] = {}
        self._exchanges: Dict[Tuple[Tuple[Key, ...], Key], CInd] = {}
        self._reductions: Dict[int, ClusterCategory] = {}

    @property
    def n(self) -> int:
        return self.quiver.n

    # The pool

    @cached_property
    def pool(self) -> Tuple[CInd, ...]:
        """Modules (ordered by total dimension) followed by the shifted projectives.

        In Dynkin type these are all indecomposables, knitted from the
        projectives. Otherwise: preprojectives and preinjectives up to the
        dimension cap, plus exceptional modules found for the other real roots."""
        cap = float("inf") if self.finite else self.cap_dim
        modules: Dict[Tuple[int, ...], Rep] = {}
        for i in range(self.n):
            M = self.std.P[i]
            while M.total <= cap:
                modules.setdefault(M.dims, M)
                if is_injective(M):
                    break
                M = tau_inv(M)
        if not self.finite:
            for i in range(self.n):
                M = self.std.I[i]
                while M.total <= cap:
                    modules.setdefault(M.dims, M)
                    if is_projective(M):
                        break
                    M = tau(M)
            rng = random.Random(self.seed)
            for root in positive_roots(self.quiver, self.cap_dim):
                if root not in modules:
                    M = find_exceptional(self.quiver, self.field, root, rng)
                    if M is not None:
                        modules[root] = M
        ordered = sorted(modules.values(), key=lambda M: (M.total, M.dims))
        pool = tuple(CInd(rep=M) for M in ordered) + tuple(CInd(vertex=i) for i in range(self.n))
        logger.info(
            f"Pool of {len(pool)} indecomposables over {self.field!r}"
            + ("" if self.finite else f" (total dimension <= {self.cap_dim})")
        )
        return pool

    @cached_property
    def _by_key(self) -> Dict[Key, CInd]:
        return {x.key: x for x in self.pool}

    def lookup(self, key: Key) -> CInd:
        try:
            return self._by_key[key]
        except KeyError:
            raise LookupError(f"No indecomposable with key {key} in the pool") from None

    def shift(self, i: int) -> CInd:
        return self.lookup(("P", i))

    def module(self, rep: Rep) -> CInd:
        found = self._by_key.get(("M", rep.dims))
        if found is not None:
            return found
        if len(decompose(rep)) != 1:
            raise ValueError(f"Module of dimension {rep.dims} is not indecomposable")
        return CInd(rep=rep)

    def root_object(self) -> CObj:
        return tuple(self.shift(i) for i in range(self.n))

    def projective_object(self) -> CObj:
        return tuple(self.module(P) for P in self.std.P)

    def reduce(self, p: int) -> ClusterCategory:
        """The same category over GF(p), memoized."""
        if p not in self._reductions:
            self._reductions[p] = ClusterCategory(self.quiver, PrimeField(p), self.cap_dim, self.seed)
        return self._reductions[p]

    # The AR translate of C

    def tau_c(self, X: CInd) -> CInd:
        if X.is_shift:
            return self.module(self.std.I[X.vertex])  # type: ignore[index]
        if is_projective(X.rep):  # type: ignore[arg-type]
            return self.shift(self._projective_vertex(X.rep))  # type: ignore[arg-type]
        return self.module(tau(X.rep))  # type: ignore[arg-type]

    def tau_c_inv(self, X: CInd) -> CInd:
        if X.is_shift:
            return self.module(self.std.P[X.vertex])  # type: ignore[index]
        if is_injective(X.rep):  # type: ignore[arg-type]
            return self.shift(self._injective_vertex(X.rep))  # type: ignore[arg-type]
        return self.module(tau_inv(X.rep))  # type: ignore[arg-type]

    def _projective_vertex(self, M: Rep) -> int:
        return next(i for i, P in enumerate(self.std.P) if P.dims == M.dims)

    def _injective_vertex(self, M: Rep) -> int:
        return next(i for i, I in enumerate(self.std.I) if I.dims == M.dims)

    # Morphisms

    def _non_injective(self, X: CInd) -> bool:
        return not X.is_shift and not is_injective(X.rep)  # type: ignore[arg-type]

    def hom(self, X: CInd, Y: CInd) -> HomC:
        key = (X.key, Y.key)
        if key not in self._homs:
            self._homs[key] = HomC(X, Y, self._deg0_dim(X, Y), self._deg1_dim(X, Y))
        return self._homs[key]

    def _deg0_dim(self, X: CInd, Y: CInd) -> int:
        if not X.is_shift and not Y.is_shift:
            return hom_space(X.rep, Y.rep).dim  # type: ignore[arg-type]
        if not X.is_shift:
            return ext_space(X.rep, self.std.P[Y.vertex]).dim  # type: ignore[arg-type,index]
        if Y.is_shift:
            return self.std.P[Y.vertex].dims[X.vertex]  # type: ignore[index]
        return 0

    def _deg1_dim(self, X: CInd, Y: CInd) -> int:
        if not self._non_injective(Y):
            return 0
        T = tau_inv(Y.rep)  # type: ignore[arg-type]
        if X.is_shift:
            return T.dims[X.vertex]  # type: ignore[index]
        return ext_space(X.rep, T).dim  # type: ignore[arg-type]

    def hom_dim(self, X: CInd, Y: CInd) -> int:
        return self.hom(X, Y).dim

    def identity(self, X: CInd) -> Vector:
        if X.is_shift:
            return [self.field.one]
        space = hom_space(X.rep, X.rep)  # type: ignore[arg-type]
        h = self.hom(X, X)
        return space.coordinates(identity(X.rep)) + [self.field.zero] * h.deg1  # type: ignore[arg-type]

    def compose(self, X: CInd, Y: CInd, Z: CInd, f: Sequence, g: Sequence) -> Vector:
        """g after f, for f in Hom_C(X,Y) and g in Hom_C(Y,Z).

        Degree 1 after degree 1 vanishes; the degree 1 part of the result is
        F(g0) f1 + g1 f0."""
        hf, hg, hh = self.hom(X, Y), self.hom(Y, Z), self.hom(X, Z)
        f0, f1 = list(f[: hf.deg0]), list(f[hf.deg0 :])
        g0, g1 = list(g[: hg.deg0]), list(g[hg.deg0 :])
        zero = self.field.zero
        out0 = [zero] * hh.deg0
        out1 = [zero] * hh.deg1
        if hh.deg0 and any(f0) and any(g0):
            out0 = self._compose00(X, Y, Z, f0, g0)
        if hh.deg1 and any(f1) and any(g0):
            out1 = [a + b for a, b in zip(out1, self._compose10(X, Y, Z, f1, g0))]
        if hh.deg1 and any(f0) and any(g1):
            out1 = [a + b for a, b in zip(out1, self._compose01(X, Y, Z, f0, g1))]
        return out0 + out1

    def _compose00(self, X, Y, Z, f0, g0) -> Vector:
        P = self.std.P
        if not X.is_shift and not Y.is_shift and not Z.is_shift:
            F = hom_space(X.rep, Y.rep).combine(f0)
            G = hom_space(Y.rep, Z.rep).combine(g0)
            return hom_space(X.rep, Z.rep).coordinates(G @ F)
        if not X.is_shift and not Y.is_shift:
            F = hom_space(X.rep, Y.rep).combine(f0)
            Pk = P[Z.vertex]
            return pull_class(F, ext_space(Y.rep, Pk), ext_space(X.rep, Pk), g0)
        if not X.is_shift and Z.is_shift:
            G = map_from_projective(P[Z.vertex], Y.vertex, g0)
            return push_class(G, ext_space(X.rep, P[Y.vertex]), ext_space(X.rep, P[Z.vertex]), f0)
        if X.is_shift and Y.is_shift and Z.is_shift:
            G = map_from_projective(P[Z.vertex], Y.vertex, g0)
            return G.comps[X.vertex].apply(f0)
        raise InternalConsistencyError(f"Unexpected degree 0 composition {X} -> {Y} -> {Z}")

    def _compose10(self, X, Y, Z, f1, g0) -> Vector:
        # f1 lands in F(Y) with Y a non-injective module; g0 is then a module map Y -> Z
        G = hom_space(Y.rep, Z.rep).combine(g0)
        TG = tau_inv_morphism(G)
        if X.is_shift:
            return TG.comps[X.vertex].apply(f1)
        return push_class(TG, ext_space(X.rep, TG.source), ext_space(X.rep, TG.target), f1)

    def _compose01(self, X, Y, Z, f0, g1) -> Vector:
        TL = tau_inv(Z.rep)
        if not Y.is_shift:
            F = hom_space(X.rep, Y.rep).combine(f0)
            return pull_class(F, ext_space(Y.rep, TL), ext_space(X.rep, TL), g1)
        G1 = map_from_projective(TL, Y.vertex, g1)
        if X.is_shift:
            return G1.comps[X.vertex].apply(f0)
        return push_class(G1, ext_space(X.rep, self.std.P[Y.vertex]), ext_space(X.rep, TL), f0)

    # Extensions and cluster-tilting objects

    def ext1_c(self, X: CInd, Y: CInd) -> int:
        if X.is_shift and Y.is_shift:
            return 0
        if X.is_shift:
            return Y.rep.dims[X.vertex]  # type: ignore[union-attr,index]
        if Y.is_shift:
            return X.rep.dims[Y.vertex]  # type: ignore[union-attr,index]
        return ext1(X.rep, Y.rep) + ext1(Y.rep, X.rep)  # type: ignore[arg-type]

    def ext1_c_obj(self, A: Sequence[CInd], B: Sequence[CInd]) -> int:
        return sum(self.ext1_c(x, y) for x in A for y in B)

    def hom_dim_obj(self, A: Sequence[CInd], B: Sequence[CInd]) -> int:
        return sum(self.hom_dim(x, y) for x in A for y in B)

    def is_cluster_tilting(self, T: Sequence[CInd]) -> bool:
        if not is_basic(T):
            raise NotBasicError(f"{render_object(T)} is not basic")
        return len(T) == self.n and all(self.ext1_c(x, y) == 0 for x in T for y in T)

    def exchange_partner(self, R: Sequence[CInd], k: int) -> CInd:
        """The other complement of R without R_k."""
        complement = tuple(R[:k]) + tuple(R[k + 1 :])
        cache_key = (tuple(sorted(x.key for x in complement)), R[k].key)
        if cache_key in self._exchanges:
            return self._exchanges[cache_key]
        taken = {x.key for x in R}
        candidates = [
            U
            for U in self.pool
            if U.key not in taken and all(self.ext1_c(U, V) == 0 for V in complement)
        ]
        if not candidates:
            raise SearchBoundError(
                f"No complement of {render_object(complement)} other than {R[k]} in the pool"
            )
        if len(candidates) > 1:
            raise InternalConsistencyError(
                f"Several complements of {render_object(complement)}: {render_object(candidates)}"
            )
        ustar = candidates[0]
        if self.ext1_c(R[k], ustar) != 1:
            raise InternalConsistencyError(
                f"Exchange pair {R[k]}, {ustar} has Ext^1 of dimension {self.ext1_c(R[k], ustar)}"
            )
        self._exchanges[cache_key] = ustar
        return ustar

    def exchange(self, seed: Seed, k: int) -> CInd:
        """Exchange function for seed enumeration."""
        return self.exchange_partner(seed.tilt, k)  # type: ignore[arg-type]

    def exchange_triangle(self, seed: Seed, k: int) -> Exchange:
        """Partner and middle terms, with multiplicities read off column k of the seed's matrix."""
        R = seed.tilt
        if R is None:
            raise ValueError("Seed does not track a cluster-tilting object")
        b = seed.quiver.b
        E = tuple(R[j] for j in range(self.n) if b[j][k] > 0 for _ in range(b[j][k]))
        Eprime = tuple(R[j] for j in range(self.n) if b[j][k] < 0 for _ in range(-b[j][k]))
        return Exchange(self.exchange_partner(R, k), E, Eprime)

    def tilt_at(self, trace: Sequence[int]) -> CObj:
        """The tracked cluster-tilting object reached from the root by mutations."""
        R = self.root_object()
        for k in trace:
            R = R[:k] + (self.exchange_partner(R, k),) + R[k + 1 :]
        return R


def is_basic(obj: Sequence[CInd]) -> bool:
    return len({x.key for x in obj}) == len(obj)


# End_C(T) and the functor Hom_C(T, ?)


@dataclass(frozen=True, eq=False)
class TiltingContext:
    category: ClusterCategory
    T: CObj
    algebra: FDAlgebra
    quiver: Quiver
    """Gabriel quiver of End_C(T)."""
    _reductions: Dict[int, TiltingContext] = field(default_factory=dict, repr=False)

    @property
    def q(self) -> int:
        return len(self.T)

    def ST(self, i: int) -> CInd:
        return self.category.tau_c(self.T[i])

    @cached_property
    def simples(self) -> Tuple[FDModule, ...]:
        return tuple(simple_module(self.algebra, i) for i in range(self.q))

    @cached_property
    def antisym(self) -> List[List[int]]:
        return antisym_form_matrix(self.algebra)

    def reduce(self, p: int) -> TiltingContext:
        """The same tilting object over GF(p), resolved by keys in the reduced category."""
        if p not in self._reductions:
            cat = self.category.reduce(p)
            T = tuple(cat.lookup(x.key) for x in self.T)
            self._reductions[p] = endomorphism_context(cat, T, check=False)
        return self._reductions[p]


def _unit(field: Field, n: int, k: int) -> Vector:
    return [field.one if i == k else field.zero for i in range(n)]


def endomorphism_context(cat: ClusterCategory, T: Sequence[CInd], check: bool = True) -> TiltingContext:
    """Assemble B = End_C(T) from the blocks Hom_C(T_i, T_j).

    A basis element a of Hom_C(T_i,T_j) lies in e_i B e_j; the product a*b is
    the composite b after a."""
    T = tuple(T)
    if not cat.is_cluster_tilting(T):
        raise ValueError(f"{render_object(T)} is not cluster-tilting")
    field = cat.field
    q = len(T)
    blocks: List[Tuple[int, int]] = []
    labels: List[str] = []
    start: Dict[Tuple[int, int], int] = {}
    for i in range(q):
        for j in range(q):
            start[(i, j)] = len(blocks)
            for r in range(cat.hom_dim(T[i], T[j])):
                blocks.append((i, j))
                labels.append(f"T{i + 1}->T{j + 1}#{r + 1}")
    units = []
    for i in range(q):
        ident = cat.identity(T[i])
        nonzero = [k for k, c in enumerate(ident) if c]
        if len(nonzero) != 1 or ident[nonzero[0]] != field.one:
            raise AlgebraIntegrityError(f"The identity of T{i + 1} is not a basis element")
        units.append(start[(i, i)] + nonzero[0])
    mult = {}
    for i in range(q):
        for j in range(q):
            dij = cat.hom_dim(T[i], T[j])
            for l in range(q):
                djl = cat.hom_dim(T[j], T[l])
                for r in range(dij):
                    for s in range(djl):
                        prod = cat.compose(T[i], T[j], T[l], _unit(field, dij, r), _unit(field, djl, s))
                        entry = tuple((start[(i, l)] + c, x) for c, x in enumerate(prod) if x)
                        if entry:
                            mult[(start[(i, j)] + r, start[(j, l)] + s)] = entry
    algebra = FDAlgebra(field, q, tuple(blocks), mult, tuple(units), tuple(labels))
    if check:
        algebra.check_idempotents()
        algebra.check_associativity()
    return TiltingContext(cat, T, algebra, quiver_of(algebra))


def F_module(ctx: TiltingContext, M: Sequence[CInd]) -> FDModule:
    """Hom_C(T, M) as a B-module: a in e_i B e_j sends phi in Hom_C(T_j,M) to phi after a."""
    A = ctx.algebra
    if not M:
        return FDModule(A, (0,) * ctx.q, tuple(A.field.zero_matrix(0, 0) for _ in range(A.dim)))
    return direct_sum_modules([_F_indecomposable(ctx, X) for X in M])


def _F_indecomposable(ctx: TiltingContext, X: CInd) -> FDModule:
    cat, A, T = ctx.category, ctx.algebra, ctx.T
    field = A.field
    dims = tuple(cat.hom_dim(T[i], X) for i in range(ctx.q))
    actions = []
    for b, (i, j) in enumerate(A.blocks):
        a = _unit(field, cat.hom_dim(T[i], T[j]), A.basis_in(i, j).index(b))
        cols = [
            cat.compose(T[i], T[j], X, a, _unit(field, dims[j], s)) for s in range(dims[j])
        ]
        actions.append(field.from_columns(cols, dims[i]))
    return FDModule(A, dims, tuple(actions))


def dim_hom_vector(ctx: TiltingContext, M: Sequence[CInd]) -> Tuple[int, ...]:
    return tuple(sum(ctx.category.hom_dim(Ti, X) for X in M) for Ti in ctx.T)


def m_multiplicity(ctx: TiltingContext, M: Sequence[CInd], i: int) -> int:
    """Multiplicity of ST_i as a summand of M."""
    key = ctx.ST(i).key
    return sum(1 for X in M if X.key == key)


def h_vector(ctx: TiltingContext, M: Sequence[CInd]) -> Tuple[int, ...]:
    """h_i(M) = dim Hom_C(T_i, M) - m_i(M)."""
    d = dim_hom_vector(ctx, M)
    return tuple(d[i] - m_multiplicity(ctx, M, i) for i in range(ctx.q))


def context_for(cat: ClusterCategory, R: Sequence[CInd]) -> TiltingContext:
    """Context for the tracked object R of a seed: T = tau_C^-1 R, so that ST_i = R_i."""
    return endomorphism_context(cat, [cat.tau_c_inv(x) for x in R])
