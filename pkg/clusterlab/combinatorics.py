"""Quivers, matrix mutation, seeds, and exchange-graph enumeration."""

from __future__ import annotations

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

import sympy

from clusterlab.laurent import DivisibilityError, LaurentPoly, exact_div, product, render

logger = logging.getLogger(__name__)

SeedKey = Tuple[str, ...]

DEFAULT_MAX_SEEDS = 20_000
"""Default seed budget for a single enumeration."""


class QuiverParseError(ValueError):
    """A quiver file could not be parsed."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class InternalConsistencyError(RuntimeError):
    """Raised when an identity guaranteed by the theory fails, signalling a bug."""


class UnresolvedExchange(LookupError):
    """The exchange partner of a tracked object could not be determined."""


class EnumerationBudgetExceeded(RuntimeError):
    """The frontier outgrew the seed budget; `partial` holds what was found so far."""

    def __init__(self, budget: int, partial: Registry):
        super().__init__(f"Seed budget of {budget} exceeded")
        self.budget = budget
        self.partial = partial


@dataclass(frozen=True)
class Quiver:
    """A quiver without loops or 2-cycles, stored as its skew-symmetric exchange matrix.

    b[i][j] is the number of arrows i -> j minus the number of arrows j -> i."""

    b: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.b)
        for i, row in enumerate(self.b):
            if len(row) != n:
                raise ValueError("Exchange matrix must be square")
            if row[i]:
                raise ValueError(f"Loop at vertex {i + 1}")
            for j in range(n):
                if row[j] != -self.b[j][i]:
                    raise ValueError(f"Exchange matrix is not skew-symmetric at ({i + 1},{j + 1})")

    @property
    def n(self) -> int:
        return len(self.b)

    @classmethod
    def from_arrows(cls, n: int, arrows: Iterable[Tuple[int, int, int]]) -> Quiver:
        """Build from 0-indexed (source, target, multiplicity) triples."""
        b = [[0] * n for _ in range(n)]
        for i, j, m in arrows:
            if i == j:
                raise ValueError(f"Loop at vertex {i + 1}")
            b[i][j] += m
            b[j][i] -= m
        return cls(tuple(tuple(row) for row in b))

    def arrows(self) -> List[Tuple[int, int, int]]:
        """0-indexed (source, target, multiplicity) triples, sorted."""
        return [
            (i, j, self.b[i][j])
            for i in range(self.n)
            for j in range(self.n)
            if self.b[i][j] > 0
        ]

    def arrow_count(self, i: int, j: int) -> int:
        return max(self.b[i][j], 0)

    def is_acyclic(self) -> bool:
        indegree = [sum(1 for i in range(self.n) if self.b[i][j] > 0) for j in range(self.n)]
        ready = [v for v in range(self.n) if indegree[v] == 0]
        seen = 0
        while ready:
            v = ready.pop()
            seen += 1
            for w in range(self.n):
                if self.b[v][w] > 0:
                    indegree[w] -= 1
                    if indegree[w] == 0:
                        ready.append(w)
        return seen == self.n

    def topological_order(self) -> List[int]:
        order: List[int] = []
        remaining = set(range(self.n))
        while remaining:
            sources = sorted(
                v for v in remaining if not any(self.b[u][v] > 0 for u in remaining)
            )
            if not sources:
                raise ValueError("Quiver has an oriented cycle")
            order.extend(sources)
            remaining -= set(sources)
        return order

    def mutate(self, k: int) -> Quiver:
        return mutate_quiver(self, k)

    def cartan(self) -> List[List[int]]:
        """Symmetrized Cartan matrix 2I - |b| of the underlying graph."""
        return [
            [2 if i == j else -abs(self.b[i][j]) for j in range(self.n)] for i in range(self.n)
        ]

    def is_dynkin(self) -> bool:
        """Whether the underlying graph is a disjoint union of ADE diagrams,
        i.e. the symmetrized Tits form is positive definite."""
        return bool(sympy.Matrix(self.cartan()).is_positive_definite)

    def euler_form(self, a: Sequence[int], c: Sequence[int]) -> int:
        """The hereditary Euler form <a,c> = sum a_i c_i - sum over arrows i->j of a_i c_j."""
        return sum(x * y for x, y in zip(a, c)) - sum(
            m * a[i] * c[j] for i, j, m in self.arrows()
        )

    def to_text(self) -> str:
        lines = []
        for i, j, m in self.arrows():
            lines.append(f"{i + 1} -> {j + 1}" + (f" *{m}" if m > 1 else ""))
        return "\n".join(lines) + "\n"


_ARROW_RE = re.compile(r"^\s*(\d+)\s*->\s*(\d+)\s*(?:\*\s*(\d+))?\s*$")


def parse_quiver(text: str) -> Quiver:
    """Parse the quiver text format: one arrow per line, "i -> j" or "i -> j *m", 1-indexed.

    Blank lines and "#" comments are ignored. The vertex count is the largest
    index mentioned."""
    arrows = []
    n = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _ARROW_RE.match(line)
        if not match:
            raise QuiverParseError(lineno, f"expected 'i -> j' or 'i -> j *m', got {raw.strip()!r}")
        i, j = int(match.group(1)), int(match.group(2))
        m = int(match.group(3) or 1)
        if i < 1 or j < 1:
            raise QuiverParseError(lineno, "vertices are numbered from 1")
        if i == j:
            raise QuiverParseError(lineno, f"loop at vertex {i}")
        if m < 1:
            raise QuiverParseError(lineno, "multiplicity must be positive")
        arrows.append((i - 1, j - 1, m))
        n = max(n, i, j)
    if n == 0:
        raise QuiverParseError(0, "no arrows found")
    try:
        quiver = Quiver.from_arrows(n, arrows)
    except ValueError as e:
        raise QuiverParseError(0, str(e)) from e
    pairs = {(i, j) for i, j, _ in arrows}
    if any((j, i) in pairs for i, j in pairs):
        raise QuiverParseError(0, "2-cycles are not allowed")
    if not quiver.is_acyclic():
        raise QuiverParseError(0, "the input quiver must be acyclic")
    return quiver


def mutate_quiver(q: Quiver, k: int) -> Quiver:
    """Fomin-Zelevinsky matrix mutation at vertex k (0-indexed)."""
    if not 0 <= k < q.n:
        raise ValueError(f"Vertex {k + 1} out of range for a quiver with {q.n} vertices")
    b = q.b
    out = []
    for i in range(q.n):
        row = []
        for j in range(q.n):
            if k in (i, j):
                row.append(-b[i][j])
            else:
                sign = (b[i][k] > 0) - (b[i][k] < 0)
                row.append(b[i][j] + sign * max(0, b[i][k] * b[k][j]))
        out.append(tuple(row))
    return Quiver(tuple(out))


def positive_roots(q: Quiver, max_height: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Positive real roots, generated by simple reflections from the simple roots.

    For Dynkin quivers this is the full (finite) root system; otherwise only
    roots of total height at most `max_height` are returned."""
    if max_height is None and not q.is_dynkin():
        raise ValueError("A height bound is required outside Dynkin type")
    c = q.cartan()
    simples = [tuple(int(i == j) for j in range(q.n)) for i in range(q.n)]
    seen: Set[Tuple[int, ...]] = set(simples)
    queue = list(simples)
    while queue:
        d = queue.pop()
        for j in range(q.n):
            pairing = sum(c[j][i] * d[i] for i in range(q.n))
            r = tuple(d[i] - pairing * int(i == j) for i in range(q.n))
            if any(x < 0 for x in r) or not any(r) or r in seen:
                continue
            if max_height is not None and sum(r) > max_height:
                continue
            seen.add(r)
            queue.append(r)
    return sorted(seen, key=lambda r: (sum(r), r))


def almost_positive_root_count(q: Quiver) -> int:
    """Number of cluster variables of a Dynkin quiver: positive roots plus rank."""
    return len(positive_roots(q)) + q.n


@dataclass(frozen=True)
class Seed:
    quiver: Quiver
    vars: Tuple[LaurentPoly, ...]
    trace: Tuple[int, ...] = ()
    """Mutation sequence (0-indexed) leading here from the root seed."""
    tilt: Optional[Tuple[Any, ...]] = None
    """Indecomposable objects of the cluster category attached to each variable."""

    def __post_init__(self):
        if len(self.vars) != self.quiver.n:
            raise ValueError("A seed needs one variable per vertex")
        if self.tilt is not None and len(self.tilt) != self.quiver.n:
            raise ValueError("A seed needs one tracked object per vertex")

    @property
    def n(self) -> int:
        return self.quiver.n

    @property
    def address(self) -> str:
        return format_trace(self.trace)


def root_seed(quiver: Quiver, tilt: Optional[Sequence[Any]] = None) -> Seed:
    n = quiver.n
    return Seed(
        quiver,
        tuple(LaurentPoly.variable(n, i) for i in range(n)),
        (),
        tuple(tilt) if tilt is not None else None,
    )


ExchangeFunction = Callable[[Seed, int], Any]


def exchange_binomial(seed: Seed, k: int) -> Tuple[LaurentPoly, LaurentPoly]:
    """The two monomials of the exchange relation at k, from column k of b."""
    b = seed.quiver.b
    plus = product((seed.vars[j] ** b[j][k] for j in range(seed.n) if b[j][k] > 0), seed.vars[k].n)
    minus = product((seed.vars[j] ** -b[j][k] for j in range(seed.n) if b[j][k] < 0), seed.vars[k].n)
    return plus, minus


def mutate_seed(seed: Seed, k: int, exchange: Optional[ExchangeFunction] = None) -> Seed:
    """Mutate at k: apply the exchange relation, mutate the quiver, extend the trace.

    If the seed tracks objects and an exchange function is given, the object
    at k is replaced by its exchange partner; otherwise tracking is dropped."""
    if not 0 <= k < seed.n:
        raise ValueError(f"Vertex {k + 1} out of range for a seed of rank {seed.n}")
    plus, minus = exchange_binomial(seed, k)
    try:
        new_var = exact_div(plus + minus, seed.vars[k])
    except DivisibilityError as e:
        raise InternalConsistencyError(
            f"Exchange relation at {k + 1} from {seed.address} is not divisible"
        ) from e
    tilt = None
    if seed.tilt is not None and exchange is not None:
        partner = exchange(seed, k)
        tilt = seed.tilt[:k] + (partner,) + seed.tilt[k + 1 :]
    return Seed(
        seed.quiver.mutate(k),
        seed.vars[:k] + (new_var,) + seed.vars[k + 1 :],
        seed.trace + (k,),
        tilt,
    )


def canonical_key(seed: Seed) -> SeedKey:
    """Sorted canonical renderings of the cluster; equal exactly for equal clusters."""
    return tuple(sorted(render(v) for v in seed.vars))


def format_trace(trace: Sequence[int]) -> str:
    if not trace:
        return "id"
    return "mu(" + ",".join(str(k + 1) for k in trace) + ")"


_TRACE_RE = re.compile(r"^\s*mu\(\s*(\d+(?:\s*,\s*\d+)*)?\s*\)\s*$")


def parse_trace(text: str, n: int) -> Tuple[int, ...]:
    """Parse "id" or "mu(i,j,...)" (1-indexed) into a 0-indexed trace."""
    if text.strip() in ("id", ""):
        return ()
    match = _TRACE_RE.match(text)
    if not match:
        raise ValueError(f"Cannot parse mutation trace {text!r}; expected 'id' or 'mu(i,j,...)'")
    trace = tuple(int(x) - 1 for x in re.findall(r"\d+", match.group(1) or ""))
    for k in trace:
        if not 0 <= k < n:
            raise ValueError(f"Vertex {k + 1} in trace {text!r} is out of range")
    return trace


@dataclass
class ClusterVariable:
    poly: LaurentPoly
    key: str
    obj: Optional[Any]
    trace: Tuple[int, ...]
    """Trace of the first seed in which the variable appeared."""


@dataclass
class Registry:
    """All seeds reachable from a root, deduplicated by cluster."""

    root: Seed
    depth: Optional[int]
    seeds: Dict[SeedKey, Seed] = field(default_factory=dict)
    variables: Dict[str, ClusterVariable] = field(default_factory=dict)
    complete: bool = False
    unresolved: int = 0
    """Number of mutations whose exchange partner could not be found."""

    def _register(self, seed: Seed):
        for i, v in enumerate(seed.vars):
            key = render(v)
            obj = seed.tilt[i] if seed.tilt is not None else None
            known = self.variables.get(key)
            if known is None:
                self.variables[key] = ClusterVariable(v, key, obj, seed.trace)
            elif known.obj is None:
                known.obj = obj
            elif obj is not None and known.obj != obj:
                raise InternalConsistencyError(
                    f"Variable {key} tracked as two different objects: {known.obj} and {obj}"
                )

    def by_object(self) -> Dict[Any, ClusterVariable]:
        return {v.obj: v for v in self.variables.values() if v.obj is not None}

    def seed_at(self, trace: Sequence[int]) -> Optional[Seed]:
        for seed in self.seeds.values():
            if seed.trace == tuple(trace):
                return seed
        return None


def enumerate_seeds(
    root: Seed,
    depth: Optional[int] = None,
    exchange: Optional[ExchangeFunction] = None,
    finite_type: Optional[bool] = None,
    max_seeds: int = DEFAULT_MAX_SEEDS,
    workers: int = 1,
) -> Registry:
    """Breadth-first exploration of the exchange graph from `root`.

    The registry content depends only on (root, depth): frontiers are expanded
    in discovery order and children are merged in mutation order, whatever the
    worker count."""
    if finite_type is None:
        finite_type = root.quiver.is_acyclic() and root.quiver.is_dynkin()
    if depth is None and not finite_type:
        raise ValueError("An explicit depth is required outside finite type")
    registry = Registry(root=root, depth=depth)
    registry.seeds[canonical_key(root)] = root
    registry._register(root)

    unresolved = 0

    def expand(seed: Seed) -> Tuple[List[Seed], int]:
        children = []
        missing = 0
        for k in range(seed.n):
            try:
                children.append(mutate_seed(seed, k, exchange))
            except UnresolvedExchange as e:
                logger.debug(f"No exchange partner at {k + 1} from {seed.address}: {e}")
                missing += 1
                children.append(mutate_seed(seed, k, None))
        return children, missing

    frontier = [root]
    level = 0
    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while frontier and (depth is None or level < depth):
            expansions = executor.map(expand, frontier) if executor else map(expand, frontier)
            next_frontier = []
            for children, missing in expansions:
                unresolved += missing
                for child in children:
                    key = canonical_key(child)
                    if key in registry.seeds:
                        registry._register(child)
                        continue
                    if len(registry.seeds) >= max_seeds:
                        registry.unresolved = unresolved
                        raise EnumerationBudgetExceeded(max_seeds, registry)
                    registry.seeds[key] = child
                    registry._register(child)
                    next_frontier.append(child)
            frontier = next_frontier
            level += 1
            logger.debug(f"Depth {level}: {len(registry.seeds)} seeds, {len(frontier)} new")
    finally:
        if executor:
            executor.shutdown()
    registry.complete = not frontier
    registry.unresolved = unresolved
    logger.info(
        f"Enumerated {len(registry.seeds)} seeds and {len(registry.variables)} cluster variables"
        + ("" if registry.complete else f" (depth {depth}, frontier open)")
    )
    return registry
