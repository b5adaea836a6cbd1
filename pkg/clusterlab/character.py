"""Cluster characters X^T_M, computed from Euler characteristics of quiver Grassmannians of Hom_C(T, M)."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

from clusterlab.clustercat import (
    CInd,
    ClusterCategory,
    F_module,
    TiltingContext,
    endomorphism_context,
)
from clusterlab.fdalg import (
    DEFAULT_PRIMES,
    DEFAULT_SUBMODULE_BUDGET,
    FDModule,
    GrassmannianEuler,
    euler_characteristic,
    euler_form,
)
from clusterlab.laurent import LaurentPoly, product

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CharacterTerm:
    slot: int
    """Position of the summand in the object."""
    summand: str
    e: Tuple[int, ...]
    chi: int
    exponent: Tuple[int, ...]


@dataclass(frozen=True)
class CharacterResult:
    value: LaurentPoly
    terms: Tuple[CharacterTerm, ...]

    def ledger_value(self) -> LaurentPoly:
        """Rebuild the value from the ledger: a sum per summand, multiplied over summands."""
        n = self.value.n
        sums: Dict[int, LaurentPoly] = {}
        for t in self.terms:
            sums[t.slot] = sums.get(t.slot, LaurentPoly.zero(n)) + LaurentPoly.monomial(
                t.exponent, t.chi
            )
        return product(sums.values(), n)


class CharacterEngine:
    """Computes X^T for one tilting context, memoizing per indecomposable."""

    def __init__(
        self,
        ctx: TiltingContext,
        primes: Sequence[int] = DEFAULT_PRIMES,
        budget: int = DEFAULT_SUBMODULE_BUDGET,
    ):
        self.ctx = ctx
        self.primes = tuple(primes)
        self.budget = budget
        self._cache: Dict[Tuple, Tuple[LaurentPoly, Tuple[CharacterTerm, ...]]] = {}

    def _module_at(self, X: CInd):
        modules: Dict[int, FDModule] = {}

        def at(p: int) -> FDModule:
            if p not in modules:
                reduced = self.ctx.reduce(p)
                modules[p] = F_module(reduced, [reduced.category.lookup(X.key)])
            return modules[p]

        return at

    def grassmannian(self, X: CInd, e: Sequence[int]) -> GrassmannianEuler:
        return euler_characteristic(self._module_at(X), e, self.primes, self.budget)

    def grassmannians(self, X: CInd) -> List[GrassmannianEuler]:
        FM = F_module(self.ctx, [X])
        at = self._module_at(X)
        return [
            euler_characteristic(at, e, self.primes, self.budget)
            for e in itertools.product(*(range(d + 1) for d in FM.dims))
        ]

    def _indecomposable(self, X: CInd) -> Tuple[LaurentPoly, Tuple[CharacterTerm, ...]]:
        if X.key in self._cache:
            return self._cache[X.key]
        ctx, q = self.ctx, self.ctx.q
        for i in range(q):
            if ctx.ST(i) == X:
                value = LaurentPoly.variable(q, i)
                result = (value, (CharacterTerm(0, X.label, (), 1, _unit(q, i)),))
                self._cache[X.key] = result
                return result
        FM = F_module(ctx, [X])
        shift = [euler_form(S, FM) for S in ctx.simples]
        at = self._module_at(X)
        value = LaurentPoly.zero(q)
        terms = []
        for e in itertools.product(*(range(d + 1) for d in FM.dims)):
            if not any(e) or tuple(e) == FM.dims:
                chi = 1
            else:
                chi = euler_characteristic(at, e, self.primes, self.budget).value
            if not chi:
                continue
            exponent = tuple(
                sum(a * x for a, x in zip(ctx.antisym[i], e)) - shift[i] for i in range(q)
            )
            terms.append(CharacterTerm(0, X.label, tuple(e), chi, exponent))
            value = value + LaurentPoly.monomial(exponent, chi)
        logger.debug(f"X^T of {X.label}: {len(terms)} terms")
        self._cache[X.key] = (value, tuple(terms))
        return self._cache[X.key]

    def character(self, M: Sequence[CInd]) -> CharacterResult:
        """X^T_M, multiplicative over the summands of M."""
        q = self.ctx.q
        value = LaurentPoly.one(q)
        terms: List[CharacterTerm] = []
        for slot, X in enumerate(M):
            v, t = self._indecomposable(X)
            value = value * v
            terms.extend(replace(term, slot=slot) for term in t)
        return CharacterResult(value, tuple(terms))


def _unit(n: int, i: int) -> Tuple[int, ...]:
    return tuple(int(j == i) for j in range(n))


def cluster_character(
    ctx: TiltingContext,
    M: Sequence[CInd],
    primes: Sequence[int] = DEFAULT_PRIMES,
    budget: int = DEFAULT_SUBMODULE_BUDGET,
) -> CharacterResult:
    return CharacterEngine(ctx, primes, budget).character(M)


def classical_cc(
    cat: ClusterCategory,
    M: Sequence[CInd],
    primes: Sequence[int] = DEFAULT_PRIMES,
    ctx: Optional[TiltingContext] = None,
) -> CharacterResult:
    """The Caldero-Chapoton map: X^T with T the sum of the projectives, read in the initial variables."""
    ctx = ctx or endomorphism_context(cat, cat.projective_object())
    return cluster_character(ctx, M, primes)
