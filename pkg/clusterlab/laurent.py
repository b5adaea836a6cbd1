"""Exact multivariate Laurent polynomials over the integers.

Polynomials are kept as sparse maps from exponent vectors to nonzero integer
coefficients. Exact division of numerators is delegated to sympy's sparse
polynomial rings; everything else is plain dictionary arithmetic."""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from sympy.polys.domains import ZZ
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import ring

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
IntVector = Tuple[int, ...]


class LaurentError(ArithmeticError):
    """Base class for Laurent arithmetic failures."""


class DivisibilityError(LaurentError):
    """An exact division left a nonzero remainder."""


class NotLaurentError(DivisibilityError):
    """A substitution produced a rational function that is not a Laurent polynomial."""


@dataclass(frozen=True)
class LaurentPoly:
    n: int
    terms: Tuple[Tuple[Exponent, int], ...]
    """Sorted by exponent vector; zero coefficients are never stored."""

    @classmethod
    def from_dict(cls, n: int, terms: Mapping[Exponent, int]) -> LaurentPoly:
        clean = {}
        for exp, c in terms.items():
            if len(exp) != n:
                raise ValueError(f"Exponent {exp} does not have {n} entries")
            if c:
                clean[tuple(exp)] = int(c)
        return cls(n, tuple(sorted(clean.items())))

    @classmethod
    def zero(cls, n: int) -> LaurentPoly:
        return cls(n, ())

    @classmethod
    def constant(cls, n: int, c: int) -> LaurentPoly:
        return cls.from_dict(n, {(0,) * n: c})

    @classmethod
    def one(cls, n: int) -> LaurentPoly:
        return cls.constant(n, 1)

    @classmethod
    def monomial(cls, exps: Sequence[int], coefficient: int = 1) -> LaurentPoly:
        return cls.from_dict(len(exps), {tuple(exps): coefficient})

    @classmethod
    def variable(cls, n: int, i: int) -> LaurentPoly:
        if not 0 <= i < n:
            raise ValueError(f"Variable index {i} out of range for {n} variables")
        return cls.monomial(tuple(int(j == i) for j in range(n)))

    def as_dict(self) -> Dict[Exponent, int]:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def _check(self, other: LaurentPoly):
        if not isinstance(other, LaurentPoly):
            raise TypeError(f"Expected LaurentPoly, got {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"Variable count mismatch: {self.n} vs {other.n}")

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        self._check(other)
        out = self.as_dict()
        for exp, c in other.terms:
            out[exp] = out.get(exp, 0) + c
        return LaurentPoly.from_dict(self.n, out)

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly(self.n, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: LaurentPoly) -> LaurentPoly:
        return self + (-other)

    def __mul__(self, other: LaurentPoly) -> LaurentPoly:
        self._check(other)
        out: Dict[Exponent, int] = {}
        for (e1, c1), (e2, c2) in itertools.product(self.terms, other.terms):
            exp = tuple(a + b for a, b in zip(e1, e2))
            out[exp] = out.get(exp, 0) + c1 * c2
        return LaurentPoly.from_dict(self.n, out)

    def __pow__(self, k: int) -> LaurentPoly:
        if k < 0:
            if not self.is_monomial or abs(self.terms[0][1]) != 1:
                raise DivisibilityError(f"{self} is not a unit of the Laurent ring")
            (exp, c), = self.terms
            return LaurentPoly.monomial(tuple(e * k for e in exp), c ** (-k))
        result = LaurentPoly.one(self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def exact_div(self, other: LaurentPoly) -> LaurentPoly:
        return exact_div(self, other)

    def reduced(self) -> Tuple[LaurentPoly, IntVector]:
        """The reduced form P / u^d: P is a polynomial divisible by no u_i."""
        if self.is_zero:
            raise ValueError("The zero Laurent polynomial has no reduced form")
        d = tuple(-min(exp[i] for exp, _ in self.terms) for i in range(self.n))
        shifted = {tuple(a + b for a, b in zip(exp, d)): c for exp, c in self.terms}
        return LaurentPoly.from_dict(self.n, shifted), d

    def denominator_vector(self) -> IntVector:
        return denominator_vector(self)

    def numerator(self) -> LaurentPoly:
        return self.reduced()[0]

    def evaluate(self, point: Sequence[int]) -> int:
        """Evaluate a polynomial (no negative exponents) at an integer point."""
        total = 0
        for exp, c in self.terms:
            term = c
            for z, e in zip(point, exp):
                if e < 0:
                    raise ValueError("evaluate() needs a polynomial; use numerator() first")
                term *= z**e
            total += term
        return total

    def coefficients(self) -> List[int]:
        return [c for _, c in self.terms]

    def render(self, prefix: str = "u") -> str:
        return render(self, prefix)

    def __str__(self):
        return render(self)


def add(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    return f + g


def mul(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    return f * g


def product(factors: Iterable[LaurentPoly], n: int) -> LaurentPoly:
    result = LaurentPoly.one(n)
    for f in factors:
        result = result * f
    return result


@lru_cache(maxsize=None)
def _polynomial_ring(n: int):
    return ring([f"u{i}" for i in range(1, n + 1)], ZZ)[0]


def exact_div(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """f / g in the Laurent ring; raises DivisibilityError if g does not divide f."""
    f._check(g)
    if g.is_zero:
        raise ZeroDivisionError("Division by the zero Laurent polynomial")
    if f.is_zero:
        return f
    pf, df = f.reduced()
    pg, dg = g.reduced()
    R = _polynomial_ring(f.n)
    try:
        q = R.from_dict(pf.as_dict()).exquo(R.from_dict(pg.as_dict()))
    except ExactQuotientFailed as e:
        raise DivisibilityError(f"{render(g)} does not divide {render(f)}") from e
    quotient = LaurentPoly.from_dict(f.n, {tuple(m): int(c) for m, c in q.items()})
    return quotient * LaurentPoly.monomial(tuple(b - a for a, b in zip(df, dg)))


def denominator_vector(f: LaurentPoly) -> IntVector:
    if f.is_zero:
        raise ValueError("The zero Laurent polynomial has no denominator vector")
    return f.reduced()[1]


def max_vector(d: Sequence[int], e: Sequence[int]) -> IntVector:
    return tuple(max(a, b) for a, b in zip(d, e))


def add_vectors(d: Sequence[int], e: Sequence[int]) -> IntVector:
    return tuple(a + b for a, b in zip(d, e))


def unit_vector(n: int, i: int, sign: int = 1) -> IntVector:
    return tuple(sign if j == i else 0 for j in range(n))


class LaurentFraction(NamedTuple):
    """An exact quotient of Laurent polynomials that failed to divide out."""

    numerator: LaurentPoly
    denominator: LaurentPoly

    def render(self, prefix: str = "u") -> str:
        return f"({render(self.numerator, prefix)}) / ({render(self.denominator, prefix)})"


def substitute(
    f: LaurentPoly, images: Sequence[LaurentPoly], strict: bool = True
) -> Union[LaurentPoly, LaurentFraction]:
    """Ring homomorphism sending variable i of f to images[i].

    In strict mode a non-Laurent result raises NotLaurentError; otherwise the
    exact quotient is returned as a LaurentFraction."""
    if len(images) != f.n:
        raise ValueError(f"Expected {f.n} images, got {len(images)}")
    if any(y.is_zero for y in images):
        raise ValueError("Substitution images must be nonzero")
    m = images[0].n
    if any(y.n != m for y in images):
        raise ValueError("Substitution images must share a variable count")
    if f.is_zero:
        return LaurentPoly.zero(m)
    shift = tuple(max(0, -min(exp[i] for exp, _ in f.terms)) for i in range(f.n))
    numerator = LaurentPoly.zero(m)
    for exp, c in f.terms:
        term = LaurentPoly.constant(m, c)
        for y, e, s in zip(images, exp, shift):
            if e + s:
                term = term * y ** (e + s)
        numerator = numerator + term
    denominator = product((y**s for y, s in zip(images, shift) if s), m)
    try:
        return exact_div(numerator, denominator)
    except DivisibilityError:
        if strict:
            raise NotLaurentError(
                f"Substitution of {render(f, 'x')} is not a Laurent polynomial"
            )
        return LaurentFraction(numerator, denominator)


# Rendering


def _term_order(exp: Exponent):
    return (sum(exp), tuple(-e for e in exp))


def _monomial_text(exp: Sequence[int], prefix: str) -> str:
    factors = []
    for i, e in enumerate(exp):
        if e == 1:
            factors.append(f"{prefix}{i + 1}")
        elif e:
            factors.append(f"{prefix}{i + 1}^{e}")
    return "*".join(factors)


def render(f: LaurentPoly, prefix: str = "u") -> str:
    """Canonical text: the numerator over a monomial, its terms sorted by total degree
    and then by exponent with higher powers of earlier variables first.

    For example "(1 + u1 + u2) / (u1*u2)". This string is the stable key used
    in registries and reports."""
    if f.is_zero:
        return "0"
    p, d = f.reduced()
    lift = tuple(max(0, -x) for x in d)
    den = tuple(max(0, x) for x in d)
    terms = sorted(
        ((tuple(a + b for a, b in zip(exp, lift)), c) for exp, c in p.terms),
        key=lambda t: _term_order(t[0]),
    )
    parts = []
    for k, (exp, c) in enumerate(terms):
        mono = _monomial_text(exp, prefix)
        mag = abs(c)
        body = mono if mono and mag == 1 else (f"{mag}*{mono}" if mono else str(mag))
        if k == 0:
            parts.append(f"-{body}" if c < 0 else body)
        else:
            parts.append(f" - {body}" if c < 0 else f" + {body}")
    num = "".join(parts)
    if not any(den):
        return num
    den_text = _monomial_text(den, prefix)
    if len(terms) > 1:
        num = f"({num})"
    if sum(1 for x in den if x) > 1:
        den_text = f"({den_text})"
    return f"{num} / {den_text}"


# Weak positivity


@dataclass(frozen=True)
class Certified:
    """Nonnegative numerator coefficients and positive values at the corner points."""


@dataclass(frozen=True)
class Falsified:
    point: Tuple[int, ...]
    value: int


@dataclass(frozen=True)
class Unknown:
    reason: str


Certificate = Union[Certified, Falsified, Unknown]


def corner_points(n: int) -> Iterator[Tuple[int, ...]]:
    """The all-ones point followed by each point with a single zero."""
    yield (1,) * n
    for i in range(n):
        yield tuple(0 if j == i else 1 for j in range(n))


def _admissible_box(n: int, bound: int) -> Iterator[Tuple[int, ...]]:
    for z in itertools.product(range(bound + 1), repeat=n):
        if sum(1 for x in z if x == 0) <= 1:
            yield z


def random_admissible_point(n: int, rng: random.Random, bound: int = 50) -> Tuple[int, ...]:
    """A point of N^n with at most one zero coordinate."""
    z = [rng.randint(1, bound) for _ in range(n)]
    if n and rng.random() < 0.5:
        z[rng.randrange(n)] = 0
    return tuple(z)


def weak_positivity_certificate(
    f: LaurentPoly,
    rng: Optional[random.Random] = None,
    box: int = 3,
    samples: int = 200,
) -> Certificate:
    """Semi-decide weak positivity of f.

    With nonnegative coefficients the numerator is monotone on N^n, so its
    values at the corner points bound it from below on every admissible point.
    When that test fails a witness is searched for among the corner points, a
    small box and seeded random samples."""
    if f.is_zero:
        raise ValueError("Weak positivity is undefined for zero")
    p = f.numerator()
    corners = list(corner_points(f.n))
    if all(c > 0 for c in p.coefficients()) and all(p.evaluate(z) > 0 for z in corners):
        return Certified()
    for z in itertools.chain(corners, _admissible_box(f.n, box)):
        v = p.evaluate(z)
        if v <= 0:
            return Falsified(z, v)
    rng = rng or random.Random(0)
    for _ in range(samples):
        z = random_admissible_point(f.n, rng)
        v = p.evaluate(z)
        if v <= 0:
            return Falsified(z, v)
    return Unknown("numerator has negative coefficients but no witness was found")


def audit_certificate(
    f: LaurentPoly, certificate: Certificate, rng: random.Random, samples: int = 1000
) -> bool:
    """Re-check a certificate by direct evaluation at sampled admissible points."""
    p = f.numerator()
    if isinstance(certificate, Certified):
        return all(p.evaluate(random_admissible_point(f.n, rng)) > 0 for _ in range(samples))
    if isinstance(certificate, Falsified):
        return p.evaluate(certificate.point) <= 0
    return True
