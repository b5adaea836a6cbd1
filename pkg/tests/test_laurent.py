import random

import pytest

from clusterlab.laurent import (
    Certified,
    DivisibilityError,
    Falsified,
    LaurentFraction,
    LaurentPoly,
    NotLaurentError,
    Unknown,
    add_vectors,
    audit_certificate,
    denominator_vector,
    exact_div,
    max_vector,
    render,
    substitute,
    weak_positivity_certificate,
)


def u(n, i):
    return LaurentPoly.variable(n, i)


def one(n):
    return LaurentPoly.one(n)


def test_render_is_canonical():
    u1, u2 = u(2, 0), u(2, 1)
    f = (one(2) + u1 + u2) * (u1 * u2) ** -1
    assert render(f) == "(1 + u1 + u2) / (u1*u2)"
    assert render((one(2) + u2) * u1**-1, "x") == "(1 + x2) / x1"
    assert render(u1) == "u1"
    assert render(LaurentPoly.zero(2)) == "0"
    assert render(LaurentPoly.constant(2, -3)) == "-3"
    assert render(u1 * u1 - u2 - u2) == "-2*u2 + u1^2"


def test_exact_division():
    u1, u2 = u(2, 0), u(2, 1)
    f = (one(2) + u1) * (one(2) + u2)
    assert exact_div(f, one(2) + u1) == one(2) + u2
    assert exact_div(f * u1**-2, u1 * (one(2) + u2)) == (one(2) + u1) * u1**-3
    with pytest.raises(DivisibilityError):
        exact_div(one(2) + u1, one(2) + u2)
    with pytest.raises(ZeroDivisionError):
        exact_div(f, LaurentPoly.zero(2))


def test_denominator_vector():
    u1, u2 = u(2, 0), u(2, 1)
    assert denominator_vector((one(2) + u2) * u1**-1) == (1, 0)
    assert denominator_vector(u1) == (-1, 0)
    assert denominator_vector(LaurentPoly.constant(2, 2)) == (0, 0)
    assert denominator_vector((one(2) + u1 + u2) * (u1 * u2) ** -1) == (1, 1)


def test_negative_power_needs_a_unit():
    with pytest.raises(DivisibilityError):
        (one(2) + u(2, 0)) ** -1


def test_negative_powers_of_monomials():
    u1, u2 = u(2, 0), u(2, 1)
    assert (u1 * u2**2) ** -3 * (u1**3 * u2**6) == one(2)
    assert denominator_vector(u2**-2) == (0, 2)
    assert (-u1) ** -2 == u1**-2
    assert (-u1) ** -3 == -(u1**-3)


def test_render_orders_by_degree_then_earlier_variables():
    u1, u2, u3 = u(3, 0), u(3, 1), u(3, 2)
    f = u3**2 + u1 * u3 + u2 + u1 + one(3) + u1**2
    assert render(f) == "1 + u1 + u2 + u1^2 + u1*u3 + u3^2"


def test_substitute():
    u1, u2 = u(2, 0), u(2, 1)
    x1, x2 = u(2, 0), u(2, 1)
    # x1 -> u1, x2 -> (1 + u1) / u2 sends (1 + x2) / x1 to (1 + u1 + u2) / (u1 u2)
    images = [u1, (one(2) + u1) * u2**-1]
    image = substitute((one(2) + x2) * x1**-1, images)
    assert image == (one(2) + u1 + u2) * (u1 * u2) ** -1


def test_substitute_strict_and_extended():
    x1 = u(1, 0)
    images = [one(1) + u(1, 0)]
    with pytest.raises(NotLaurentError):
        substitute(x1**-1, images)
    fraction = substitute(x1**-1, images, strict=False)
    assert isinstance(fraction, LaurentFraction)
    assert fraction.render() == "(1) / (1 + u1)"


def test_weak_positivity_certificates():
    u1, u2 = u(2, 0), u(2, 1)
    rng = random.Random(0)
    assert isinstance(weak_positivity_certificate((one(2) + u2) * u1**-1, rng), Certified)
    falsified = weak_positivity_certificate(u1 - u2, rng)
    assert isinstance(falsified, Falsified)
    assert falsified.value <= 0
    # (u1 - u2)^2 + 1 is positive everywhere but has a negative coefficient
    square = (u1 - u2) * (u1 - u2) + one(2)
    assert isinstance(weak_positivity_certificate(square, rng), Unknown)
    with pytest.raises(ValueError):
        weak_positivity_certificate(LaurentPoly.zero(2))


def test_certificates_survive_audit():
    u1, u2 = u(2, 0), u(2, 1)
    rng = random.Random(1)
    for f in [one(2) + u1 * u2**-2, u1 - u2, (u1 - u2) * (u1 - u2) + one(2)]:
        assert audit_certificate(f, weak_positivity_certificate(f, rng), rng, samples=100)


def test_denominator_lemma_example():
    u1, u2 = u(2, 0), u(2, 1)
    f = (one(2) + u2) * u1**-1
    g = (one(2) + u1) * u2**-2
    df, dg = denominator_vector(f), denominator_vector(g)
    assert denominator_vector(f + g) == max_vector(df, dg) == (1, 2)
    assert denominator_vector(f * g) == add_vectors(df, dg) == (1, 2)
    # Without weak positivity the maximum can drop
    h = one(2) - u1**-1
    assert max_vector(denominator_vector(u1**-1), denominator_vector(h)) == (1, 0)
    assert denominator_vector(u1**-1 + h) == (0, 0)


def test_mismatched_variable_counts():
    with pytest.raises(ValueError):
        u(2, 0) + u(3, 0)
