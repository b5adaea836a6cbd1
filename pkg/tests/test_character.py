import math

import pytest

from clusterlab.character import CharacterEngine, classical_cc, cluster_character
from clusterlab.clustercat import ClusterCategory, context_for
from clusterlab.combinatorics import enumerate_seeds, root_seed
from clusterlab.laurent import LaurentPoly, render


@pytest.fixture
def root2(a2):
    cat = ClusterCategory(a2)
    return context_for(cat, cat.root_object())


@pytest.fixture
def root3(a3):
    cat = ClusterCategory(a3)
    return context_for(cat, cat.root_object())


def test_initial_objects_give_initial_variables(root3):
    engine = CharacterEngine(root3)
    for i in range(root3.q):
        result = engine.character([root3.ST(i)])
        assert result.value == LaurentPoly.variable(root3.q, i)


def test_simple_of_a2(root2):
    cat = root2.category
    S1 = cat.lookup(("M", (1, 0)))
    assert render(cluster_character(root2, [S1]).value, "x") == "(1 + x2) / x1"
    assert render(classical_cc(cat, [S1]).value, "x") == "(1 + x2) / x1"


@pytest.mark.parametrize("name", ["a2", "a3"])
def test_characters_are_the_cluster_variables(name, request):
    ctx = request.getfixturevalue(f"root{name[1]}")
    cat = ctx.category
    registry = enumerate_seeds(root_seed(cat.quiver, cat.root_object()), exchange=cat.exchange)
    engine = CharacterEngine(ctx)
    by_object = registry.by_object()
    assert len(by_object) == len(cat.pool)
    for X, variable in by_object.items():
        assert engine.character([X]).value == variable.poly


def test_multiplicative_and_ledger(root3):
    engine = CharacterEngine(root3)
    cat = root3.category
    X, Y = cat.pool[0], cat.pool[3]
    both = engine.character([X, Y])
    assert both.value == engine.character([X]).value * engine.character([Y]).value
    assert both.ledger_value() == both.value
    assert {t.slot for t in both.terms} == {0, 1}


def test_terms_of_a_projective(root3):
    cat = root3.category
    P1 = cat.lookup(("M", (1, 1, 1)))
    result = CharacterEngine(root3).character([P1])
    assert len(result.terms) == 4
    assert all(t.chi == 1 for t in result.terms)
    assert result.ledger_value() == result.value


def test_grassmannians_cover_every_dimension_vector(root3):
    engine = CharacterEngine(root3, primes=(2, 3))
    P1 = root3.category.lookup(("M", (1, 1, 1)))
    entries = engine.grassmannians(P1)
    assert len(entries) == math.prod(d + 1 for d in P1.rep.dims)
    assert sum(g.value for g in entries) == 4
    assert engine.grassmannian(P1, (0, 0, 0)).value == 1
    assert engine.grassmannian(P1, (1, 1, 1)).value == 1
