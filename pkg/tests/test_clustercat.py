import itertools

import pytest

from clusterlab.clustercat import (
    ClusterCategory,
    NotBasicError,
    context_for,
    dim_hom_vector,
    endomorphism_context,
    F_module,
    h_vector,
    parse_label,
    render_object,
)
from clusterlab.combinatorics import root_seed


@pytest.fixture
def cat2(a2):
    return ClusterCategory(a2)


@pytest.fixture
def cat3(a3):
    return ClusterCategory(a3)


def test_pool_is_every_indecomposable(dynkin_case):
    cat = ClusterCategory(dynkin_case.quiver)
    assert cat.finite
    assert len(cat.pool) == dynkin_case.variables
    modules = [x for x in cat.pool if not x.is_shift]
    assert len(modules) == dynkin_case.positive_roots


def test_labels(cat2):
    assert parse_label("dim:1,0", 2) == ("M", (1, 0))
    assert parse_label(" sp: 2 ", 2) == ("P", 1)
    assert cat2.lookup(parse_label("sp:1", 2)).label == "sp:1"
    assert render_object(cat2.root_object()) == "sp:1 + sp:2"
    assert render_object(()) == "0"
    for bad in ["sp:3", "dim:1", "P1", ""]:
        with pytest.raises(ValueError):
            parse_label(bad, 2)
    with pytest.raises(LookupError):
        cat2.lookup(("M", (2, 2)))


def test_translation_is_an_autoequivalence(cat3):
    for X in cat3.pool:
        assert cat3.tau_c_inv(cat3.tau_c(X)) == X
        assert cat3.tau_c(cat3.tau_c_inv(X)) == X
    for i in range(cat3.n):
        assert cat3.tau_c(cat3.shift(i)).rep.dims == cat3.std.I[i].dims
        assert cat3.tau_c(cat3.module(cat3.std.P[i])) == cat3.shift(i)


def test_two_calabi_yau(cat3):
    for X, Y in itertools.product(cat3.pool, repeat=2):
        assert cat3.ext1_c(X, Y) == cat3.ext1_c(Y, X)
        assert cat3.ext1_c(X, Y) == cat3.hom_dim(X, cat3.tau_c(Y))


def test_hom_from_projective_modules(cat3):
    for i in range(cat3.n):
        for X in cat3.pool:
            if X.is_shift:
                continue
            assert cat3.hom_dim(cat3.module(cat3.std.P[i]), X) == X.rep.dims[i]


def test_identity_is_neutral(cat3):
    field = cat3.field
    for X, Y in itertools.product(cat3.pool, repeat=2):
        d = cat3.hom_dim(X, Y)
        for r in range(d):
            f = [field.one if k == r else field.zero for k in range(d)]
            assert cat3.compose(X, X, Y, cat3.identity(X), f) == f
            assert cat3.compose(X, Y, Y, f, cat3.identity(Y)) == f


def test_cluster_tilting_objects(cat3):
    assert cat3.is_cluster_tilting(cat3.root_object())
    assert cat3.is_cluster_tilting(cat3.projective_object())
    assert not cat3.is_cluster_tilting(cat3.root_object()[:2])
    X = cat3.shift(0)
    with pytest.raises(NotBasicError):
        cat3.is_cluster_tilting((X, X, cat3.shift(1)))


def test_exchange_partner(cat2):
    R = cat2.root_object()
    partner = cat2.exchange_partner(R, 0)
    assert partner.label == "dim:1,0"
    assert cat2.ext1_c(partner, R[0]) == 1
    assert cat2.tilt_at((0,)) == (partner, R[1])
    assert cat2.tilt_at((0, 0)) == R


def test_exchange_triangle_follows_the_quiver(cat2, a2):
    seed = root_seed(a2, cat2.root_object())
    ex = cat2.exchange_triangle(seed, 0)
    assert ex.ustar.label == "dim:1,0"
    assert len(ex.E) + len(ex.Eprime) == 1
    with pytest.raises(ValueError):
        cat2.exchange_triangle(root_seed(a2), 0)


def test_endomorphism_algebra_of_projectives(cat3):
    ctx = endomorphism_context(cat3, cat3.projective_object())
    assert ctx.algebra.dim == 6
    assert sum(m for _, _, m in ctx.quiver.arrows()) == 2
    for X in cat3.pool:
        F_module(ctx, [X]).check()


def test_hom_vectors_at_the_root(cat3):
    ctx = context_for(cat3, cat3.root_object())
    assert [x.label for x in ctx.T] == [cat3.module(P).label for P in cat3.std.P]
    for i in range(cat3.n):
        assert ctx.ST(i) == cat3.shift(i)
        h = h_vector(ctx, [cat3.shift(i)])
        assert h == tuple(-int(j == i) for j in range(cat3.n))
    for X in cat3.pool:
        if not X.is_shift:
            assert dim_hom_vector(ctx, [X]) == X.rep.dims
            assert h_vector(ctx, [X]) == X.rep.dims


def test_context_is_cluster_tilting_only(cat3):
    with pytest.raises(ValueError):
        endomorphism_context(cat3, [cat3.shift(0), cat3.shift(1), cat3.module(cat3.std.P[0])])


def test_reduction_mod_p(cat3):
    reduced = cat3.reduce(3)
    assert reduced is cat3.reduce(3)
    assert [x.key for x in reduced.pool] == [x.key for x in cat3.pool]
    for X, Y in itertools.product(cat3.pool[:4], repeat=2):
        assert reduced.hom_dim(reduced.lookup(X.key), reduced.lookup(Y.key)) == cat3.hom_dim(X, Y)


def test_tilting_module_of_a2(cat2):
    P1, S1 = cat2.lookup(("M", (1, 1))), cat2.lookup(("M", (1, 0)))
    assert cat2.is_cluster_tilting((P1, S1))
    assert cat2.hom_dim(S1, cat2.lookup(("M", (0, 1)))) == 0


def test_quiver_of_the_root_context_is_the_quiver(dynkin_case):
    cat = ClusterCategory(dynkin_case.quiver)
    expected = [list(row) for row in dynkin_case.quiver.b]
    for T in (cat.root_object(), cat.projective_object()):
        ctx = endomorphism_context(cat, T)
        assert [list(row) for row in ctx.quiver.b] == expected
