import random

import pytest

from clusterlab.fields import QQ, PrimeField
from clusterlab.repkit import (
    Path,
    Rep,
    TauDomainError,
    decompose,
    direct_sum,
    ext1,
    find_exceptional,
    find_isomorphism,
    hom_dim,
    hom_space,
    identity,
    injective,
    is_brick,
    is_indecomposable,
    is_injective,
    is_isomorphic,
    is_projective,
    is_rigid,
    map_from_projective,
    nakayama,
    path_count,
    projective,
    projective_map,
    projective_presentation,
    simple,
    standard_modules,
    tau,
    tau_inv,
)
from tests.conftest import load_quiver


def test_path_algebra_dimension():
    assert path_count(load_quiver("a2")) == 3
    assert path_count(load_quiver("a3")) == 6
    assert path_count(load_quiver("kron3")) == 3 + 3 + 2


def test_standard_modules_a2(a2):
    std = standard_modules(a2, QQ)
    assert [P.dims for P in std.P] == [(1, 1), (0, 1)]
    assert [I.dims for I in std.I] == [(1, 0), (1, 1)]
    assert [S.dims for S in std.S] == [(1, 0), (0, 1)]
    assert all(is_projective(P) for P in std.P)
    assert all(is_injective(I) for I in std.I)
    assert not is_projective(std.S[0])


def test_hom_from_projective_is_evaluation(a3):
    std = standard_modules(a3, QQ)
    modules = list(std.P) + list(std.I) + list(std.S)
    for i, P in enumerate(std.P):
        for M in modules:
            assert hom_dim(P, M) == M.dims[i]
            assert ext1(P, M) == 0


def test_ext_between_simples(a2):
    S1, S2 = simple(a2, QQ, 0), simple(a2, QQ, 1)
    assert ext1(S1, S2) == 1
    assert ext1(S2, S1) == 0
    assert hom_dim(S1, S2) == 0


def test_euler_form_matches_dimension_vectors(a3):
    std = standard_modules(a3, QQ)
    modules = list(std.P) + list(std.I) + list(std.S)
    for M in modules:
        for N in modules:
            assert hom_dim(M, N) - ext1(M, N) == a3.euler_form(M.dims, N.dims)


def test_hom_space_basis_elements_are_morphisms(a3):
    P1, I3 = projective(a3, QQ, 0), injective(a3, QQ, 2)
    space = hom_space(P1, I3)
    assert space.dim == 1
    f = space.combine([QQ(1)])
    assert f.is_morphism()
    assert space.coordinates(f) == [1]


def test_auslander_reiten_translates_a2(a2):
    P2 = projective(a2, QQ, 1)
    S1 = simple(a2, QQ, 0)
    assert tau_inv(P2).dims == (1, 0)
    assert tau(S1).dims == (0, 1)
    assert tau(tau_inv(P2)).dims == P2.dims
    with pytest.raises(TauDomainError):
        tau_inv(injective(a2, QQ, 0))
    with pytest.raises(TauDomainError):
        tau(projective(a2, QQ, 0))


def test_knitting_a3_reaches_every_indecomposable(a3):
    found = set()
    for P in standard_modules(a3, QQ).P:
        M = P
        while True:
            found.add(M.dims)
            if is_injective(M):
                break
            M = tau_inv(M)
    assert len(found) == 6


def test_ar_formula(a3):
    std = standard_modules(a3, QQ)
    modules = list(std.I) + list(std.S)
    for M in modules:
        if is_projective(M):
            continue
        for N in modules:
            assert ext1(M, N) == hom_dim(N, tau(M))


def test_decompose(a3):
    std = standard_modules(a3, QQ)
    M = direct_sum([std.S[1], std.P[0], std.S[1]])
    parts = decompose(M)
    assert sorted(p.dims for p in parts) == sorted([(0, 1, 0), (0, 1, 0), (1, 1, 1)])
    assert all(is_indecomposable(p) for p in parts)
    assert is_indecomposable(std.P[0])


def test_find_isomorphism(a3):
    P1 = projective(a3, QQ, 0)
    f = find_isomorphism(P1, P1)
    assert f is not None and f.is_iso()
    assert find_isomorphism(P1, injective(a3, QQ, 0)) is None


def test_projective_maps_compose(a3):
    # The arrow 1 -> 2 gives P_2 -> P_1
    c = Path(0, 1, (0,))
    f = projective_map(a3, QQ, c)
    assert f.source.dims == (0, 1, 1) and f.target.dims == (1, 1, 1)
    assert f.is_morphism()
    g = map_from_projective(projective(a3, QQ, 0), 1, [QQ(1)])
    assert g.flat() == f.flat()


def test_rigid_bricks(a3):
    for P in standard_modules(a3, QQ).P:
        assert is_rigid(P)
        assert is_brick(P)
    M = direct_sum([simple(a3, QQ, 0), simple(a3, QQ, 0)])
    assert not is_brick(M)
    assert (identity(M) @ identity(M)).is_iso()


def test_exceptional_search_over_kronecker():
    q = load_quiver("kron3")
    M = find_exceptional(q, QQ, (1, 2, 0), random.Random(0))
    assert M is not None
    assert is_rigid(M) and is_brick(M)
    N = find_exceptional(q, QQ, (0, 1, 1), random.Random(0))
    assert N is not None and is_indecomposable(N)
    # (1, 1, 0) is the null root of the Kronecker part
    assert find_exceptional(q, QQ, (1, 1, 0), random.Random(0), tries=4) is None


def test_representations_over_prime_fields(a3):
    F = PrimeField(3)
    P1 = projective(a3, QQ, 0)
    assert P1.over(F).field == F
    assert hom_dim(P1.over(F), P1.over(F)) == 1
    data = P1.to_json()
    assert Rep.from_json(a3, data).dims == P1.dims


def test_zero_map_splits(a2):
    M = Rep(a2, QQ, (1, 1), (QQ.zero_matrix(1, 1),))
    assert sorted(p.dims for p in decompose(M)) == [(0, 1), (1, 0)]
    assert is_isomorphic(M, direct_sum([simple(a2, QQ, 0), simple(a2, QQ, 1)]))


def test_projective_presentation_is_exact(a3):
    std = standard_modules(a3, QQ)
    for M in list(std.S) + list(std.I):
        presentation, cover = projective_presentation(M)
        assert presentation.is_morphism() and cover.is_morphism()
        assert (cover @ presentation).is_zero()
        for v in range(a3.n):
            assert QQ.rank(cover.comps[v].rows, cover.comps[v].ncols) == M.dims[v]
            assert QQ.rank(presentation.comps[v].rows, presentation.comps[v].ncols) == (
                presentation.source.dims[v]
            )
        assert all(is_projective(P) for P in decompose(presentation.source))


def test_nakayama_sends_projectives_to_injectives(a3):
    for i in range(a3.n):
        assert is_isomorphic(nakayama(projective(a3, QQ, i)), injective(a3, QQ, i))


@pytest.mark.parametrize("name", ["a3", "d4", "kron3"])
def test_tau_undoes_tau_inv(name):
    q = load_quiver(name)
    for P in standard_modules(q, QQ).P:
        M = P
        for _ in range(2):
            if is_injective(M):
                break
            N = tau_inv(M)
            assert is_isomorphic(tau(N), M)
            M = N
