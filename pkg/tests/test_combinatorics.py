import pytest

from clusterlab.combinatorics import (
    EnumerationBudgetExceeded,
    Quiver,
    QuiverParseError,
    UnresolvedExchange,
    almost_positive_root_count,
    canonical_key,
    enumerate_seeds,
    format_trace,
    mutate_quiver,
    mutate_seed,
    parse_quiver,
    parse_trace,
    positive_roots,
    root_seed,
)
from clusterlab.laurent import render
from tests.conftest import DynkinCase, load_quiver


def test_parse_quiver_with_comments_and_multiplicities():
    q = parse_quiver("# generalized Kronecker\n1 -> 2 *3  # three arrows\n\n2 -> 3\n")
    assert q.n == 3
    assert q.b[0][1] == 3 and q.b[1][0] == -3
    assert q.arrows() == [(0, 1, 3), (1, 2, 1)]
    assert parse_quiver(q.to_text()) == q


@pytest.mark.parametrize(
    "text,line",
    [
        ("1 -> 2\nnonsense\n", 2),
        ("1 -> 1\n", 1),
        ("0 -> 1\n", 1),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(QuiverParseError) as info:
        parse_quiver(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_parse_rejects_cycles():
    with pytest.raises(QuiverParseError, match="2-cycles"):
        parse_quiver("1 -> 2\n2 -> 1\n")
    with pytest.raises(QuiverParseError, match="acyclic"):
        parse_quiver("1 -> 2\n2 -> 3\n3 -> 1\n")
    with pytest.raises(QuiverParseError):
        parse_quiver("# nothing here\n")


def test_matrix_mutation():
    q = load_quiver("a3")
    mutated = mutate_quiver(q, 1)
    # Mutating the middle of 1 -> 2 -> 3 reverses both arrows and adds 1 -> 3
    assert mutated.b == ((0, -1, 1), (1, 0, -1), (-1, 1, 0))
    assert not mutated.is_acyclic()
    for k in range(3):
        assert mutate_quiver(mutate_quiver(q, k), k) == q
    with pytest.raises(ValueError):
        mutate_quiver(q, 3)


def test_dynkin_recognition(dynkin_case: DynkinCase):
    assert dynkin_case.quiver.is_dynkin()
    assert len(positive_roots(dynkin_case.quiver)) == dynkin_case.positive_roots
    assert almost_positive_root_count(dynkin_case.quiver) == dynkin_case.variables


def test_non_dynkin_recognition():
    assert not load_quiver("kron3").is_dynkin()
    assert not parse_quiver("1 -> 2 *2\n").is_dynkin()
    assert not parse_quiver("1 -> 2\n2 -> 3\n3 -> 4\n4 -> 5\n2 -> 6\n4 -> 7\n").is_dynkin()


def test_euler_form():
    q = load_quiver("a2")
    assert q.euler_form((1, 0), (0, 1)) == -1
    assert q.euler_form((0, 1), (1, 0)) == 0
    assert q.euler_form((1, 1), (1, 1)) == 1


def test_enumeration_counts(dynkin_case: DynkinCase):
    registry = enumerate_seeds(root_seed(dynkin_case.quiver))
    assert registry.complete
    assert len(registry.variables) == dynkin_case.variables
    assert len(registry.seeds) == dynkin_case.seeds


def test_a2_variables():
    registry = enumerate_seeds(root_seed(load_quiver("a2")))
    assert sorted(registry.variables) == sorted(
        [
            "u1",
            "u2",
            "(1 + u2) / u1",
            "(1 + u1) / u2",
            "(1 + u1 + u2) / (u1*u2)",
        ]
    )


def test_exchange_relation():
    seed = root_seed(load_quiver("a2"))
    child = mutate_seed(seed, 0)
    assert render(child.vars[0]) == "(1 + u2) / u1"
    assert child.trace == (0,)
    assert child.tilt is None
    assert canonical_key(mutate_seed(child, 0)) == canonical_key(seed)


def test_enumeration_is_independent_of_workers():
    q = load_quiver("a4")
    serial = enumerate_seeds(root_seed(q))
    parallel = enumerate_seeds(root_seed(q), workers=4)
    assert list(serial.variables) == list(parallel.variables)
    assert [s.trace for s in serial.seeds.values()] == [s.trace for s in parallel.seeds.values()]


def _partial_exchange(seed, k):
    if k == 1:
        raise UnresolvedExchange(f"no partner for {seed.tilt[k]}")
    return render(mutate_seed(seed, k).vars[k])


def test_unresolved_exchanges_are_counted_once_per_mutation():
    q = load_quiver("a3")
    tilt = ("u1", "u2", "u3")
    serial = enumerate_seeds(root_seed(q, tilt), exchange=_partial_exchange)
    parallel = enumerate_seeds(root_seed(q, tilt), exchange=_partial_exchange, workers=4)
    assert serial.unresolved > 0
    assert parallel.unresolved == serial.unresolved
    assert len(serial.seeds) == 14


def test_non_dynkin_needs_depth():
    q = load_quiver("kron3")
    with pytest.raises(ValueError):
        enumerate_seeds(root_seed(q))
    registry = enumerate_seeds(root_seed(q), depth=2)
    assert not registry.complete
    assert registry.depth == 2
    # Mutations at the unconnected vertices 1 and 3 commute
    assert len(registry.seeds) == 1 + 3 + 5


def test_seed_budget():
    with pytest.raises(EnumerationBudgetExceeded) as info:
        enumerate_seeds(root_seed(load_quiver("a3")), max_seeds=3)
    assert info.value.budget == 3
    assert len(info.value.partial.seeds) == 3


def test_traces():
    assert format_trace(()) == "id"
    assert format_trace((0, 2, 1)) == "mu(1,3,2)"
    assert parse_trace("mu(1,3,2)", 3) == (0, 2, 1)
    assert parse_trace("id", 3) == ()
    with pytest.raises(ValueError):
        parse_trace("mu(4)", 3)
    with pytest.raises(ValueError):
        parse_trace("nu(1)", 3)


def test_seed_lookup_by_trace():
    registry = enumerate_seeds(root_seed(load_quiver("a2")))
    assert registry.seed_at((0,)) is not None
    assert registry.seed_at((5, 5)) is None


def test_quiver_validation():
    with pytest.raises(ValueError):
        Quiver(((0, 1), (1, 0)))
