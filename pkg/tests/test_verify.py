import random

import pytest

from clusterlab.laurent import LaurentPoly
from clusterlab.reports import AuditRecord, Verdict, summarize
from clusterlab.verify import (
    Lab,
    check_compatibility,
    compatibility_campaign,
    denominator_lemma_audit,
    exchange_steps,
    ordered_map,
    run_campaign,
    scan_end_nontrivial,
    verify_characters,
    verify_structure,
    verify_theorem_main,
)
from tests.conftest import load_quiver


@pytest.fixture
def lab2(a2):
    return Lab(a2)


@pytest.fixture
def lab3(a3):
    return Lab(a3)


def test_summary_precedence():
    assert summarize([Verdict.passed, Verdict.skipped]).verdict == Verdict.passed
    assert summarize([Verdict.passed, Verdict.unproven]).verdict == Verdict.inconclusive
    assert summarize([Verdict.inconclusive, Verdict.failed]).verdict == Verdict.failed
    assert summarize([Verdict.failed]).exit_code == 2
    assert summarize([Verdict.unproven]).exit_code == 3
    assert summarize([]).exit_code == 0


def test_audit_record():
    audit = AuditRecord(name="x")
    audit.check(True, "fine")
    assert audit.finish().verdict == Verdict.passed
    audit.unproven.append("somewhere")
    assert audit.finish().verdict == Verdict.unproven
    audit.check(False, "broken")
    assert audit.finish().verdict == Verdict.failed
    assert audit.checked == 2 and audit.failures == ["broken"]


def test_depth_required_outside_dynkin_type(kron3):
    with pytest.raises(ValueError):
        Lab(kron3)
    assert not Lab(kron3, depth=1).complete


def test_one_step_per_edge_of_the_exchange_graph(dynkin_case):
    lab = Lab(dynkin_case.quiver)
    steps = exchange_steps(lab.category, lab.registry)
    assert len(steps) == dynkin_case.seeds * dynkin_case.quiver.n // 2
    for step in steps:
        assert lab.category.ext1_c(step.U, step.Ustar) == 1


def test_compatibility_skips_the_translate(lab2):
    cat = lab2.category
    step = exchange_steps(cat, lab2.registry)[0]
    report = check_compatibility(cat, cat.tau_c_inv(step.U), step)
    assert report.skipped
    assert report.verdict == Verdict.skipped
    assert report.lhs is None


def test_every_indecomposable_is_compatible_in_type_a(lab3):
    for N in lab3.category.pool:
        reports = compatibility_campaign(lab3, N)
        assert reports
        assert all(r.verdict != Verdict.failed for r in reports)
        assert any(r.verdict == Verdict.passed for r in reports)


@pytest.mark.parametrize("trace", [(), (0,), (1, 0)])
def test_main_theorem_a2(lab2, trace):
    report = verify_theorem_main(lab2, trace)
    assert report.hypothesis.holds
    assert report.complete
    assert len(report.records) == 5
    assert all(r.verdict == Verdict.passed for r in report.records)
    assert report.summary.verdict == Verdict.passed


def test_main_theorem_a3(lab3):
    for trace in [(), (2,), (0, 1)]:
        report = verify_theorem_main(lab3, trace)
        assert len(report.records) == 9
        assert report.summary.verdict == Verdict.passed, report.model_dump()


def test_main_theorem_at_the_root_reads_dimension_vectors(lab3):
    report = verify_theorem_main(lab3, ())
    by_object = {r.object: r for r in report.records}
    assert by_object["dim:1,1,1"].expected == [1, 1, 1]
    assert by_object["sp:2"].actual == [0, -1, 0]


def test_no_converse_witness_in_dynkin_type(lab3):
    assert scan_end_nontrivial(lab3) == []
    assert run_campaign(lab3, "converse", []) == []


def test_unknown_campaign(lab2):
    with pytest.raises(ValueError):
        run_campaign(lab2, "nonsense", [()])


def test_structure(lab2):
    report = verify_structure(lab2, (0,))
    names = [a.name for a in report.audits]
    assert "two-calabi-yau" in names and "coordinate-change" in names
    assert report.summary.verdict == Verdict.passed, report.model_dump()


@pytest.mark.parametrize("trace", [(), (1,)])
def test_characters(lab2, trace):
    report = verify_characters(lab2, trace)
    assert report.summary.verdict == Verdict.passed, report.model_dump()
    values = next(a for a in report.audits if a.name == "character-equals-variable")
    assert values.checked == 5


def test_denominator_lemma():
    audit = denominator_lemma_audit(3, random.Random(1), pairs=50)
    assert audit.verdict == Verdict.passed
    assert audit.checked == 150


def test_reports_do_not_depend_on_workers(a3):
    serial = verify_theorem_main(Lab(a3), (1,))
    parallel = verify_theorem_main(Lab(a3, workers=3), (1,))
    assert serial.model_dump() == parallel.model_dump()


def test_ordered_map_keeps_order():
    items = list(range(20))
    assert ordered_map(lambda x: x * x, items, workers=4) == [x * x for x in items]


def test_kronecker_at_small_depth():
    lab = Lab(load_quiver("kron3"), depth=1, cap_dim=6)
    report = verify_theorem_main(lab, ())
    assert report.records
    assert report.summary.verdict in (Verdict.passed, Verdict.inconclusive)
    assert LaurentPoly.variable(3, 0) in [s.vars[0] for s in lab.registry.seeds.values()]


@pytest.fixture(scope="module")
def a3_lab():
    return Lab(load_quiver("a3"))


@pytest.fixture(scope="module")
def d4_lab():
    return Lab(load_quiver("d4"))


def _trace_at(lab, index):
    return sorted(lab.traces())[index]


@pytest.mark.parametrize("index", range(14))
def test_main_theorem_at_every_a3_seed(a3_lab, index):
    assert len(a3_lab.traces()) == 14
    report = verify_theorem_main(a3_lab, _trace_at(a3_lab, index))
    assert len(report.records) == 9
    assert report.summary.verdict == Verdict.passed, report.model_dump()


@pytest.mark.parametrize("index", range(50))
def test_main_theorem_at_every_d4_seed(d4_lab, index):
    assert len(d4_lab.traces()) == 50
    report = verify_theorem_main(d4_lab, _trace_at(d4_lab, index))
    assert len(report.records) == 16
    assert report.summary.verdict == Verdict.passed, report.model_dump()


@pytest.mark.parametrize("index", range(14))
def test_characters_and_multiplication_at_every_a3_seed(a3_lab, index):
    report = verify_characters(a3_lab, _trace_at(a3_lab, index))
    assert report.summary.verdict == Verdict.passed, report.model_dump()
    audits = {a.name: a for a in report.audits}
    assert audits["character-equals-variable"].checked == 9
    assert audits["multiplication-formula"].checked > 0
    assert audits["multiplication-formula"].verdict == Verdict.passed


@pytest.mark.parametrize("index", range(14))
def test_quiver_of_each_a3_context_is_the_seed_quiver(a3_lab, index):
    trace = _trace_at(a3_lab, index)
    ctx = a3_lab.context(trace)
    seed = a3_lab.tilting_seed(trace)
    assert [list(row) for row in ctx.quiver.b] == [list(row) for row in seed.quiver.b]
    report = verify_structure(a3_lab, trace)
    algebra = next(a for a in report.audits if a.name == "endomorphism-algebra")
    assert algebra.verdict == Verdict.passed


def test_kronecker_converse_beyond_the_first_mutation():
    lab = Lab(load_quiver("kron3"), depth=2, cap_dim=6)
    witnesses = scan_end_nontrivial(lab)
    assert all(w.end_dim > 1 for w in witnesses)
    reports = run_campaign(lab, "converse", [])
    assert len(reports) == len(witnesses)
    for report in reports:
        assert report.summary.verdict in (Verdict.passed, Verdict.inconclusive)
        if report.summary.verdict == Verdict.passed:
            assert report.records
            assert all(r.verdict == Verdict.failed for r in report.records)
        else:
            assert not report.records
