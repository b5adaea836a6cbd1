"""JSON schemas for registries, characters and verification campaigns."""

from __future__ import annotations

from enum import Enum
from typing import Iterable, List, Optional

from pydantic import BaseModel

from clusterlab.character import CharacterResult
from clusterlab.combinatorics import Registry, format_trace
from clusterlab.fdalg import GrassmannianEuler
from clusterlab.laurent import denominator_vector, render


class Verdict(str, Enum):
    passed = "pass"
    failed = "fail"
    skipped = "skipped"
    unproven = "unproven-step"
    inconclusive = "inconclusive"


class Summary(BaseModel):
    verdict: Verdict = Verdict.passed
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    unproven: int = 0
    inconclusive: int = 0

    @property
    def exit_code(self) -> int:
        if self.verdict == Verdict.failed:
            return 2
        if self.verdict == Verdict.inconclusive:
            return 3
        return 0


def summarize(verdicts: Iterable[Verdict]) -> Summary:
    s = Summary()
    for v in verdicts:
        if v == Verdict.passed:
            s.passed += 1
        elif v == Verdict.failed:
            s.failed += 1
        elif v == Verdict.skipped:
            s.skipped += 1
        elif v == Verdict.unproven:
            s.unproven += 1
        else:
            s.inconclusive += 1
    if s.failed:
        s.verdict = Verdict.failed
    elif s.unproven or s.inconclusive:
        s.verdict = Verdict.inconclusive
    return s


class CompatibilityReport(BaseModel):
    seed: str
    vertex: int
    object: str
    U: str
    Ustar: str
    E: List[str] = []
    Eprime: List[str] = []
    lhs: Optional[int] = None
    rhs: Optional[int] = None
    skipped: bool = False
    verdict: Verdict


class CompatibilitySet(BaseModel):
    quiver: str
    depth: Optional[int] = None
    object: str
    records: List[CompatibilityReport] = []
    summary: Summary


class DenominatorRecord(BaseModel):
    variable: str
    object: str
    expected: List[int]
    actual: List[int]
    verdict: Verdict


class AuditRecord(BaseModel):
    name: str
    checked: int = 0
    failures: List[str] = []
    unproven: List[str] = []
    verdict: Verdict = Verdict.passed

    def check(self, ok: bool, message: str):
        self.checked += 1
        if not ok:
            self.failures.append(message)

    def finish(self) -> AuditRecord:
        if self.failures:
            self.verdict = Verdict.failed
        elif self.unproven:
            self.verdict = Verdict.unproven
        return self


class Hypothesis(BaseModel):
    holds: bool = True
    checked: int = 0
    skipped: int = 0
    failures: List[CompatibilityReport] = []


class ConverseWitness(BaseModel):
    trace: str
    summand: int
    object: str
    end_dim: int


class VerificationReport(BaseModel):
    campaign: str
    quiver: str
    trace: str
    depth: Optional[int] = None
    seed: int = 0
    complete: bool = True
    hypothesis: Optional[Hypothesis] = None
    witness: Optional[ConverseWitness] = None
    records: List[DenominatorRecord] = []
    audits: List[AuditRecord] = []
    summary: Summary = Summary()

    def finish(self) -> VerificationReport:
        verdicts = [r.verdict for r in self.records] + [a.verdict for a in self.audits]
        self.summary = summarize(verdicts)
        return self


class ReportSet(BaseModel):
    campaign: str
    quiver: str
    depth: Optional[int] = None
    reports: List[VerificationReport] = []
    summary: Summary = Summary()

    def finish(self) -> ReportSet:
        self.summary = summarize(r.summary.verdict for r in self.reports)
        return self


class VariableEntry(BaseModel):
    key: str
    denominator: List[int]
    object: Optional[str] = None
    trace: str


class SeedEntry(BaseModel):
    trace: str
    cluster: List[str]
    tilt: Optional[List[str]] = None
    exchange_matrix: List[List[int]]


class RegistryReport(BaseModel):
    quiver: str
    depth: Optional[int] = None
    complete: bool
    unresolved: int = 0
    seed_count: int
    variable_count: int
    seeds: List[SeedEntry] = []
    variables: List[VariableEntry] = []


def registry_report(registry: Registry, prefix: str = "u") -> RegistryReport:
    return RegistryReport(
        quiver=registry.root.quiver.to_text(),
        depth=registry.depth,
        complete=registry.complete,
        unresolved=registry.unresolved,
        seed_count=len(registry.seeds),
        variable_count=len(registry.variables),
        seeds=[
            SeedEntry(
                trace=format_trace(s.trace),
                cluster=[render(v, prefix) for v in s.vars],
                tilt=[x.label for x in s.tilt] if s.tilt is not None else None,
                exchange_matrix=[list(row) for row in s.quiver.b],
            )
            for s in registry.seeds.values()
        ],
        variables=[
            VariableEntry(
                key=render(v.poly, prefix),
                denominator=list(denominator_vector(v.poly)),
                object=v.obj.label if v.obj is not None else None,
                trace=format_trace(v.trace),
            )
            for v in registry.variables.values()
        ],
    )


class LedgerTerm(BaseModel):
    summand: str
    e: List[int]
    chi: int
    exponent: List[int]


class CharacterReport(BaseModel):
    quiver: str
    trace: str
    object: str
    value: str
    denominator: Optional[List[int]] = None
    ledger: Optional[List[LedgerTerm]] = None


def character_report(
    quiver: str, trace: str, obj: str, result: CharacterResult, ledger: bool
) -> CharacterReport:
    value = result.value
    return CharacterReport(
        quiver=quiver,
        trace=trace,
        object=obj,
        value=render(value, "x"),
        denominator=None if value.is_zero else list(denominator_vector(value)),
        ledger=[
            LedgerTerm(summand=t.summand, e=list(t.e), chi=t.chi, exponent=list(t.exponent))
            for t in result.terms
        ]
        if ledger
        else None,
    )


class GrassmannianEntry(BaseModel):
    e: List[int]
    chi: int
    counts: dict
    polynomial: str


class GrassmannianReport(BaseModel):
    quiver: str
    trace: str
    object: str
    dims: List[int]
    grassmannians: List[GrassmannianEntry] = []


def grassmannian_entry(g: GrassmannianEuler) -> GrassmannianEntry:
    return GrassmannianEntry(
        e=list(g.e), chi=g.value, counts={str(p): c for p, c in g.counts.items()}, polynomial=g.polynomial
    )
