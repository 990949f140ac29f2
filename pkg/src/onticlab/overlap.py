"""Support sets, epistemic overlaps against the Born bound, and the
epistemicity predicates over a finite model's declared ensemble.

Supports use post-snapping exact zeros, so intersections, subsets, and
equalities are plain set algebra with no tolerances. Overlaps are ordered:
``epistemic_overlap(model, psi, phi)`` integrates mu_psi over the support
of mu_phi, and reports quote both directions rather than symmetrize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ontology import (
    ENSEMBLE_SCOPE_NOTE,
    REPRO_EPS,
    OntologicalModel,
    PreparationDistribution,
)
from .qcore import ORTHO_EPS, inner_product, same_projector

PREPARATION = "preparation"
RESPONSE = "response"


@dataclass(frozen=True)
class SupportSet:
    """Ontic-state indices where a measure or response column is positive."""

    kind: str
    owner: str
    members: frozenset[int]

    def __post_init__(self):
        if self.kind not in (PREPARATION, RESPONSE):
            raise ValueError(f"unknown support kind {self.kind!r}")
        object.__setattr__(self, "members", frozenset(self.members))

    @property
    def sorted_members(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    def __contains__(self, index: int) -> bool:
        return index in self.members


@dataclass(frozen=True)
class OverlapReport:
    """One ordered pair: overlap mass, Born weight, and derived readings.

    The bound overlap <= born + REPRO_EPS is flagged via ``bound_ok``,
    never clipped into compliance.
    """

    psi: str
    phi: str
    overlap: float
    born: float

    @property
    def deficit(self) -> float:
        return self.born - self.overlap

    @property
    def ratio(self) -> float:
        if self.born > 0.0:
            return self.overlap / self.born
        # born = 0 forces overlap = 0 in sound models, read as vacuously
        # maximal; a positive overlap here is a bound violation
        return 1.0 if self.overlap == 0.0 else math.inf

    @property
    def bound_ok(self) -> bool:
        return self.overlap <= self.born + REPRO_EPS


@dataclass(frozen=True)
class LemmaViolation:
    lemma: str
    location: str
    detail: str

    def render(self) -> str:
        return f"{self.lemma} at {self.location}: {self.detail}"


@dataclass(frozen=True)
class LemmaReport:
    """Outcome of the two structural lemmas over the declared ensemble:
    responses are unit on their state's support, and orthogonal states
    have disjoint supports."""

    checked_states: tuple[str, ...]
    orthogonal_pairs: tuple[tuple[str, str], ...]
    violations: tuple[LemmaViolation, ...]
    n_preparations: int
    n_measurements: int
    scope_note: str = ENSEMBLE_SCOPE_NOTE

    @property
    def ok(self) -> bool:
        return not self.violations

    def render_lines(self) -> list[str]:
        status = "pass" if self.ok else f"fail ({len(self.violations)} violations)"
        lines = [
            f"core lemmas: {status} [{self.scope_note}]",
            f"  states checked as outcomes: {', '.join(self.checked_states) or '(none)'}",
            f"  orthogonal pairs checked: {len(self.orthogonal_pairs)}",
        ]
        lines.extend("  " + v.render() for v in self.violations)
        return lines


@dataclass(frozen=True)
class DeficiencyEntry:
    """Support comparison for one state occurring as one measurement outcome."""

    state: str
    measurement: str
    outcome: int
    preparation_members: tuple[int, ...]
    response_members: tuple[int, ...]

    @property
    def subset_ok(self) -> bool:
        return set(self.preparation_members) <= set(self.response_members)

    @property
    def equal(self) -> bool:
        return set(self.preparation_members) == set(self.response_members)

    @property
    def extra_states(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.response_members) - set(self.preparation_members)))

    @property
    def missing_states(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.preparation_members) - set(self.response_members)))


@dataclass(frozen=True)
class DeficiencyReport:
    """Preparation support vs response support, per realized outcome."""

    entries: tuple[DeficiencyEntry, ...]
    skipped: tuple[str, ...]
    scope_note: str = ENSEMBLE_SCOPE_NOTE

    @property
    def all_subset_ok(self) -> bool:
        return all(e.subset_ok for e in self.entries)

    @property
    def all_equal(self) -> bool:
        return all(e.equal for e in self.entries)


def preparation_support(model: OntologicalModel, psi_label: str) -> SupportSet:
    """Indices with strictly positive preparation weight (exact, post-snap)."""
    p = model.preparation(psi_label)
    members = frozenset(j for j, w in enumerate(p.weights) if w > 0.0)
    return SupportSet(kind=PREPARATION, owner=psi_label, members=members)


def response_support(
    model: OntologicalModel, m_label: str, outcome_index: int
) -> SupportSet:
    """Indices whose response entry for the given outcome is positive."""
    r = model.response(m_label)
    if not 0 <= outcome_index < r.measurement.dim:
        raise IndexError(
            f"outcome {outcome_index} out of range for measurement {m_label!r}"
        )
    members = frozenset(
        j for j, row in enumerate(r.table) if row[outcome_index] > 0.0
    )
    return SupportSet(
        kind=RESPONSE, owner=f"{m_label}:{outcome_index}", members=members
    )


def _outcome_occurrences(
    model: OntologicalModel, prep: PreparationDistribution
) -> list[tuple[str, int]]:
    """(measurement label, outcome index) pairs whose outcome projector
    matches the preparation's state."""
    hits = []
    for r in model.responses:
        for k, ket in enumerate(r.measurement.outcomes):
            if same_projector(prep.ket, ket):
                hits.append((r.measurement.label, k))
    return hits


def check_core_lemmas(model: OntologicalModel) -> LemmaReport:
    """Verify the two support lemmas, localizing every failure.

    (a) Wherever a preparation's state appears as a measurement outcome,
    the response entry is exactly 1 on every support point of that
    preparation. (b) Preparations with orthogonal kets have disjoint
    supports. Both are consequences of reproduction, so a failure here
    pinpoints what a reproduction residual only hints at.
    """
    violations: list[LemmaViolation] = []
    checked: list[str] = []
    for p in model.preparations:
        occurrences = _outcome_occurrences(model, p)
        if not occurrences:
            continue
        checked.append(p.state_label)
        supp = preparation_support(model, p.state_label)
        for m_label, k in occurrences:
            table = model.response(m_label).table
            for j in supp.sorted_members:
                if table[j][k] != 1.0:
                    violations.append(
                        LemmaViolation(
                            lemma="unit-response-on-support",
                            location=(
                                f"prep {p.state_label}, meas {m_label}, "
                                f"outcome {k}, state {model.space.states[j]}"
                            ),
                            detail=f"response entry is {table[j][k]!r}, expected exactly 1",
                        )
                    )
    ortho_pairs: list[tuple[str, str]] = []
    preps = model.preparations
    for i in range(len(preps)):
        for j in range(i + 1, len(preps)):
            a, b = preps[i], preps[j]
            if abs(inner_product(a.ket, b.ket)) > ORTHO_EPS:
                continue
            ortho_pairs.append((a.state_label, b.state_label))
            shared = (
                preparation_support(model, a.state_label).members
                & preparation_support(model, b.state_label).members
            )
            if shared:
                names = ", ".join(model.space.states[s] for s in sorted(shared))
                violations.append(
                    LemmaViolation(
                        lemma="orthogonal-support-disjointness",
                        location=f"preps {a.state_label}, {b.state_label}",
                        detail=f"orthogonal states share support on {{{names}}}",
                    )
                )
    return LemmaReport(
        checked_states=tuple(checked),
        orthogonal_pairs=tuple(ortho_pairs),
        violations=tuple(violations),
        n_preparations=len(model.preparations),
        n_measurements=len(model.responses),
    )


def epistemic_overlap(
    model: OntologicalModel, psi_label: str, phi_label: str
) -> OverlapReport:
    """Mass mu_psi places on the support of mu_phi, beside the Born weight."""
    psi = model.preparation(psi_label)
    phi = model.preparation(phi_label)
    supp = preparation_support(model, phi_label)
    overlap = math.fsum(psi.weights[j] for j in supp.sorted_members)
    born = abs(inner_product(phi.ket, psi.ket)) ** 2
    return OverlapReport(psi=psi_label, phi=phi_label, overlap=overlap, born=born)


def all_overlaps(model: OntologicalModel) -> tuple[OverlapReport, ...]:
    """Every ordered preparation pair, in declaration order."""
    labels = [p.state_label for p in model.preparations]
    return tuple(
        epistemic_overlap(model, psi, phi) for psi in labels for phi in labels
    )


def is_psi_epistemic(
    model: OntologicalModel,
) -> tuple[bool, tuple[str, str] | None]:
    """Whether some distinct non-orthogonal preparation pair shares support.

    Returns the first witnessing pair in declaration order, or None when
    every such pair has disjoint supports (the model is then ontic over
    its declared ensemble).
    """
    preps = model.preparations
    if len(preps) < 2:
        raise ValueError("predicate undefined for fewer than two preparations")
    supports = {
        p.state_label: preparation_support(model, p.state_label).members
        for p in preps
    }
    for i in range(len(preps)):
        for j in range(i + 1, len(preps)):
            a, b = preps[i], preps[j]
            if same_projector(a.ket, b.ket):
                continue
            if abs(inner_product(a.ket, b.ket)) <= ORTHO_EPS:
                continue
            if supports[a.state_label] & supports[b.state_label]:
                return True, (a.state_label, b.state_label)
    return False, None


def is_maximally_epistemic(
    model: OntologicalModel,
) -> tuple[bool, tuple[OverlapReport, ...]]:
    """Whether overlap equals Born weight for every ordered pair.

    Failing pairs come back as full reports; their ``deficit`` is the
    shortfall born - overlap.
    """
    failing = tuple(
        rep
        for rep in all_overlaps(model)
        if abs(rep.overlap - rep.born) > REPRO_EPS
    )
    return (not failing, failing)


def quantum_deficiency_check(model: OntologicalModel) -> DeficiencyReport:
    """Compare preparation and response supports per realized outcome.

    The inclusion preparation-side into response-side must hold in any
    model passing reproduction; equality everywhere is the deficiency-free
    condition that maximal epistemicity forces. States never realized as
    an outcome are listed as skipped rather than silently passed.
    """
    entries: list[DeficiencyEntry] = []
    skipped: list[str] = []
    for p in model.preparations:
        occurrences = _outcome_occurrences(model, p)
        if not occurrences:
            skipped.append(p.state_label)
            continue
        prep_members = preparation_support(model, p.state_label).sorted_members
        for m_label, k in occurrences:
            resp_members = response_support(model, m_label, k).sorted_members
            entries.append(
                DeficiencyEntry(
                    state=p.state_label,
                    measurement=m_label,
                    outcome=k,
                    preparation_members=prep_members,
                    response_members=resp_members,
                )
            )
    return DeficiencyReport(entries=tuple(entries), skipped=tuple(skipped))
