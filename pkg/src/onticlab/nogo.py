"""End-to-end pipeline: ray set to colorability certificate to LP verdict
to constructed model to support decomposition, with a single conclusion.

The pipeline deliberately materializes every intermediate step instead of
stopping at the first decisive certificate, so a report doubles as an
auditable walkthrough: each stage appends to a fixed-order trail, and the
renderers emit byte-identical output for identical inputs (fixed ordering,
fixed float formatting, no timestamps).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path

from .kscolor import (
    BUDGET_EXHAUSTED,
    DEFAULT_BUDGET,
    UNCOLORABLE,
    ColorabilityCertificate,
    CountResult,
    count_colorings,
    load_rayset,
    search_coloring,
)
from .lpfeas import (
    FEASIBLE,
    INFEASIBLE,
    LPOutcome,
    build_lp,
    model_from_colorings,
    parse_prep_file,
    solve_feasibility,
)
from .ontology import (
    ENSEMBLE_SCOPE_NOTE,
    REPRO_EPS,
    OntologicalModel,
    deterministic_response_model,
    validate_axioms,
    validate_reproduction,
)
from .overlap import (
    OverlapReport,
    all_overlaps,
    check_core_lemmas,
    epistemic_overlap,
    is_maximally_epistemic,
    is_psi_epistemic,
    preparation_support,
    quantum_deficiency_check,
)
from .qcore import same_projector

NO_MAX_EPISTEMIC = "no-maximally-epistemic-model"
CANDIDATE_CONSTRUCTED = "maximally-epistemic-candidate-constructed"
INCONCLUSIVE = "inconclusive"

ENV_BUDGET = "ONTICLAB_BUDGET"

DEFAULT_COUNT_CAP = 100_000


def format_float(x: float) -> str:
    """Fixed 12-significant-digit rendering keeps reports byte-stable."""
    return f"{x:.12g}"


def resolve_budget(explicit: int | None = None) -> int:
    """Explicit argument, then the ONTICLAB_BUDGET variable, then default."""
    if explicit is not None:
        if explicit < 1:
            raise ValueError(f"budget must be positive, got {explicit}")
        return explicit
    raw = os.environ.get(ENV_BUDGET)
    if raw is not None:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(
                f"{ENV_BUDGET} must be an integer, got {raw!r}"
            ) from None
        if value < 1:
            raise ValueError(f"{ENV_BUDGET} must be positive, got {value}")
        return value
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class DecompositionReport:
    """Coverage of one preparation's support by one measurement's outcome
    supports, with the overlap and Born mass sums."""

    psi: str
    measurement: str
    outcome_states: tuple[str, ...]
    psi_support: tuple[int, ...]
    union_members: tuple[int, ...]
    overlap_sum: float
    born_sum: float

    @property
    def uncovered(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.psi_support) - set(self.union_members)))

    @property
    def covered(self) -> bool:
        return not self.uncovered

    @property
    def sum_ok(self) -> bool:
        return abs(self.overlap_sum - 1.0) <= REPRO_EPS


@dataclass(frozen=True)
class ProjectorClass:
    """Occurrences of one projector across measurements, with its read-off
    value; value is None when the occurrences disagree (contextuality)."""

    occurrences: tuple[tuple[str, int], ...]
    value: int | None


@dataclass(frozen=True)
class ValueAssignment:
    """The 0/1 outcome values one ontic state induces, checked for
    noncontextuality and the one-per-basis rule."""

    ontic_index: int
    state_label: str
    entries: tuple[tuple[str, int, int], ...]
    classes: tuple[ProjectorClass, ...]
    violations: tuple[str, ...]

    @property
    def consistent(self) -> bool:
        return not self.violations

    def value(self, measurement: str, outcome: int) -> int:
        for m, k, v in self.entries:
            if m == measurement and k == outcome:
                return v
        raise KeyError(f"no entry for {measurement!r} outcome {outcome}")


@dataclass(frozen=True)
class AuditEntry:
    stage: str
    status: str
    detail: str


@dataclass(frozen=True)
class NoGoReport:
    """Everything the pipeline established, in the order it ran."""

    source: str
    dim: int
    n_rays: int
    n_bases: int
    n_free_rays: int
    prep_labels: tuple[str, ...]
    colorability: ColorabilityCertificate
    coloring_count: CountResult | None
    lp: LPOutcome | None
    model: OntologicalModel | None
    overlaps: tuple[OverlapReport, ...]
    decompositions: tuple[DecompositionReport, ...]
    conclusion: str
    audit: tuple[AuditEntry, ...]
    scope_note: str = ENSEMBLE_SCOPE_NOTE


def decompose_support(
    model: OntologicalModel, psi_label: str, m_label: str
) -> DecompositionReport:
    """Check that the outcome states' supports cover the preparation's and
    that the overlap masses sum to 1.

    Each outcome of the measurement must itself be a declared preparation
    (matched as a projector); otherwise the decomposition is undefined and
    the missing outcomes are reported in the raised error.
    """
    psi = model.preparation(psi_label)
    resp = model.response(m_label)
    outcome_states: list[str] = []
    missing: list[int] = []
    for k, ket in enumerate(resp.measurement.outcomes):
        match = None
        for p in model.preparations:
            if same_projector(p.ket, ket):
                match = p.state_label
                break
        if match is None:
            missing.append(k)
        else:
            outcome_states.append(match)
    if missing:
        raise ValueError(
            f"measurement {m_label!r} outcomes {missing} are not declared "
            f"as preparations; cannot decompose"
        )
    union: set[int] = set()
    for label in outcome_states:
        union |= preparation_support(model, label).members
    overlap_sum = math.fsum(
        epistemic_overlap(model, psi_label, label).overlap
        for label in outcome_states
    )
    born_sum = math.fsum(
        epistemic_overlap(model, psi_label, label).born
        for label in outcome_states
    )
    return DecompositionReport(
        psi=psi_label,
        measurement=m_label,
        outcome_states=tuple(outcome_states),
        psi_support=preparation_support(model, psi_label).sorted_members,
        union_members=tuple(sorted(union)),
        overlap_sum=overlap_sum,
        born_sum=born_sum,
    )


def extract_value_assignment(
    model: OntologicalModel, ontic_index: int
) -> ValueAssignment:
    """Read off the deterministic outcome values one ontic state carries.

    Projectors recurring across measurements are grouped (matched up to
    global phase) and must agree; each measurement must fire exactly one
    outcome. Violations are reported, not raised.
    """
    if not 0 <= ontic_index < model.space.size:
        raise IndexError(f"ontic index {ontic_index} out of range")
    if not deterministic_response_model(model.space, model.responses):
        raise ValueError("model responses are not deterministic")

    entries: list[tuple[str, int, int]] = []
    violations: list[str] = []
    for r in model.responses:
        row = r.table[ontic_index]
        for k, x in enumerate(row):
            entries.append((r.measurement.label, k, int(x)))
        fired = sum(int(x) for x in row)
        if fired != 1:
            violations.append(
                f"measurement {r.measurement.label}: {fired} outcomes fire, "
                f"expected exactly 1"
            )

    # group occurrences of the same projector across measurements
    classes: list[ProjectorClass] = []
    reps: list[tuple[object, list[tuple[str, int]]]] = []
    for r in model.responses:
        for k, ket in enumerate(r.measurement.outcomes):
            for rep_ket, occ in reps:
                if same_projector(rep_ket, ket):
                    occ.append((r.measurement.label, k))
                    break
            else:
                reps.append((ket, [(r.measurement.label, k)]))
    lookup = {(m, k): v for m, k, v in entries}
    for _, occ in reps:
        values = {lookup[o] for o in occ}
        if len(values) == 1:
            classes.append(ProjectorClass(tuple(occ), values.pop()))
        else:
            classes.append(ProjectorClass(tuple(occ), None))
            where = ", ".join(f"{m}:{k}" for m, k in occ)
            violations.append(
                f"contextual value: projector at {where} read as both 0 and 1"
            )

    return ValueAssignment(
        ontic_index=ontic_index,
        state_label=model.space.states[ontic_index],
        entries=tuple(entries),
        classes=tuple(classes),
        violations=tuple(violations),
    )


def run_nogo_pipeline(
    rayfile: str | Path,
    prepfile: str | Path,
    budget: int | None = None,
    count_cap: int = DEFAULT_COUNT_CAP,
    source_label: str | None = None,
) -> NoGoReport:
    """Execute the full argument over one ray set and preparation ensemble.

    Conclusion rules: an uncolorable ray set in dim >= 3 rules the model
    class out; a colorable set whose LP is feasible yields a constructed
    candidate (its epistemicity is measured, not asserted); everything
    else, including budget exhaustion and LP stalls, stays inconclusive.
    """
    budget = resolve_budget(budget)
    if source_label is not None:
        source = source_label
    elif isinstance(rayfile, Path) or "\n" not in str(rayfile):
        source = str(rayfile)
    else:
        source = "<inline ray data>"
    rs = load_rayset(rayfile)
    prep_dim, labeled = parse_prep_file(prepfile)
    if prep_dim != rs.dim:
        raise ValueError(
            f"preparation dim {prep_dim} does not match ray set dim {rs.dim}"
        )
    labels = [label for label, _ in labeled]
    kets = [ket for _, ket in labeled]

    audit: list[AuditEntry] = []
    audit.append(
        AuditEntry(
            "ensemble",
            "info",
            f"dim {rs.dim}, {len(rs.rays)} rays, {len(rs.bases)} bases, "
            f"{len(rs.free_rays)} free rays, {len(labels)} preparations",
        )
    )

    cert = search_coloring(rs, budget=budget)
    audit.append(
        AuditEntry(
            "colorability",
            cert.verdict,
            f"nodes {cert.stats.nodes}, propagations {cert.stats.propagations}, "
            f"budget {cert.budget}",
        )
    )

    coloring_count: CountResult | None = None
    lp: LPOutcome | None = None
    model: OntologicalModel | None = None
    overlaps: tuple[OverlapReport, ...] = ()
    decompositions: list[DecompositionReport] = []

    if cert.verdict == BUDGET_EXHAUSTED:
        audit.append(
            AuditEntry(
                "conclusion",
                INCONCLUSIVE,
                "search budget exhausted before a verdict",
            )
        )
        return NoGoReport(
            source=source,
            dim=rs.dim,
            n_rays=len(rs.rays),
            n_bases=len(rs.bases),
            n_free_rays=len(rs.free_rays),
            prep_labels=tuple(labels),
            colorability=cert,
            coloring_count=None,
            lp=None,
            model=None,
            overlaps=(),
            decompositions=(),
            conclusion=INCONCLUSIVE,
            audit=tuple(audit),
        )

    if cert.verdict == UNCOLORABLE:
        # no deterministic noncontextual assignment exists at all, so the
        # LP over zero columns connects the certificate to the verdict
        lp = solve_feasibility(build_lp(rs, kets, [], labels=labels))
        audit.append(
            AuditEntry(
                "lp",
                lp.verdict,
                lp.blocks[0].reason if lp.blocks else "no preparations",
            )
        )
        if rs.dim >= 3:
            conclusion = NO_MAX_EPISTEMIC
            audit.append(
                AuditEntry(
                    "conclusion",
                    conclusion,
                    "uncolorable ray set in dim >= 3 leaves no deterministic "
                    "noncontextual value assignment for any ontic state",
                )
            )
        else:
            conclusion = INCONCLUSIVE
            audit.append(
                AuditEntry(
                    "conclusion",
                    conclusion,
                    "uncolorable in dim 2 falls outside the argument's scope",
                )
            )
        return NoGoReport(
            source=source,
            dim=rs.dim,
            n_rays=len(rs.rays),
            n_bases=len(rs.bases),
            n_free_rays=len(rs.free_rays),
            prep_labels=tuple(labels),
            colorability=cert,
            coloring_count=None,
            lp=lp,
            model=None,
            overlaps=(),
            decompositions=(),
            conclusion=conclusion,
            audit=tuple(audit),
        )

    # colorable: enumerate the coloring space for the LP column pool
    coloring_count = count_colorings(
        rs, cap=count_cap, collect=True, budget=budget
    )
    audit.append(
        AuditEntry(
            "coloring-count",
            "capped" if coloring_count.capped else "complete",
            f"count {coloring_count.count}",
        )
    )
    if coloring_count.witnesses is None:
        audit.append(
            AuditEntry(
                "conclusion",
                INCONCLUSIVE,
                "coloring space not fully enumerated; LP over a partial "
                "column pool cannot certify infeasibility",
            )
        )
        conclusion = INCONCLUSIVE
    else:
        lp = solve_feasibility(
            build_lp(rs, kets, list(coloring_count.witnesses), labels=labels)
        )
        residual = lp.residual
        audit.append(
            AuditEntry(
                "lp",
                lp.verdict,
                f"max residual {format_float(residual)}"
                if residual is not None
                else "no residual",
            )
        )
        if lp.verdict == FEASIBLE:
            model = model_from_colorings(rs, kets, lp, labels=labels)
            conclusion = CANDIDATE_CONSTRUCTED
            model, overlaps, decompositions, conclusion = _examine_model(
                model, labels, audit, conclusion
            )
        elif lp.verdict == INFEASIBLE:
            conclusion = INCONCLUSIVE
            audit.append(
                AuditEntry(
                    "conclusion",
                    conclusion,
                    "colorable ray set but ensemble-infeasible mixture: the "
                    "obstruction is ensemble-specific, no theorem follows",
                )
            )
        else:
            conclusion = INCONCLUSIVE
            audit.append(
                AuditEntry(
                    "conclusion", conclusion, "LP solver returned inconclusive"
                )
            )

    if conclusion == CANDIDATE_CONSTRUCTED:
        audit.append(
            AuditEntry(
                "conclusion",
                conclusion,
                "deterministic noncontextual model constructed and verified; "
                "epistemicity figures above are measurements, not assertions",
            )
        )
    return NoGoReport(
        source=source,
        dim=rs.dim,
        n_rays=len(rs.rays),
        n_bases=len(rs.bases),
        n_free_rays=len(rs.free_rays),
        prep_labels=tuple(labels),
        colorability=cert,
        coloring_count=coloring_count,
        lp=lp,
        model=model,
        overlaps=overlaps,
        decompositions=tuple(decompositions),
        conclusion=conclusion,
        audit=tuple(audit),
    )


def _examine_model(
    model: OntologicalModel,
    labels: list[str],
    audit: list[AuditEntry],
    conclusion: str,
) -> tuple[OntologicalModel, tuple[OverlapReport, ...], list[DecompositionReport], str]:
    """Run every validator and predicate on a constructed model, demoting
    the conclusion to inconclusive if any hard check fails."""
    ax = validate_axioms(model)
    audit.append(
        AuditEntry(
            "validate-axioms",
            "pass" if ax.ok else "fail",
            f"{len(ax.violations)} violations",
        )
    )
    rep = validate_reproduction(model)
    audit.append(
        AuditEntry(
            "validate-reproduction",
            "pass" if rep.ok else "fail",
            f"{len(rep.violations)} violations",
        )
    )
    det = deterministic_response_model(model.space, model.responses)
    audit.append(
        AuditEntry(
            "deterministic-responses",
            "pass" if det else "fail",
            "all response entries exactly 0 or 1"
            if det
            else "fractional response entries present",
        )
    )
    lemmas = check_core_lemmas(model)
    audit.append(
        AuditEntry(
            "core-lemmas",
            "pass" if lemmas.ok else "fail",
            f"{len(lemmas.checked_states)} states checked as outcomes, "
            f"{len(lemmas.orthogonal_pairs)} orthogonal pairs, "
            f"{len(lemmas.violations)} violations",
        )
    )

    overlaps = all_overlaps(model)
    if len(model.preparations) >= 2:
        epi, witness = is_psi_epistemic(model)
        audit.append(
            AuditEntry(
                "psi-epistemic",
                "true" if epi else "false",
                f"witness {witness[0]}, {witness[1]}"
                if witness
                else "all distinct non-orthogonal pairs have disjoint supports",
            )
        )
    else:
        audit.append(
            AuditEntry(
                "psi-epistemic", "skipped", "fewer than two preparations"
            )
        )
    maximal, failing = is_maximally_epistemic(model)
    audit.append(
        AuditEntry(
            "maximally-epistemic",
            "true" if maximal else "false",
            "overlap equals Born weight on every ordered pair"
            if maximal
            else f"{len(failing)} ordered pairs fall short",
        )
    )
    deficiency = quantum_deficiency_check(model)
    audit.append(
        AuditEntry(
            "quantum-deficiency",
            "equal" if deficiency.all_equal else "strict-inclusion",
            f"{len(deficiency.entries)} outcome occurrences, "
            f"{len(deficiency.skipped)} states never measured",
        )
    )

    decompositions: list[DecompositionReport] = []
    for r in model.responses:
        m_label = r.measurement.label
        try:
            for psi_label in labels:
                decompositions.append(
                    decompose_support(model, psi_label, m_label)
                )
        except ValueError:
            audit.append(
                AuditEntry(
                    "decompose-support",
                    "skipped",
                    f"measurement {m_label}: outcomes not all declared as "
                    f"preparations",
                )
            )
            continue
    bad = [d for d in decompositions if not d.covered or not d.sum_ok]
    audit.append(
        AuditEntry(
            "decompose-support",
            "pass" if not bad else "fail",
            f"{len(decompositions)} preparation/measurement pairs checked, "
            f"{len(bad)} failures",
        )
    )

    assignments_ok = True
    for j in range(model.space.size):
        assignment = extract_value_assignment(model, j)
        if not assignment.consistent:
            assignments_ok = False
            for v in assignment.violations:
                audit.append(
                    AuditEntry(
                        "value-assignment",
                        "fail",
                        f"state {model.space.states[j]}: {v}",
                    )
                )
    if assignments_ok:
        audit.append(
            AuditEntry(
                "value-assignment",
                "pass",
                f"{model.space.size} ontic states give noncontextual "
                f"one-per-basis assignments",
            )
        )

    hard_ok = ax.ok and rep.ok and det and lemmas.ok and assignments_ok
    if not hard_ok:
        conclusion = INCONCLUSIVE
        audit.append(
            AuditEntry(
                "conclusion",
                conclusion,
                "constructed model failed verification",
            )
        )
    return model, overlaps, decompositions, conclusion


def render_nogo_text(report: NoGoReport) -> str:
    """Human-oriented rendering; same information as the structured form."""
    lines = [
        f"ray set: {report.source}",
        f"ensemble: dim {report.dim}, {report.n_rays} rays, "
        f"{report.n_bases} bases, {report.n_free_rays} free rays, "
        f"{len(report.prep_labels)} preparations "
        f"({', '.join(report.prep_labels)})",
        f"colorability: {report.colorability.verdict} "
        f"(nodes {report.colorability.stats.nodes}, propagations "
        f"{report.colorability.stats.propagations}, budget "
        f"{report.colorability.budget})",
    ]
    if report.coloring_count is not None:
        suffix = " (capped)" if report.coloring_count.capped else ""
        lines.append(
            f"colorings: {report.coloring_count.count}{suffix}"
        )
    if report.lp is not None:
        res = report.lp.residual
        lines.append(
            f"lp: {report.lp.verdict}"
            + (f", max residual {format_float(res)}" if res is not None else "")
        )
        for b in report.lp.blocks:
            detail = b.status + (f" ({b.reason})" if b.reason else "")
            lines.append(f"  block {b.label}: {detail}")
    if report.model is not None:
        lines.append(f"model: {report.model.space.size} ontic states")
    if report.overlaps:
        lines.append("overlaps (psi, phi, overlap, born, ratio, deficit):")
        for o in report.overlaps:
            lines.append(
                f"  {o.psi} {o.phi} {format_float(o.overlap)} "
                f"{format_float(o.born)} {format_float(o.ratio)} "
                f"{format_float(o.deficit)}"
            )
    if report.decompositions:
        lines.append(
            "support decompositions (psi, measurement, covered, overlap sum, "
            "born sum):"
        )
        for d in report.decompositions:
            lines.append(
                f"  {d.psi} {d.measurement} "
                f"{'yes' if d.covered else 'no'} "
                f"{format_float(d.overlap_sum)} {format_float(d.born_sum)}"
            )
    lines.append("audit trail:")
    for i, entry in enumerate(report.audit):
        lines.append(f"  {i:2d} {entry.stage}: {entry.status} ({entry.detail})")
    lines.append(f"conclusion: {report.conclusion}")
    lines.append(f"scope: {report.scope_note}")
    return "\n".join(lines) + "\n"


def render_nogo_structured(report: NoGoReport) -> str:
    """Tab-separated rendering: first column is the section, remaining
    columns are section-specific (schema in the README)."""
    rows: list[list[str]] = []
    rows.append(["ensemble", "source", report.source])
    rows.append(["ensemble", "dim", str(report.dim)])
    rows.append(["ensemble", "rays", str(report.n_rays)])
    rows.append(["ensemble", "bases", str(report.n_bases)])
    rows.append(["ensemble", "free_rays", str(report.n_free_rays)])
    rows.append(["ensemble", "preparations", ",".join(report.prep_labels)])
    rows.append(["colorability", "verdict", report.colorability.verdict])
    rows.append(["colorability", "nodes", str(report.colorability.stats.nodes)])
    rows.append(
        [
            "colorability",
            "propagations",
            str(report.colorability.stats.propagations),
        ]
    )
    rows.append(["colorability", "budget", str(report.colorability.budget)])
    if report.coloring_count is not None:
        rows.append(["colorings", "count", str(report.coloring_count.count)])
        rows.append(
            ["colorings", "capped", str(report.coloring_count.capped).lower()]
        )
    if report.lp is not None:
        rows.append(["lp", "verdict", report.lp.verdict])
        res = report.lp.residual
        rows.append(["lp", "residual", format_float(res) if res is not None else "-"])
        for b in report.lp.blocks:
            rows.append(["lp-block", b.label, b.status, b.reason or "-"])
    if report.model is not None:
        rows.append(["model", "ontic_states", str(report.model.space.size)])
    for o in report.overlaps:
        rows.append(
            [
                "overlap",
                o.psi,
                o.phi,
                format_float(o.overlap),
                format_float(o.born),
                format_float(o.ratio),
                format_float(o.deficit),
            ]
        )
    for d in report.decompositions:
        rows.append(
            [
                "decomposition",
                d.psi,
                d.measurement,
                "yes" if d.covered else "no",
                format_float(d.overlap_sum),
                format_float(d.born_sum),
            ]
        )
    for i, entry in enumerate(report.audit):
        rows.append(["audit", str(i), entry.stage, entry.status, entry.detail])
    rows.append(["conclusion", report.conclusion])
    rows.append(["scope", report.scope_note])
    return "\n".join("\t".join(row) for row in rows) + "\n"
