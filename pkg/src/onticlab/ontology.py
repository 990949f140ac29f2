"""Finite ontological models: preparation measures over a finite ontic space,
per-measurement response tables, and validators for the defining axioms.

Verdicts here are always relative to the declared ensemble: a model file
lists finitely many preparations and measurements, so "valid" certifies
reproduction for those and nothing beyond them. Every report carries that
qualifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .qcore import SUM_EPS, Ket, ProjectiveMeasurement, born_probability

REPRO_EPS = 1e-7
DET_EPS = 1e-12

ENSEMBLE_SCOPE_NOTE = (
    "verdict is relative to the declared preparations and measurements"
)


def snap_unit(x: float, eps: float = DET_EPS) -> float:
    """Values within eps of 0 or 1 become exactly 0.0 or 1.0."""
    if abs(x) <= eps:
        return 0.0
    if abs(x - 1.0) <= eps:
        return 1.0
    return float(x)


class ModelFileError(ValueError):
    """Malformed model file, with the offending 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class OnticSpace:
    """Ordered finite set of ontic state labels."""

    states: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))
        if not self.states:
            raise ValueError("ontic space must contain at least one state")
        if len(set(self.states)) != len(self.states):
            raise ValueError("ontic state labels must be unique")

    @property
    def size(self) -> int:
        return len(self.states)

    @staticmethod
    def auto(size: int) -> "OnticSpace":
        """Labels l0 .. l{size-1}; the serialized format regenerates these."""
        return OnticSpace(tuple(f"l{i}" for i in range(size)))


@dataclass(frozen=True)
class PreparationDistribution:
    """Probability weights one quantum state assigns to the ontic states.

    Construction only coerces and snaps (weights within DET_EPS of 0 or 1
    become exact); invariant checking is the validators' job, so broken
    instances remain constructible for testing.
    """

    state_label: str
    ket: Ket
    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "weights", tuple(snap_unit(float(w)) for w in self.weights)
        )


@dataclass(frozen=True)
class ResponseFunction:
    """Outcome distribution per ontic state for one projective measurement.

    Rows follow the ontic state order, columns the measurement outcomes.
    Entries within DET_EPS of 0 or 1 are snapped at construction so support
    and value-definiteness logic sees crisp entries; rows must be equal
    length but invariant checking is otherwise deferred to the validators.
    """

    measurement: ProjectiveMeasurement
    table: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        rows = tuple(
            tuple(snap_unit(float(x)) for x in row) for row in self.table
        )
        if rows and any(len(row) != len(rows[0]) for row in rows):
            raise ValueError("ragged response table")
        object.__setattr__(self, "table", rows)

    @property
    def label(self) -> str:
        return self.measurement.label


@dataclass(frozen=True)
class OntologicalModel:
    """A finite ontic space with preparation measures and response tables."""

    space: OnticSpace
    preparations: tuple[PreparationDistribution, ...]
    responses: tuple[ResponseFunction, ...]
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "preparations", tuple(self.preparations))
        object.__setattr__(self, "responses", tuple(self.responses))

    def preparation(self, state_label: str) -> PreparationDistribution:
        for p in self.preparations:
            if p.state_label == state_label:
                return p
        raise KeyError(f"no preparation labeled {state_label!r}")

    def response(self, label: str) -> ResponseFunction:
        for r in self.responses:
            if r.measurement.label == label:
                return r
        raise KeyError(f"no measurement labeled {label!r}")


@dataclass(frozen=True)
class Violation:
    """One broken constraint, localized."""

    constraint: str
    location: str
    magnitude: float
    detail: str

    def render(self) -> str:
        return f"{self.constraint} at {self.location}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    """Ordered violations (by preparation, then measurement, then outcome);
    empty means the checked property holds for the declared ensemble."""

    check: str
    violations: tuple[Violation, ...]
    scope_note: str = ENSEMBLE_SCOPE_NOTE

    @property
    def ok(self) -> bool:
        return not self.violations

    def render_lines(self) -> list[str]:
        status = "pass" if self.ok else f"fail ({len(self.violations)} violations)"
        lines = [f"{self.check}: {status} [{self.scope_note}]"]
        lines.extend("  " + v.render() for v in self.violations)
        return lines


def _check_structure(model: OntologicalModel) -> None:
    """Shape and labeling mismatches are rejected outright, not reported as
    violations; the validators assume a structurally coherent model."""
    size = model.space.size
    labels = [p.state_label for p in model.preparations]
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate preparation labels")
    mlabels = [r.measurement.label for r in model.responses]
    if len(set(mlabels)) != len(mlabels):
        raise ValueError("duplicate measurement labels")
    for p in model.preparations:
        if p.ket.dim != model.dim:
            raise ValueError(
                f"preparation {p.state_label!r} has dim {p.ket.dim}, model dim {model.dim}"
            )
        if len(p.weights) != size:
            raise ValueError(
                f"preparation {p.state_label!r} has {len(p.weights)} weights "
                f"for {size} ontic states"
            )
    for r in model.responses:
        if r.measurement.dim != model.dim:
            raise ValueError(
                f"measurement {r.measurement.label!r} has dim "
                f"{r.measurement.dim}, model dim {model.dim}"
            )
        if len(r.table) != size:
            raise ValueError(
                f"measurement {r.measurement.label!r} table has {len(r.table)} "
                f"rows for {size} ontic states"
            )
        for row in r.table:
            if len(row) != model.dim:
                raise ValueError(
                    f"measurement {r.measurement.label!r} has a row of width "
                    f"{len(row)}, expected {model.dim}"
                )


def validate_axioms(model: OntologicalModel) -> ValidationReport:
    """Nonnegativity and normalization of every preparation measure and
    every response row, within SUM_EPS, each failure localized."""
    _check_structure(model)
    violations: list[Violation] = []
    for p in model.preparations:
        for j, w in enumerate(p.weights):
            if w < 0.0:
                violations.append(
                    Violation(
                        constraint="preparation nonnegativity",
                        location=f"prep {p.state_label}, state {model.space.states[j]}",
                        magnitude=-w,
                        detail=f"weight {w!r} < 0",
                    )
                )
        total = math.fsum(p.weights)
        if abs(total - 1.0) > SUM_EPS:
            violations.append(
                Violation(
                    constraint="preparation normalization",
                    location=f"prep {p.state_label}",
                    magnitude=abs(total - 1.0),
                    detail=f"weights sum to {total!r}, expected 1",
                )
            )
    for r in model.responses:
        mlabel = r.measurement.label
        for j, row in enumerate(r.table):
            state = model.space.states[j]
            for k, x in enumerate(row):
                if x < 0.0:
                    violations.append(
                        Violation(
                            constraint="response nonnegativity",
                            location=f"meas {mlabel}, state {state}, outcome {k}",
                            magnitude=-x,
                            detail=f"entry {x!r} < 0",
                        )
                    )
            total = math.fsum(row)
            if abs(total - 1.0) > SUM_EPS:
                violations.append(
                    Violation(
                        constraint="response normalization",
                        location=f"meas {mlabel}, state {state}",
                        magnitude=abs(total - 1.0),
                        detail=f"row sums to {total!r}, expected 1",
                    )
                )
    return ValidationReport(check="axioms", violations=tuple(violations))


def reproduction_sides(
    model: OntologicalModel,
    prep: PreparationDistribution,
    resp: ResponseFunction,
    outcome: int,
) -> tuple[float, float]:
    """(model prediction, Born weight) for one preparation/outcome pair."""
    lhs = math.fsum(
        w * row[outcome] for w, row in zip(prep.weights, resp.table)
    )
    rhs = born_probability(prep.ket, resp.measurement, outcome)
    return lhs, rhs


def validate_reproduction(model: OntologicalModel) -> ValidationReport:
    """Model statistics against Born weights within REPRO_EPS, for every
    declared preparation, measurement, and outcome."""
    _check_structure(model)
    violations: list[Violation] = []
    for p in model.preparations:
        for r in model.responses:
            for k in range(model.dim):
                lhs, rhs = reproduction_sides(model, p, r, k)
                if abs(lhs - rhs) > REPRO_EPS:
                    violations.append(
                        Violation(
                            constraint="reproduction",
                            location=(
                                f"prep {p.state_label}, meas "
                                f"{r.measurement.label}, outcome {k}"
                            ),
                            magnitude=abs(lhs - rhs),
                            detail=f"model gives {lhs!r}, Born weight is {rhs!r}",
                        )
                    )
    return ValidationReport(check="reproduction", violations=tuple(violations))


def deterministic_response_model(
    space: OnticSpace, responses: tuple[ResponseFunction, ...]
) -> bool:
    """True iff every response entry is exactly 0 or 1 after snapping."""
    for r in responses:
        if len(r.table) != space.size:
            raise ValueError(
                f"measurement {r.measurement.label!r} table has {len(r.table)} "
                f"rows for {space.size} ontic states"
            )
        for row in r.table:
            for x in row:
                if x != 0.0 and x != 1.0:
                    return False
    return True


def _floats(tokens: list[str], lineno: int) -> list[float]:
    out = []
    for t in tokens:
        try:
            out.append(float(t))
        except ValueError:
            raise ModelFileError(lineno, f"bad float literal {t!r}") from None
    return out


def _ket_from_floats(vals: list[float], lineno: int, dim: int) -> Ket:
    if len(vals) != 2 * dim:
        raise ModelFileError(
            lineno, f"expected {2 * dim} floats (re im pairs), got {len(vals)}"
        )
    amps = [complex(vals[2 * i], vals[2 * i + 1]) for i in range(dim)]
    try:
        return Ket(tuple(amps))
    except ValueError as exc:
        raise ModelFileError(lineno, str(exc)) from None


def parse_model_file(source: str | Path) -> OntologicalModel:
    """Read the line-oriented model format.

    Header lines ``dim <d>`` and ``ontic <L>`` come first. Each
    ``prep <label>`` is followed by one line of d re/im amplitude pairs and
    one line of L weights. Each ``meas <label>`` is followed by d amplitude
    lines (the outcome kets in order) and L response rows of d entries.
    ``#`` starts a comment. Ontic labels are the implicit l0 .. l{L-1}.
    """
    if isinstance(source, Path):
        text = source.read_text()
    elif "\n" not in source and Path(source).exists():
        text = Path(source).read_text()
    else:
        text = source

    lines: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if content:
            lines.append((lineno, content.split()))

    pos = 0

    def take() -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 1
            raise ModelFileError(last, "unexpected end of file")
        item = lines[pos]
        pos += 1
        return item

    lineno, tokens = take()
    if tokens[0] != "dim" or len(tokens) != 2 or not tokens[1].isdigit():
        raise ModelFileError(lineno, "expected header 'dim <d>'")
    dim = int(tokens[1])
    if dim < 2:
        raise ModelFileError(lineno, f"dimension must be >= 2, got {dim}")
    lineno, tokens = take()
    if tokens[0] != "ontic" or len(tokens) != 2 or not tokens[1].isdigit():
        raise ModelFileError(lineno, "expected header 'ontic <L>'")
    size = int(tokens[1])
    if size < 1:
        raise ModelFileError(lineno, f"ontic size must be >= 1, got {size}")

    space = OnticSpace.auto(size)
    preparations: list[PreparationDistribution] = []
    responses: list[ResponseFunction] = []
    seen_preps: set[str] = set()
    seen_meas: set[str] = set()

    while pos < len(lines):
        lineno, tokens = take()
        if tokens[0] == "prep":
            if len(tokens) != 2:
                raise ModelFileError(lineno, "expected 'prep <label>'")
            label = tokens[1]
            if label in seen_preps:
                raise ModelFileError(lineno, f"duplicate preparation label {label!r}")
            seen_preps.add(label)
            ln, toks = take()
            ket = _ket_from_floats(_floats(toks, ln), ln, dim)
            ln, toks = take()
            weights = _floats(toks, ln)
            if len(weights) != size:
                raise ModelFileError(
                    ln, f"expected {size} weights, got {len(weights)}"
                )
            preparations.append(
                PreparationDistribution(
                    state_label=label, ket=ket, weights=tuple(weights)
                )
            )
        elif tokens[0] == "meas":
            if len(tokens) != 2:
                raise ModelFileError(lineno, "expected 'meas <label>'")
            label = tokens[1]
            if label in seen_meas:
                raise ModelFileError(lineno, f"duplicate measurement label {label!r}")
            seen_meas.add(label)
            kets = []
            for _ in range(dim):
                ln, toks = take()
                kets.append(_ket_from_floats(_floats(toks, ln), ln, dim))
            try:
                measurement = ProjectiveMeasurement(label, tuple(kets))
            except ValueError as exc:
                raise ModelFileError(lineno, str(exc)) from None
            rows = []
            for _ in range(size):
                ln, toks = take()
                row = _floats(toks, ln)
                if len(row) != dim:
                    raise ModelFileError(
                        ln, f"expected {dim} response entries, got {len(row)}"
                    )
                rows.append(tuple(row))
            responses.append(
                ResponseFunction(measurement=measurement, table=tuple(rows))
            )
        else:
            raise ModelFileError(
                lineno, f"expected 'prep' or 'meas', got {tokens[0]!r}"
            )

    return OntologicalModel(
        space=space,
        preparations=tuple(preparations),
        responses=tuple(responses),
        dim=dim,
    )


def serialize_model(model: OntologicalModel) -> str:
    """Emit the line-oriented format; floats use repr so a parse round-trip
    reproduces identical validation reports."""
    out = [f"dim {model.dim}", f"ontic {model.space.size}"]
    for p in model.preparations:
        out.append(f"prep {p.state_label}")
        out.append(
            " ".join(f"{a.real!r} {a.imag!r}" for a in p.ket.amps)
        )
        out.append(" ".join(repr(w) for w in p.weights))
    for r in model.responses:
        out.append(f"meas {r.measurement.label}")
        for ket in r.measurement.outcomes:
            out.append(" ".join(f"{a.real!r} {a.imag!r}" for a in ket.amps))
        for row in r.table:
            out.append(" ".join(repr(x) for x in row))
    return "\n".join(out) + "\n"
