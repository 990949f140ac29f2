"""Linear-programming feasibility for outcome-deterministic noncontextual
models over a ray set's coloring space.

Ontic states are identified with valid colorings: each coloring is a
deterministic, noncontextual response pattern, so a model reproducing Born
statistics with such responses exists iff, for every preparation, some
mixture of colorings hits the Born weight of every constrained ray. That
is one small equality-form LP per preparation, solved here by a phase-one
simplex in float64 with Bland's rule (the exactness burden lives in the
coloring search, not in this constructive half).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .kscolor import Coloring, RaySet, verify_coloring
from .ontology import (
    OnticSpace,
    OntologicalModel,
    PreparationDistribution,
    ResponseFunction,
    snap_unit,
)
from .qcore import Ket, ProjectiveMeasurement, inner_product, ray_to_ket

LP_EPS = 1e-7

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
INCONCLUSIVE = "inconclusive"

TRIVIAL_REASON = "KS-uncolorable ensemble"

DEFAULT_MAX_ITER = 100_000

_PIVOT_TOL = 1e-11


class PrepFileError(ValueError):
    """Malformed preparation file, with the offending 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class PreparationTargets:
    """Born weights one preparation must hit on each constrained ray."""

    label: str
    ket: Ket
    born: tuple[float, ...]


@dataclass(frozen=True)
class LPInstance:
    """Feasibility system: columns are colorings, one block per preparation.

    Block for label psi: weights w >= 0 over columns with sum(w) = 1 and,
    for each constrained ray r, sum of w over columns valuing r as 1 equals
    born(r, psi). ``trivially_infeasible`` marks the zero-column case.
    """

    rayset: RaySet
    columns: tuple[Coloring, ...]
    preparations: tuple[PreparationTargets, ...]

    @property
    def constrained_rays(self) -> tuple[int, ...]:
        return self.rayset.constrained_rays

    @property
    def trivially_infeasible(self) -> bool:
        return not self.columns and bool(self.preparations)

    @property
    def trivial_reason(self) -> str | None:
        return TRIVIAL_REASON if self.trivially_infeasible else None


@dataclass(frozen=True)
class BlockResult:
    """One preparation's solve: status, clamped weights, and the residual
    recomputed by independent re-substitution."""

    label: str
    status: str
    weights: tuple[float, ...] | None
    residual: float | None
    iterations: int
    reason: str | None = None


@dataclass(frozen=True)
class LPOutcome:
    """Merged verdict plus the column pool the witness weights refer to."""

    verdict: str
    blocks: tuple[BlockResult, ...]
    columns: tuple[Coloring, ...]

    @property
    def residual(self) -> float | None:
        vals = [b.residual for b in self.blocks if b.residual is not None]
        return max(vals) if vals else None

    def weights(self, label: str) -> tuple[float, ...]:
        for b in self.blocks:
            if b.label == label:
                if b.weights is None:
                    raise ValueError(f"block {label!r} has no witness")
                return b.weights
        raise KeyError(f"no block labeled {label!r}")


def default_labels(n: int) -> tuple[str, ...]:
    return tuple(f"psi{i}" for i in range(n))


def build_lp(
    rs: RaySet,
    preparations: list[Ket],
    colorings: list[Coloring],
    labels: list[str] | None = None,
) -> LPInstance:
    """Assemble the feasibility system for an ensemble over a ray set.

    Every coloring is replayed against the ray set before entering the
    column pool; preparations must live in the ray set's dimension.
    """
    if labels is None:
        labels = list(default_labels(len(preparations)))
    if len(labels) != len(preparations):
        raise ValueError(
            f"{len(labels)} labels for {len(preparations)} preparations"
        )
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate preparation labels")
    for ket in preparations:
        if ket.dim != rs.dim:
            raise ValueError(
                f"preparation dim {ket.dim} does not match ray set dim {rs.dim}"
            )
    for idx, coloring in enumerate(colorings):
        check = verify_coloring(rs, coloring)
        if not check.ok:
            raise ValueError(
                f"column {idx} is not a valid coloring "
                f"(bases {check.violated_bases}, pairs {check.violated_pairs})"
            )
    ray_kets = {r: ray_to_ket(rs.rays[r]) for r in rs.constrained_rays}
    targets = tuple(
        PreparationTargets(
            label=label,
            ket=ket,
            born=tuple(
                abs(inner_product(ray_kets[r], ket)) ** 2
                for r in rs.constrained_rays
            ),
        )
        for label, ket in zip(labels, preparations)
    )
    return LPInstance(
        rayset=rs, columns=tuple(colorings), preparations=targets
    )


def _block_system(lp: LPInstance, prep: PreparationTargets) -> tuple[np.ndarray, np.ndarray]:
    """Equality system A w = b for one preparation block."""
    n = len(lp.columns)
    rays = lp.constrained_rays
    a = np.zeros((1 + len(rays), n))
    a[0, :] = 1.0
    for i, r in enumerate(rays):
        for j, col in enumerate(lp.columns):
            if col.value(r) == 1:
                a[1 + i, j] = 1.0
    b = np.zeros(1 + len(rays))
    b[0] = 1.0
    b[1:] = prep.born
    return a, b


def _phase_one(
    a: np.ndarray, b: np.ndarray, max_iter: int
) -> tuple[str, np.ndarray | None, int]:
    """Minimize the artificial mass of A w = b, w >= 0, with Bland's rule.

    Returns (status, structural solution or None, iterations); status is
    "optimal" (inspect the objective), or "iteration-cap".
    """
    m, n = a.shape
    tableau = np.zeros((m + 1, n + m + 1))
    tableau[:m, :n] = a
    tableau[:m, n : n + m] = np.eye(m)
    tableau[:m, -1] = b
    # express the artificial-mass objective over the starting basis
    tableau[m, :] = -tableau[:m, :].sum(axis=0)
    tableau[m, n : n + m] = 0.0
    basis = list(range(n, n + m))

    iterations = 0
    while True:
        entering = -1
        for j in range(n + m):
            if tableau[m, j] < -_PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            break
        if iterations >= max_iter:
            return "iteration-cap", None, iterations
        iterations += 1
        best_ratio = math.inf
        leave_row = -1
        for i in range(m):
            coef = tableau[i, entering]
            if coef > _PIVOT_TOL:
                ratio = tableau[i, -1] / coef
                if ratio < best_ratio - _PIVOT_TOL or (
                    abs(ratio - best_ratio) <= _PIVOT_TOL
                    and (leave_row < 0 or basis[i] < basis[leave_row])
                ):
                    best_ratio = ratio
                    leave_row = i
        if leave_row < 0:
            # the phase-one objective is bounded below by 0, so an
            # unbounded column cannot occur; guard anyway
            return "iteration-cap", None, iterations
        pivot = tableau[leave_row, entering]
        tableau[leave_row, :] /= pivot
        for i in range(m + 1):
            if i != leave_row and tableau[i, entering] != 0.0:
                tableau[i, :] -= tableau[i, entering] * tableau[leave_row, :]
        basis[leave_row] = entering

    w = np.zeros(n)
    for i, var in enumerate(basis):
        if var < n:
            w[var] = tableau[i, -1]
    objective = -tableau[m, -1]
    if objective > LP_EPS:
        return "optimal", None, iterations
    return "optimal", w, iterations


def _residual(lp: LPInstance, prep: PreparationTargets, weights: tuple[float, ...]) -> float:
    """Max constraint violation, recomputed from scratch off the tableau."""
    errs = [abs(math.fsum(weights) - 1.0)]
    for i, r in enumerate(lp.constrained_rays):
        mass = math.fsum(
            w for w, col in zip(weights, lp.columns) if col.value(r) == 1
        )
        errs.append(abs(mass - prep.born[i]))
    return max(errs)


def solve_feasibility(lp: LPInstance, max_iter: int = DEFAULT_MAX_ITER) -> LPOutcome:
    """Solve each preparation block independently and merge verdicts.

    Feasible only when every block is; any definitively infeasible block
    makes the whole instance infeasible; an iteration-capped block yields
    an explicit inconclusive verdict, never a silent infeasible.
    """
    if lp.trivially_infeasible:
        blocks = tuple(
            BlockResult(
                label=p.label,
                status=INFEASIBLE,
                weights=None,
                residual=None,
                iterations=0,
                reason=TRIVIAL_REASON,
            )
            for p in lp.preparations
        )
        return LPOutcome(verdict=INFEASIBLE, blocks=blocks, columns=lp.columns)

    blocks = []
    for prep in lp.preparations:
        a, b = _block_system(lp, prep)
        status, w, iterations = _phase_one(a, b, max_iter)
        if status == "iteration-cap":
            blocks.append(
                BlockResult(
                    label=prep.label,
                    status=INCONCLUSIVE,
                    weights=None,
                    residual=None,
                    iterations=iterations,
                    reason=f"iteration cap {max_iter} reached",
                )
            )
            continue
        if w is None:
            blocks.append(
                BlockResult(
                    label=prep.label,
                    status=INFEASIBLE,
                    weights=None,
                    residual=None,
                    iterations=iterations,
                    reason="phase-one optimum leaves artificial mass",
                )
            )
            continue
        clamped = tuple(0.0 if x < 0.0 else float(x) for x in w)
        if any(x < -LP_EPS for x in w):
            blocks.append(
                BlockResult(
                    label=prep.label,
                    status=INCONCLUSIVE,
                    weights=None,
                    residual=None,
                    iterations=iterations,
                    reason="witness weight below -LP_EPS",
                )
            )
            continue
        residual = _residual(lp, prep, clamped)
        if residual > LP_EPS:
            blocks.append(
                BlockResult(
                    label=prep.label,
                    status=INCONCLUSIVE,
                    weights=None,
                    residual=residual,
                    iterations=iterations,
                    reason="witness failed re-substitution",
                )
            )
            continue
        blocks.append(
            BlockResult(
                label=prep.label,
                status=FEASIBLE,
                weights=clamped,
                residual=residual,
                iterations=iterations,
            )
        )

    statuses = [b.status for b in blocks]
    if INFEASIBLE in statuses:
        verdict = INFEASIBLE
    elif INCONCLUSIVE in statuses:
        verdict = INCONCLUSIVE
    else:
        verdict = FEASIBLE
    return LPOutcome(verdict=verdict, blocks=tuple(blocks), columns=lp.columns)


def model_from_colorings(
    rs: RaySet, preparations: list[Ket], outcome: LPOutcome,
    labels: list[str] | None = None,
) -> OntologicalModel:
    """Materialize a feasible witness as a finite ontological model.

    Ontic states are the columns carrying positive weight in any block,
    labeled c<column index>; responses read each basis through the
    colorings, so every table entry is 0 or 1 by construction.
    """
    if outcome.verdict != FEASIBLE:
        raise ValueError(f"cannot build a model from a {outcome.verdict} outcome")
    if labels is None:
        labels = list(default_labels(len(preparations)))
    if len(labels) != len(outcome.blocks) or any(
        lab != blk.label for lab, blk in zip(labels, outcome.blocks)
    ):
        raise ValueError("labels do not match the solved blocks")

    per_block = [
        tuple(snap_unit(x) for x in outcome.weights(lab)) for lab in labels
    ]
    kept = sorted(
        {j for weights in per_block for j, x in enumerate(weights) if x > 0.0}
    )
    if not kept:
        raise ValueError("feasible outcome produced an empty ontic space")
    space = OnticSpace(tuple(f"c{j}" for j in kept))

    preps = []
    for label, ket, weights in zip(labels, preparations, per_block):
        total = math.fsum(weights[j] for j in kept)
        preps.append(
            PreparationDistribution(
                state_label=label,
                ket=ket,
                weights=tuple(weights[j] / total for j in kept),
            )
        )

    # one ket per ray id, shared across the bases that contain the ray
    ray_kets = {r: ray_to_ket(rs.rays[r]) for r in rs.constrained_rays}
    responses = []
    for bi, basis in enumerate(rs.bases):
        measurement = ProjectiveMeasurement(
            f"B{bi}", tuple(ray_kets[r] for r in basis)
        )
        table = tuple(
            tuple(float(outcome.columns[j].value(r)) for r in basis)
            for j in kept
        )
        responses.append(ResponseFunction(measurement=measurement, table=table))

    return OntologicalModel(
        space=space,
        preparations=tuple(preps),
        responses=tuple(responses),
        dim=rs.dim,
    )


def bundled_prep_names() -> tuple[str, ...]:
    return ("qubit2", "qutrit", "ququart")


def bundled_prep_text(name: str) -> str:
    """Text of a bundled preparation file; accepts 'qutrit' or 'qutrit.preps'."""
    stem = name[: -len(".preps")] if name.endswith(".preps") else name
    if stem not in bundled_prep_names():
        raise ValueError(f"no bundled preparation set named {name!r}")
    return resources.files("onticlab").joinpath("data", f"{stem}.preps").read_text()


def parse_prep_file(source: str | Path) -> tuple[int, tuple[tuple[str, Ket], ...]]:
    """Read labeled preparations: a ``dim <d>`` header, then one
    ``<label> re im ...`` line per state (2d floats)."""
    if isinstance(source, Path):
        text = source.read_text()
    elif "\n" not in source and Path(source).exists():
        text = Path(source).read_text()
    else:
        text = source

    dim: int | None = None
    preps: list[tuple[str, Ket]] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        tokens = content.split()
        if dim is None:
            if tokens[0] != "dim" or len(tokens) != 2 or not tokens[1].isdigit():
                raise PrepFileError(lineno, "expected header 'dim <d>'")
            dim = int(tokens[1])
            if dim < 2:
                raise PrepFileError(lineno, f"dimension must be >= 2, got {dim}")
            continue
        label = tokens[0]
        if label in seen:
            raise PrepFileError(lineno, f"duplicate preparation label {label!r}")
        seen.add(label)
        vals = []
        for t in tokens[1:]:
            try:
                vals.append(float(t))
            except ValueError:
                raise PrepFileError(lineno, f"bad float literal {t!r}") from None
        if len(vals) != 2 * dim:
            raise PrepFileError(
                lineno, f"expected {2 * dim} floats (re im pairs), got {len(vals)}"
            )
        amps = tuple(complex(vals[2 * i], vals[2 * i + 1]) for i in range(dim))
        try:
            preps.append((label, Ket(amps)))
        except ValueError as exc:
            raise PrepFileError(lineno, str(exc)) from None
    if dim is None:
        raise PrepFileError(1, "empty preparation file (no 'dim <d>' header)")
    if not preps:
        raise PrepFileError(1, "preparation file declares no states")
    return dim, tuple(preps)
