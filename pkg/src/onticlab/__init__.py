"""Finite ontological models, epistemic overlaps, exact noncontextual
colorability certificates, and the end-to-end no-go pipeline."""

from .kscolor import (
    BUDGET_EXHAUSTED,
    COLORABLE,
    DEFAULT_BUDGET,
    UNCOLORABLE,
    ColorabilityCertificate,
    Coloring,
    ColoringCheck,
    CountResult,
    RayFileError,
    RaySet,
    SearchStats,
    build_rayset,
    bundled_ray_names,
    bundled_ray_text,
    count_colorings,
    load_rayset,
    parse_ray_file,
    search_coloring,
    serialize_ray,
    verify_coloring,
)
from .lpfeas import (
    DEFAULT_MAX_ITER,
    FEASIBLE,
    INCONCLUSIVE,
    INFEASIBLE,
    LP_EPS,
    TRIVIAL_REASON,
    BlockResult,
    LPInstance,
    LPOutcome,
    PrepFileError,
    PreparationTargets,
    build_lp,
    bundled_prep_names,
    bundled_prep_text,
    default_labels,
    model_from_colorings,
    parse_prep_file,
    solve_feasibility,
)
from .nogo import (
    CANDIDATE_CONSTRUCTED,
    NO_MAX_EPISTEMIC,
    AuditEntry,
    DecompositionReport,
    NoGoReport,
    ProjectorClass,
    ValueAssignment,
    decompose_support,
    extract_value_assignment,
    format_float,
    render_nogo_structured,
    render_nogo_text,
    resolve_budget,
    run_nogo_pipeline,
)
from .ontology import (
    DET_EPS,
    ENSEMBLE_SCOPE_NOTE,
    REPRO_EPS,
    ModelFileError,
    OnticSpace,
    OntologicalModel,
    PreparationDistribution,
    ResponseFunction,
    ValidationReport,
    Violation,
    deterministic_response_model,
    parse_model_file,
    reproduction_sides,
    serialize_model,
    snap_unit,
    validate_axioms,
    validate_reproduction,
)
from .overlap import (
    DeficiencyEntry,
    DeficiencyReport,
    LemmaReport,
    LemmaViolation,
    OverlapReport,
    SupportSet,
    all_overlaps,
    check_core_lemmas,
    epistemic_overlap,
    is_maximally_epistemic,
    is_psi_epistemic,
    preparation_support,
    quantum_deficiency_check,
    response_support,
)
from .qcore import (
    NORM_EPS,
    ORTHO_EPS,
    SUM_EPS,
    Ket,
    ProjectiveMeasurement,
    QuantExt,
    Ray,
    born_probability,
    inner_product,
    ray_dot,
    ray_to_ket,
    same_projector,
)

__version__ = "0.1.0"

__all__ = [
    "AuditEntry",
    "BlockResult",
    "BUDGET_EXHAUSTED",
    "CANDIDATE_CONSTRUCTED",
    "COLORABLE",
    "ColorabilityCertificate",
    "Coloring",
    "ColoringCheck",
    "CountResult",
    "DecompositionReport",
    "DeficiencyEntry",
    "DeficiencyReport",
    "DEFAULT_BUDGET",
    "DEFAULT_MAX_ITER",
    "DET_EPS",
    "ENSEMBLE_SCOPE_NOTE",
    "FEASIBLE",
    "INCONCLUSIVE",
    "INFEASIBLE",
    "Ket",
    "LemmaReport",
    "LemmaViolation",
    "LP_EPS",
    "LPInstance",
    "LPOutcome",
    "ModelFileError",
    "NO_MAX_EPISTEMIC",
    "NoGoReport",
    "NORM_EPS",
    "OnticSpace",
    "OntologicalModel",
    "ORTHO_EPS",
    "OverlapReport",
    "PrepFileError",
    "PreparationDistribution",
    "PreparationTargets",
    "ProjectiveMeasurement",
    "ProjectorClass",
    "QuantExt",
    "Ray",
    "RayFileError",
    "RaySet",
    "REPRO_EPS",
    "ResponseFunction",
    "SearchStats",
    "SUM_EPS",
    "SupportSet",
    "TRIVIAL_REASON",
    "UNCOLORABLE",
    "ValidationReport",
    "ValueAssignment",
    "Violation",
    "all_overlaps",
    "born_probability",
    "build_lp",
    "build_rayset",
    "bundled_prep_names",
    "bundled_prep_text",
    "bundled_ray_names",
    "bundled_ray_text",
    "check_core_lemmas",
    "count_colorings",
    "decompose_support",
    "default_labels",
    "deterministic_response_model",
    "epistemic_overlap",
    "extract_value_assignment",
    "format_float",
    "inner_product",
    "is_maximally_epistemic",
    "is_psi_epistemic",
    "load_rayset",
    "model_from_colorings",
    "parse_model_file",
    "parse_prep_file",
    "parse_ray_file",
    "preparation_support",
    "quantum_deficiency_check",
    "ray_dot",
    "ray_to_ket",
    "render_nogo_structured",
    "render_nogo_text",
    "reproduction_sides",
    "resolve_budget",
    "response_support",
    "run_nogo_pipeline",
    "same_projector",
    "search_coloring",
    "serialize_model",
    "serialize_ray",
    "snap_unit",
    "solve_feasibility",
    "validate_axioms",
    "validate_reproduction",
    "verify_coloring",
]
