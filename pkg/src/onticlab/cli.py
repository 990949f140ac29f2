"""Command-line interface.

Subcommands mirror the library layers: ``validate`` and ``overlap`` work on
model files, ``color`` on ray files, ``feasible`` and ``nogo`` on a ray
file plus a preparation file. Ray and preparation arguments accept either
a filesystem path or a bundled name (``peres33``, ``cabello18``,
``qubit2`` for rays; ``qubit2``, ``qutrit``, ``ququart`` for
preparations). Exit status is 0 whenever the requested pipeline ran to a
report, regardless of the verdict inside it; nonzero is reserved for
operational failures such as unreadable or malformed files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .kscolor import (
    RayFileError,
    bundled_ray_names,
    bundled_ray_text,
    count_colorings,
    load_rayset,
    search_coloring,
    verify_coloring,
)
from .lpfeas import (
    FEASIBLE,
    PrepFileError,
    build_lp,
    bundled_prep_names,
    bundled_prep_text,
    model_from_colorings,
    parse_prep_file,
    solve_feasibility,
)
from .nogo import (
    format_float,
    render_nogo_structured,
    render_nogo_text,
    resolve_budget,
    run_nogo_pipeline,
)
from .ontology import (
    ModelFileError,
    deterministic_response_model,
    parse_model_file,
    serialize_model,
    validate_axioms,
    validate_reproduction,
)
from .overlap import (
    all_overlaps,
    check_core_lemmas,
    is_maximally_epistemic,
    is_psi_epistemic,
    quantum_deficiency_check,
)

TEXT = "text"
STRUCTURED = "structured"


def _resolve_rays(arg: str) -> tuple[str | Path, str]:
    """Path or bundled-name resolution; returns (source, display label)."""
    p = Path(arg)
    if p.exists():
        return p, arg
    try:
        return bundled_ray_text(arg), arg
    except ValueError:
        raise ValueError(
            f"no such file or bundled ray set: {arg!r} "
            f"(bundled: {', '.join(bundled_ray_names())})"
        ) from None


def _resolve_preps(arg: str) -> tuple[str | Path, str]:
    p = Path(arg)
    if p.exists():
        return p, arg
    try:
        return bundled_prep_text(arg), arg
    except ValueError:
        raise ValueError(
            f"no such file or bundled preparation set: {arg!r} "
            f"(bundled: {', '.join(bundled_prep_names())})"
        ) from None


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _report_lines(report) -> list[str]:
    lines = report.render_lines()
    return lines


def cmd_validate(args: argparse.Namespace) -> int:
    model = parse_model_file(Path(args.model))
    ax = validate_axioms(model)
    rep = validate_reproduction(model)
    det = deterministic_response_model(model.space, model.responses)
    if args.format == TEXT:
        lines = _report_lines(ax) + _report_lines(rep)
        lines.append(f"deterministic responses: {'yes' if det else 'no'}")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        rows = [
            ["check", "axioms", "pass" if ax.ok else "fail", str(len(ax.violations))],
            ["check", "reproduction", "pass" if rep.ok else "fail", str(len(rep.violations))],
            ["check", "deterministic", "yes" if det else "no", "0"],
        ]
        for report in (ax, rep):
            for v in report.violations:
                rows.append(
                    [
                        "violation",
                        report.check,
                        v.constraint,
                        v.location,
                        format_float(v.magnitude),
                        v.detail,
                    ]
                )
        rows.append(["scope", ax.scope_note])
        _emit("\n".join("\t".join(r) for r in rows) + "\n", args.out)
    if args.figures:
        from .viz import render_support_matrix

        fig_dir = Path(args.figures)
        fig_dir.mkdir(parents=True, exist_ok=True)
        render_support_matrix(model, fig_dir / "support_matrix.png")
    return 0


def cmd_overlap(args: argparse.Namespace) -> int:
    model = parse_model_file(Path(args.model))
    reports = all_overlaps(model)
    if args.format == STRUCTURED:
        rows = ["psi\tphi\toverlap\tborn\tratio\tdeficit"]
        for o in reports:
            rows.append(
                f"{o.psi}\t{o.phi}\t{format_float(o.overlap)}"
                f"\t{format_float(o.born)}\t{format_float(o.ratio)}"
                f"\t{format_float(o.deficit)}"
            )
        lemmas = check_core_lemmas(model)
        rows.append(
            f"lemmas\t{'pass' if lemmas.ok else 'fail'}\t{len(lemmas.violations)}"
        )
        if len(model.preparations) >= 2:
            epi, witness = is_psi_epistemic(model)
            rows.append(
                f"psi-epistemic\t{'yes' if epi else 'no'}"
                f"\t{','.join(witness) if witness else '-'}"
            )
        maximal, failing = is_maximally_epistemic(model)
        rows.append(
            f"maximally-epistemic\t{'yes' if maximal else 'no'}\t{len(failing)}"
        )
        deficiency = quantum_deficiency_check(model)
        rows.append(
            "deficiency\t"
            + ("equal" if deficiency.all_equal else "strict-inclusion")
            + "\t"
            + (",".join(deficiency.skipped) if deficiency.skipped else "-")
        )
        rows.append(f"scope\t{lemmas.scope_note}")
        _emit("\n".join(rows) + "\n", args.out)
    else:
        lines = ["overlaps (psi, phi, overlap, born, ratio, deficit):"]
        for o in reports:
            flag = "" if o.bound_ok else "  BOUND VIOLATED"
            lines.append(
                f"  {o.psi} {o.phi} {format_float(o.overlap)} "
                f"{format_float(o.born)} {format_float(o.ratio)} "
                f"{format_float(o.deficit)}{flag}"
            )
        lemmas = check_core_lemmas(model)
        lines.extend(lemmas.render_lines())
        if len(model.preparations) >= 2:
            epi, witness = is_psi_epistemic(model)
            lines.append(
                f"psi-epistemic: {'yes' if epi else 'no'}"
                + (f" (witness {witness[0]}, {witness[1]})" if witness else "")
            )
        maximal, failing = is_maximally_epistemic(model)
        lines.append(
            f"maximally epistemic: {'yes' if maximal else 'no'}"
            + ("" if maximal else f" ({len(failing)} ordered pairs short)")
        )
        deficiency = quantum_deficiency_check(model)
        lines.append(
            f"quantum deficiency: "
            f"{'none (supports equal)' if deficiency.all_equal else 'strict inclusions present'}"
            + (
                f"; skipped (never measured): {', '.join(deficiency.skipped)}"
                if deficiency.skipped
                else ""
            )
        )
        _emit("\n".join(lines) + "\n", args.out)
    if args.figures:
        from .viz import render_overlap_bound, render_support_matrix

        fig_dir = Path(args.figures)
        fig_dir.mkdir(parents=True, exist_ok=True)
        render_overlap_bound(reports, fig_dir / "overlap_bound.png")
        render_support_matrix(model, fig_dir / "support_matrix.png")
    return 0


def cmd_color(args: argparse.Namespace) -> int:
    source, label = _resolve_rays(args.rays)
    rs = load_rayset(source)
    budget = resolve_budget(args.budget)
    cert = search_coloring(rs, budget=budget)
    count = None
    if args.count:
        count = count_colorings(rs, cap=args.cap, budget=budget)
    if args.format == STRUCTURED:
        rows = [
            ["source", label],
            ["dim", str(rs.dim)],
            ["rays", str(len(rs.rays))],
            ["bases", str(len(rs.bases))],
            ["free_rays", str(len(rs.free_rays))],
            ["verdict", cert.verdict],
            ["nodes", str(cert.stats.nodes)],
            ["propagations", str(cert.stats.propagations)],
            ["budget", str(cert.budget)],
        ]
        if cert.witness is not None:
            rows.append(["witness", " ".join(map(str, cert.witness.values))])
        if count is not None:
            rows.append(["count", str(count.count)])
            rows.append(["capped", str(count.capped).lower()])
        _emit("\n".join("\t".join(r) for r in rows) + "\n", args.out)
    else:
        lines = [
            f"ray set: {label} (dim {rs.dim}, {len(rs.rays)} rays, "
            f"{len(rs.bases)} bases, {len(rs.free_rays)} free rays)",
            f"verdict: {cert.verdict} (nodes {cert.stats.nodes}, "
            f"propagations {cert.stats.propagations}, budget {cert.budget})",
        ]
        if cert.witness is not None:
            check = verify_coloring(rs, cert.witness)
            lines.append(
                "witness: "
                + " ".join(map(str, cert.witness.values))
                + (" (replay ok)" if check.ok else " (REPLAY FAILED)")
            )
        if count is not None:
            suffix = " (capped)" if count.capped else ""
            lines.append(f"colorings: {count.count}{suffix}")
        _emit("\n".join(lines) + "\n", args.out)
    if args.witness_out and cert.witness is not None:
        Path(args.witness_out).write_text(
            f"# coloring witness for {label}\n"
            + " ".join(map(str, cert.witness.values))
            + "\n"
        )
    if args.figures:
        from .viz import render_ortho_graph

        fig_dir = Path(args.figures)
        fig_dir.mkdir(parents=True, exist_ok=True)
        render_ortho_graph(rs, fig_dir / "ortho_graph.png", witness=cert.witness)
    return 0


def cmd_feasible(args: argparse.Namespace) -> int:
    ray_source, ray_label = _resolve_rays(args.rays)
    prep_source, _ = _resolve_preps(args.preps)
    rs = load_rayset(ray_source)
    prep_dim, labeled = parse_prep_file(prep_source)
    if prep_dim != rs.dim:
        raise ValueError(
            f"preparation dim {prep_dim} does not match ray set dim {rs.dim}"
        )
    labels = [lab for lab, _ in labeled]
    kets = [ket for _, ket in labeled]
    budget = resolve_budget(args.budget)
    count = count_colorings(rs, cap=args.cap, collect=True, budget=budget)
    columns = list(count.witnesses) if count.witnesses is not None else []
    lp = build_lp(rs, kets, columns, labels=labels)
    outcome = solve_feasibility(lp)
    model = None
    if outcome.verdict == FEASIBLE and (args.emit_model or args.figures):
        model = model_from_colorings(rs, kets, outcome, labels=labels)

    if args.format == STRUCTURED:
        rows = [
            ["source", ray_label],
            ["columns", str(len(columns))],
            ["verdict", outcome.verdict],
            [
                "residual",
                format_float(outcome.residual)
                if outcome.residual is not None
                else "-",
            ],
        ]
        for b in outcome.blocks:
            rows.append(
                [
                    "block",
                    b.label,
                    b.status,
                    format_float(b.residual) if b.residual is not None else "-",
                    b.reason or "-",
                ]
            )
        _emit("\n".join("\t".join(r) for r in rows) + "\n", args.out)
    else:
        lines = [
            f"ray set: {ray_label} (dim {rs.dim}, {len(rs.rays)} rays, "
            f"{len(rs.bases)} bases)",
            f"columns: {len(columns)} colorings"
            + (" (capped enumeration)" if count.capped else ""),
            f"verdict: {outcome.verdict}"
            + (
                f", max residual {format_float(outcome.residual)}"
                if outcome.residual is not None
                else ""
            ),
        ]
        for b in outcome.blocks:
            detail = b.status + (f" ({b.reason})" if b.reason else "")
            lines.append(f"  block {b.label}: {detail}")
        _emit("\n".join(lines) + "\n", args.out)

    if args.emit_model:
        if model is None:
            raise ValueError(
                f"cannot emit a model from a {outcome.verdict} outcome"
            )
        Path(args.emit_model).write_text(serialize_model(model))
    if args.figures:
        from .viz import render_ortho_graph, render_support_matrix

        fig_dir = Path(args.figures)
        fig_dir.mkdir(parents=True, exist_ok=True)
        render_ortho_graph(rs, fig_dir / "ortho_graph.png")
        if model is not None:
            render_support_matrix(model, fig_dir / "support_matrix.png")
    return 0


def cmd_nogo(args: argparse.Namespace) -> int:
    ray_source, ray_label = _resolve_rays(args.rays)
    prep_source, _ = _resolve_preps(args.preps)
    report = run_nogo_pipeline(
        ray_source, prep_source, budget=args.budget, source_label=ray_label
    )
    if args.format == STRUCTURED:
        _emit(render_nogo_structured(report), args.out)
    else:
        _emit(render_nogo_text(report), args.out)
    if args.figures:
        from .viz import render_nogo_figures

        rs = load_rayset(ray_source)
        render_nogo_figures(report, rs, args.figures)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onticlab",
        description=(
            "Finite ontological models: validation, epistemic overlaps, "
            "exact noncontextual colorability, and the end-to-end no-go "
            "pipeline."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--format",
            choices=(TEXT, STRUCTURED),
            default=TEXT,
            help="text for reading, structured for tab-separated parsing",
        )
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument(
            "--figures",
            metavar="DIR",
            help="also render PNG figures into this directory",
        )

    p = sub.add_parser("validate", help="check a model file against the axioms")
    p.add_argument("model", help="model file path")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser(
        "overlap", help="overlap table and epistemicity predicates for a model"
    )
    p.add_argument("model", help="model file path")
    common(p)
    p.set_defaults(func=cmd_overlap)

    p = sub.add_parser("color", help="decide noncontextual colorability")
    p.add_argument("rays", help="ray file path or bundled name")
    p.add_argument("--count", action="store_true", help="also count colorings")
    p.add_argument(
        "--cap",
        type=int,
        default=100_000,
        help="stop counting at this many colorings",
    )
    p.add_argument("--budget", type=int, help="search node budget")
    p.add_argument(
        "--witness", dest="witness_out", help="write a witness coloring here"
    )
    common(p)
    p.set_defaults(func=cmd_color)

    p = sub.add_parser(
        "feasible", help="LP feasibility of an ensemble over the coloring space"
    )
    p.add_argument("rays", help="ray file path or bundled name")
    p.add_argument(
        "--preps", required=True, help="preparation file path or bundled name"
    )
    p.add_argument(
        "--cap",
        type=int,
        default=100_000,
        help="coloring enumeration cap for the column pool",
    )
    p.add_argument("--budget", type=int, help="search node budget")
    p.add_argument(
        "--emit-model", help="write the constructed model file here if feasible"
    )
    common(p)
    p.set_defaults(func=cmd_feasible)

    p = sub.add_parser("nogo", help="run the full pipeline to a conclusion")
    p.add_argument("rays", help="ray file path or bundled name")
    p.add_argument(
        "--preps", required=True, help="preparation file path or bundled name"
    )
    p.add_argument("--budget", type=int, help="search node budget")
    common(p)
    p.set_defaults(func=cmd_nogo)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RayFileError, ModelFileError, PrepFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
