"""Figure rendering for report outputs: orthogonality graphs, overlap
scatter against the Born bound, and preparation support matrices.

matplotlib loads lazily with the Agg backend so headless report runs never
touch a display; every renderer writes a PNG and returns its path.
"""

from __future__ import annotations

import math
from pathlib import Path

from .kscolor import Coloring, RaySet
from .nogo import NoGoReport
from .ontology import OntologicalModel
from .overlap import OverlapReport


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_ortho_graph(
    rs: RaySet, path: str | Path, witness: Coloring | None = None
) -> Path:
    """Rays on a circle, orthogonality as chords; witness 1-rays filled."""
    plt = _pyplot()
    n = len(rs.rays)
    angles = [2 * math.pi * i / n for i in range(n)]
    xs = [math.cos(a) for a in angles]
    ys = [math.sin(a) for a in angles]

    fig, ax = plt.subplots(figsize=(7, 7))
    for i in range(n):
        for j in rs.ortho[i]:
            if j > i:
                ax.plot(
                    [xs[i], xs[j]], [ys[i], ys[j]],
                    color="0.75", linewidth=0.6, zorder=1,
                )
    if witness is None:
        colors = ["tab:blue"] * n
    else:
        colors = [
            "tab:orange" if witness.values[i] == 1 else "tab:blue"
            for i in range(n)
        ]
    ax.scatter(xs, ys, s=60, c=colors, zorder=2)
    for i in range(n):
        ax.annotate(
            str(i), (1.08 * xs[i], 1.08 * ys[i]),
            ha="center", va="center", fontsize=7,
        )
    ax.set_aspect("equal")
    ax.set_axis_off()
    title = f"{n} rays, {len(rs.bases)} bases (dim {rs.dim})"
    if witness is not None:
        title += ", witness coloring highlighted"
    ax.set_title(title)
    out = Path(path)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out


def render_overlap_bound(
    overlaps: tuple[OverlapReport, ...], path: str | Path
) -> Path:
    """Overlap mass against Born weight; the diagonal is the bound."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 6))
    born = [o.born for o in overlaps]
    mass = [o.overlap for o in overlaps]
    ax.plot([0, 1], [0, 1], color="0.4", linewidth=1, label="overlap = born")
    ax.scatter(born, mass, s=36, color="tab:blue", zorder=2)
    for o in overlaps:
        if not o.bound_ok:
            ax.scatter([o.born], [o.overlap], s=60, color="tab:red", zorder=3)
    ax.set_xlabel("Born weight |<phi|psi>|^2")
    ax.set_ylabel("overlap mass on supp(phi)")
    ax.set_xlim(-0.05, 1.05)
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(f"{len(overlaps)} ordered pairs vs the overlap bound")
    ax.legend(loc="upper left")
    out = Path(path)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out


def render_support_matrix(model: OntologicalModel, path: str | Path) -> Path:
    """Preparation weights as a heat map, one row per preparation."""
    plt = _pyplot()
    rows = [list(p.weights) for p in model.preparations]
    fig, ax = plt.subplots(
        figsize=(max(4.0, 0.5 * model.space.size + 2), 0.6 * len(rows) + 2)
    )
    im = ax.imshow(rows, cmap="viridis", aspect="auto", vmin=0.0)
    ax.set_xticks(range(model.space.size))
    ax.set_xticklabels(model.space.states, fontsize=7, rotation=45)
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels([p.state_label for p in model.preparations], fontsize=8)
    ax.set_xlabel("ontic state")
    ax.set_ylabel("preparation")
    ax.set_title("preparation weights")
    fig.colorbar(im, ax=ax, shrink=0.85)
    out = Path(path)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out


def render_nogo_figures(
    report: NoGoReport, rs: RaySet, out_dir: str | Path
) -> list[Path]:
    """Standard figure set for one pipeline run, fixed file names."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [
        render_ortho_graph(
            rs, out / "ortho_graph.png", witness=report.colorability.witness
        )
    ]
    if report.overlaps:
        written.append(
            render_overlap_bound(report.overlaps, out / "overlap_bound.png")
        )
    if report.model is not None:
        written.append(
            render_support_matrix(report.model, out / "support_matrix.png")
        )
    return written
