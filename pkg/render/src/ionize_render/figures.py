"""Figure builders: one pure function per figure kind.

Each builder takes a FigureSpec and returns a matplotlib Figure built only
from the loaded tables, so callers (and tests) can inspect artists before
anything touches disk.  `render` wraps a builder with pinned style state and
a deterministic save.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .spec import FigureSpec, RenderError, Table  # noqa: E402

# Pinned style: every run renders with exactly this state, independent of
# user matplotlibrc files, so raster output is reproducible bit for bit.
STYLE = {
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.grid": False,
    "svg.hashsalt": "ionize-render",
}

THRESHOLD_LABEL = "threshold"


def _grid(table: Table, x_col: str, y_col: str, value_col: str,
          select: dict | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pivot a long-format table onto its exact (x, y) grid, no interpolation."""
    mask = np.ones(len(table), dtype=bool)
    for col, value in (select or {}).items():
        mask &= table[col] == value
    x = np.unique(table[x_col][mask])
    y = np.unique(table[y_col][mask])
    grid = np.full((len(y), len(x)), np.nan)
    xi = np.searchsorted(x, table[x_col][mask])
    yi = np.searchsorted(y, table[y_col][mask])
    grid[yi, xi] = table[value_col][mask]
    if np.isnan(grid).any():
        raise RenderError(
            f"grid over ({x_col}, {y_col}) has missing cells")
    return x, y, grid


def _ng_averaged_probability(table: Table, level: float) -> tuple[np.ndarray, np.ndarray]:
    """Offset-charge-averaged P(level) versus drive amplitude."""
    mask = table["level"] == level
    eps = np.unique(table["eps_d_ghz"][mask])
    prob = np.array([
        table["probability"][mask & (table["eps_d_ghz"] == e)].mean()
        for e in eps
    ])
    return eps, prob


def build_heatmap(spec: FigureSpec) -> plt.Figure:
    """Occupation heatmap over (drive frequency, amplitude), overlay optional."""
    table = spec.table("dynamics")
    level = float(spec.options.get("level", 0))
    n_g_values = np.unique(table["n_g"])
    grids = []
    for n_g in n_g_values:
        x, y, grid = _grid(table, "omega_d_ghz", "eps_d_ghz", "probability",
                           select={"level": level, "n_g": n_g})
        grids.append(grid)
    grid = np.mean(grids, axis=0)

    fig, ax = plt.subplots(figsize=(4.8, 3.6))
    mesh = ax.pcolormesh(x, y, grid, shading="nearest", cmap="viridis",
                         vmin=0.0, vmax=1.0)
    fig.colorbar(mesh, ax=ax, label=f"P(level {level:g})")
    if "threshold" in spec.inputs:
        overlay = spec.table("threshold")
        label = float(spec.options.get("threshold_label", 0))
        mask = overlay["label"] == label
        ax.plot(overlay["omega_d_ghz"][mask], overlay["eps_threshold_ghz"][mask],
                color="red", lw=1.5, label=THRESHOLD_LABEL)
        ax.legend(loc="upper right")
    ax.set_xlabel("drive frequency (GHz)")
    ax.set_ylabel("drive amplitude (GHz)")
    _apply_ranges(ax, spec.options)
    return fig


def build_floquet(spec: FigureSpec) -> plt.Figure:
    """Quasienergy spectrum and population-bunching curves versus amplitude."""
    table = spec.table("floquet")
    fig, (ax_q, ax_p) = plt.subplots(1, 2, figsize=(7.2, 3.2))
    for branch in np.unique(table["branch_label"]):
        mask = table["branch_label"] == branch
        order = np.argsort(table["eps_d_ghz"][mask])
        eps = table["eps_d_ghz"][mask][order]
        ax_q.plot(eps, table["quasienergy_ghz"][mask][order], lw=0.8)
        ax_p.plot(eps, table["avg_population"][mask][order], lw=0.8)
    well_top = spec.options.get("well_top_level", 9)
    if well_top is not None:
        ax_p.axhline(float(well_top), ls="--", color="black", lw=1.0,
                     label="well top")
        ax_p.legend(loc="lower right")
    ax_q.set_xlabel("drive amplitude (GHz)")
    ax_q.set_ylabel("quasienergy (GHz)")
    ax_p.set_xlabel("drive amplitude (GHz)")
    ax_p.set_ylabel("average level")
    fig.tight_layout()
    return fig


def build_bars(spec: FigureSpec) -> plt.Figure:
    """Occupation bar distributions, one bar group per selected cell."""
    table = spec.table("dynamics")
    group_by = spec.options.get("group_by", "eps_d_ghz")
    groups = np.unique(table[group_by])
    levels = np.unique(table["level"])
    width = 0.8 / len(groups)
    fig, ax = plt.subplots(figsize=(4.8, 3.2))
    for j, value in enumerate(groups):
        mask = table[group_by] == value
        probs = [table["probability"][mask & (table["level"] == lvl)].mean()
                 for lvl in levels]
        ax.bar(levels + (j - (len(groups) - 1) / 2) * width, probs,
               width=width, label=f"{group_by}={value:g}")
    ax.set_xlabel("transmon level")
    ax.set_ylabel("probability")
    ax.set_yscale(spec.options.get("yscale", "linear"))
    ax.legend(fontsize=7)
    return fig


def build_ramps(spec: FigureSpec) -> plt.Figure:
    """Survival-probability curves versus amplitude, one line per input."""
    level = float(spec.options.get("level", 0))
    fig, ax = plt.subplots(figsize=(4.8, 3.2))
    series = [role for role in spec.inputs if role != "threshold"]
    if not series:
        raise RenderError("ramp comparison needs at least one dynamics input")
    for role in sorted(series):
        eps, prob = _ng_averaged_probability(spec.table(role), level)
        ax.plot(eps, prob, marker="o", ms=3, lw=1.0, label=role)
    ax.set_xlabel("drive amplitude (GHz)")
    ax.set_ylabel(f"P(level {level:g})")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    _apply_ranges(ax, spec.options)
    return fig


def build_poincare(spec: FigureSpec) -> plt.Figure:
    """Poincare scatter panels, one per drive amplitude in the table."""
    table = spec.table("classical")
    eps_values = np.unique(table["eps_d_ghz"])
    fig, axes = plt.subplots(1, len(eps_values),
                             figsize=(2.6 * len(eps_values), 2.8),
                             squeeze=False)
    for ax, eps in zip(axes[0], eps_values):
        mask = table["eps_d_ghz"] == eps
        for tid in np.unique(table["trajectory_id"][mask]):
            sel = mask & (table["trajectory_id"] == tid)
            ax.plot(table["phi"][sel], table["n"][sel], ".", ms=1.0)
        ax.set_title(f"eps_d = {eps:g} GHz")
        ax.set_xlabel("phase")
    axes[0][0].set_ylabel("charge")
    fig.tight_layout()
    return fig


def _apply_ranges(ax, options: dict):
    if "x_range" in options:
        ax.set_xlim(*options["x_range"])
    if "y_range" in options:
        ax.set_ylim(*options["y_range"])


KINDS = {
    "heatmap": build_heatmap,
    "floquet": build_floquet,
    "bars": build_bars,
    "ramps": build_ramps,
    "poincare": build_poincare,
}


def build_figure(spec: FigureSpec) -> plt.Figure:
    if spec.kind not in KINDS:
        raise RenderError(
            f"unknown figure kind {spec.kind!r}; expected one of {sorted(KINDS)}")
    with plt.rc_context(STYLE):
        return KINDS[spec.kind](spec)


def render(spec: FigureSpec) -> Path:
    """Build the figure and write it to spec.output; returns the path."""
    fig = build_figure(spec)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fmt = spec.options.get("format") or (out.suffix.lstrip(".") or "png")
    with plt.rc_context(STYLE):
        # Fixed metadata keeps raster output byte-identical across runs.
        metadata = {"Software": "ionize-render"} if fmt == "png" else None
        fig.savefig(out, format=fmt, metadata=metadata)
    plt.close(fig)
    return out
