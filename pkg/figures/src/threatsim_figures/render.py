"""Figure construction from threatsim CSVs.

``build_plot_data`` turns validated tables into plain plotting arrays (pure,
deterministic, test-friendly); ``render`` draws them with matplotlib and
writes the image. Barycentric points map onto the 2-simplex triangle with
vertices (0,0), (1,0), (1/2, sqrt(3)/2), preserving vertex identity exactly.

Rest-point markers follow the usual convention: solid black for stable,
hollow circle for unstable, hollow square for saddle, grey diamond for the
marginal points that sit on rest continua.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import InputError, Table, load_table

KINDS = ("simplex", "timeseries", "ratio_curves", "theta_panels")

SIMPLEX_SUM_TOL = 1e-6

_CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])

_MARKER_STYLE = {
    # classification -> (marker, facecolor, filled)
    "stable": ("o", "black", True),
    "unstable": ("o", "white", False),
    "saddle": ("s", "white", False),
    "marginal": ("D", "0.7", False),
}


@dataclass
class FigureSpec:
    kind: str
    inputs: list[str]
    output: str
    run: int = 0
    cmap: str = "viridis"  # light = fast, dark = slow
    dpi: int = 150


@dataclass
class Marker:
    xy: tuple[float, float]
    classification: str
    filled: bool


@dataclass
class FacePanel:
    label: str | None
    xy: np.ndarray  # (n, 2) triangle coordinates
    speed: np.ndarray
    markers: list[Marker] = field(default_factory=list)


@dataclass
class PlotData:
    kind: str
    panels: list = field(default_factory=list)
    series: dict = field(default_factory=dict)


def barycentric_to_xy(frequencies: np.ndarray) -> np.ndarray:
    """Map rows of three frequencies onto the plotting triangle."""
    return frequencies @ _CORNERS


def _strategy_columns(table: Table) -> list[str]:
    names = table.columns_matching("x_")
    if not names:
        raise InputError("no x_<strategy> columns found")
    return names


def _simplex_points(table: Table, names: list[str]) -> np.ndarray:
    data = np.array([table.column(n) for n in names], dtype=float).T
    sums = data.sum(axis=1)
    bad = np.where(np.abs(sums - 1.0) > SIMPLEX_SUM_TOL)[0]
    if bad.size:
        raise InputError(
            f"row {bad[0] + 1}: frequencies sum to {sums[bad[0]]:.8f}, not 1"
        )
    return data


def _face_triple(point: np.ndarray, keep: list[int]) -> np.ndarray:
    return point[keep]


def _build_simplex(spec: FigureSpec) -> PlotData:
    phase = load_table(spec.inputs[0])
    names = _strategy_columns(phase)
    points = _simplex_points(phase, names)
    speed = np.array(phase.column("speed"), dtype=float)

    rest: list[tuple[np.ndarray, str]] = []
    if len(spec.inputs) > 1:
        rp_table = load_table(spec.inputs[1])
        rp_names = _strategy_columns(rp_table)
        if rp_names != names:
            raise InputError(f"rest-point strategies {rp_names} do not match phase {names}")
        rp_points = _simplex_points(rp_table, rp_names)
        labels = rp_table.column("classification")
        seen: list[np.ndarray] = []
        for pt, label in zip(rp_points, labels):
            if any(np.linalg.norm(pt - s) <= 1e-6 for s in seen):
                continue  # closed-form and numeric duplicates of one point
            seen.append(pt)
            rest.append((pt, str(label)))

    data = PlotData(kind="simplex")
    if len(names) == 3:
        panel = FacePanel(None, barycentric_to_xy(points), speed)
        panel.markers = [_marker(pt, label) for pt, label in rest]
        data.panels.append(panel)
        return data

    # four strategies: one triangular face per omitted strategy
    faces = phase.column("face")
    for omitted in dict.fromkeys(faces):  # preserve file order
        keep = [i for i, n in enumerate(names) if n != f"x_{omitted}"]
        mask = [f == omitted for f in faces]
        face_points = points[np.array(mask)][:, keep]
        panel = FacePanel(str(omitted), barycentric_to_xy(face_points),
                          speed[np.array(mask)])
        omit_idx = names.index(f"x_{omitted}")
        for pt, label in rest:
            if abs(pt[omit_idx]) <= 1e-9:
                panel.markers.append(_marker(pt[keep], label))
        data.panels.append(panel)
    return data


def _marker(triple: np.ndarray, label: str) -> Marker:
    xy = barycentric_to_xy(triple[None, :])[0]
    style = _MARKER_STYLE.get(label)
    if style is None:
        raise InputError(f"unknown rest-point classification {label!r}")
    return Marker((float(xy[0]), float(xy[1])), label, style[2])


def _build_timeseries(spec: FigureSpec) -> PlotData:
    table = load_table(spec.inputs[0])
    runs = [int(r) for r in table.column("run")]
    if spec.run not in runs:
        raise InputError(f"run {spec.run} not present (runs: {sorted(set(runs))})")
    keep = [i for i, r in enumerate(runs) if r == spec.run]
    names = table.columns_matching("n_")
    if not names:
        raise InputError("no n_<strategy> columns found")
    gens = np.array(table.column("generation"), dtype=float)[keep]
    counts = np.array([table.column(n) for n in names], dtype=float)[:, keep]
    total = counts.sum(axis=0)
    data = PlotData(kind="timeseries")
    data.series["t"] = gens
    for name, row in zip(names, counts):
        data.series[name.removeprefix("n_")] = row / total
    return data


def _build_ratio_curves(spec: FigureSpec) -> PlotData:
    table = load_table(spec.inputs[0])
    ratio = np.array(table.column("q_over_p"), dtype=float)
    coop = np.array(table.column("mean_coop_strategy_freq"), dtype=float)
    coop_std = np.array(table.column("std_coop_strategy_freq"), dtype=float)
    welfare = np.array(table.column("mean_welfare"), dtype=float)
    welfare_std = np.array(table.column("std_welfare"), dtype=float)
    valid = np.isfinite(ratio) & np.isfinite(coop)
    if not valid.any():
        raise InputError("no rows with finite q_over_p and cooperation")
    order = np.argsort(ratio[valid], kind="stable")
    data = PlotData(kind="ratio_curves")
    for key, values in (("q_over_p", ratio), ("coop", coop), ("coop_std", coop_std),
                        ("welfare", welfare), ("welfare_std", welfare_std)):
        data.series[key] = values[valid][order]
    return data


def _build_theta_panels(spec: FigureSpec) -> PlotData:
    table = load_table(spec.inputs[0])
    theta = np.array(table.column("theta"), dtype=float)
    ratio = np.array(table.column("q_over_p"), dtype=float)
    coop = np.array(table.column("mean_coop_strategy_freq"), dtype=float)
    welfare = np.array(table.column("mean_welfare"), dtype=float)
    data = PlotData(kind="theta_panels")
    curves: dict[float, tuple[np.ndarray, np.ndarray]] = {}
    for value in sorted(set(theta.tolist())):
        mask = theta == value
        order = np.argsort(ratio[mask], kind="stable")
        curves[value] = (ratio[mask][order], coop[mask][order])
    data.series["curves"] = curves
    thetas = np.array(sorted(set(theta.tolist())))
    ratios = np.array(sorted(set(ratio.tolist())))
    grid = np.full((thetas.size, ratios.size), np.nan)
    for t, r, w in zip(theta, ratio, welfare):
        grid[np.searchsorted(thetas, t), np.searchsorted(ratios, r)] = w
    data.series["heatmap"] = (ratios, thetas, grid)
    return data


_BUILDERS = {
    "simplex": _build_simplex,
    "timeseries": _build_timeseries,
    "ratio_curves": _build_ratio_curves,
    "theta_panels": _build_theta_panels,
}


def build_plot_data(spec: FigureSpec) -> PlotData:
    """Validate inputs and assemble the figure's data series (no drawing)."""
    if spec.kind not in KINDS:
        raise InputError(f"kind must be one of {KINDS}, got {spec.kind!r}")
    if not spec.inputs:
        raise InputError("at least one input CSV is required")
    return _BUILDERS[spec.kind](spec)


def render(spec: FigureSpec) -> PlotData:
    """Build the plot data, draw it, and write the image file."""
    data = build_plot_data(spec)
    draw = {
        "simplex": _draw_simplex,
        "timeseries": _draw_timeseries,
        "ratio_curves": _draw_ratio_curves,
        "theta_panels": _draw_theta_panels,
    }[spec.kind]
    fig = draw(data, spec)
    fig.savefig(spec.output, dpi=spec.dpi)
    plt.close(fig)
    return data


def _triangle_frame(ax) -> None:
    frame = np.vstack([_CORNERS, _CORNERS[:1]])
    ax.plot(frame[:, 0], frame[:, 1], color="black", linewidth=0.8)
    ax.set_aspect("equal")
    ax.axis("off")


def _draw_simplex(data: PlotData, spec: FigureSpec):
    n = len(data.panels)
    ncols = 2 if n > 1 else 1
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(5 * ncols, 4.5 * nrows))
    axes = np.atleast_1d(axes).ravel()
    lo = min(panel.speed.min() for panel in data.panels)
    hi = max(panel.speed.max() for panel in data.panels)
    for ax, panel in zip(axes, data.panels):
        sc = ax.scatter(panel.xy[:, 0], panel.xy[:, 1], c=panel.speed,
                        cmap=spec.cmap, vmin=lo, vmax=hi, s=14)
        for marker in panel.markers:
            style = _MARKER_STYLE[marker.classification]
            ax.scatter([marker.xy[0]], [marker.xy[1]], marker=style[0],
                       facecolors=style[1], edgecolors="black", s=70, zorder=3)
        _triangle_frame(ax)
        if panel.label:
            ax.set_title(f"face without {panel.label}")
    for ax in axes[len(data.panels):]:
        ax.axis("off")
    fig.colorbar(sc, ax=list(axes), label="speed", shrink=0.85)
    return fig


def _draw_timeseries(data: PlotData, spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(7, 4))
    t = data.series["t"]
    for name, values in data.series.items():
        if name == "t":
            continue
        ax.plot(t, values, label=name, linewidth=1.2)
    ax.set_xlabel("generation")
    ax.set_ylabel("frequency")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    fig.tight_layout()
    return fig


def _draw_ratio_curves(data: PlotData, spec: FigureSpec):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    x = data.series["q_over_p"]
    coop, coop_std = data.series["coop"], data.series["coop_std"]
    ax1.plot(x, coop, marker="o", markersize=3)
    ax1.fill_between(x, coop - coop_std, coop + coop_std, alpha=0.25)
    ax1.set_xlabel("q / p")
    ax1.set_ylabel("cooperative strategies")
    ax1.set_ylim(-0.02, 1.02)
    welfare, welfare_std = data.series["welfare"], data.series["welfare_std"]
    ax2.plot(x, welfare, marker="o", markersize=3, color="tab:red")
    ax2.fill_between(x, welfare - welfare_std, welfare + welfare_std,
                     alpha=0.25, color="tab:red")
    ax2.set_xlabel("q / p")
    ax2.set_ylabel("average population payoff")
    fig.tight_layout()
    return fig


def _draw_theta_panels(data: PlotData, spec: FigureSpec):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for theta, (x, coop) in data.series["curves"].items():
        ax1.plot(x, coop, marker="o", markersize=3, label=f"theta={theta:g}")
    ax1.set_xlabel("q / p")
    ax1.set_ylabel("cooperative strategies")
    ax1.set_ylim(-0.02, 1.02)
    ax1.legend(fontsize=8)
    ratios, thetas, grid = data.series["heatmap"]
    im = ax2.imshow(grid, origin="lower", aspect="auto", cmap=spec.cmap,
                    extent=(ratios.min(), ratios.max(), thetas.min(), thetas.max()))
    ax2.set_xlabel("q / p")
    ax2.set_ylabel("theta")
    fig.colorbar(im, ax=ax2, label="average payoff")
    fig.tight_layout()
    return fig
