"""Figure rendering from the analysis CSV schemas."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import Normalize, TwoSlopeNorm
from matplotlib.patches import Rectangle

# Pin everything that could perturb SVG output between runs.
matplotlib.rcParams["svg.hashsalt"] = "freqlens-figures"
matplotlib.rcParams["figure.dpi"] = 100

KINDS = ("heatmap", "pca_scatter", "bias_lines", "rmse_strips")

_SCHEMAS = {
    "heatmap": ["bin_row", "bin_col", "mean_sim", "n_pairs", "shortfall"],
    "pca_scatter": ["word", "bin", "pc1", "pc2", "is_centroid"],
    "bias_lines": ["corpus_id", "bin", "class", "n", "mean", "ci_low", "ci_high"],
    "rmse_strips": ["setting_id", "metric", "rmse_actual", "baseline_q50",
                    "baseline_q99", "baseline_max", "n_perm"],
}


class RenderError(Exception):
    """Base error for figure rendering."""


class SchemaError(RenderError):
    """CSV header does not match the producing module's schema."""


class EmptyDataError(RenderError):
    """Schema-valid CSV with no data rows."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input CSV, figure kind, output image path, labels."""

    input_csv: str | Path
    kind: str
    output: str | Path
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RenderError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")


@dataclass
class RenderInfo:
    """What was drawn, for callers and tests."""

    kind: str
    output: Path
    n_rows: int
    details: dict = field(default_factory=dict)


def _read_rows(path: str | Path, kind: str) -> list[dict]:
    expected = _SCHEMAS[kind]
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [col for col in expected if col not in header]
        if missing:
            raise SchemaError(
                f"{kind} CSV is missing column(s) {', '.join(missing)} "
                f"(found {header})"
            )
        rows = list(reader)
    if not rows:
        raise EmptyDataError(f"{path} contains a valid header but no data rows")
    return rows


def _save(fig, output: str | Path) -> Path:
    output = Path(output)
    output.parent.mkdir(parents=True, exist_ok=True)
    if output.suffix.lower() == ".svg":
        fig.savefig(output, format="svg", metadata={"Date": None})
    else:
        fig.savefig(output)
    plt.close(fig)
    return output


def _render_heatmap(spec: FigureSpec, rows: list[dict]) -> RenderInfo:
    bins = sorted({int(r["bin_row"]) for r in rows} | {int(r["bin_col"]) for r in rows})
    index = {b: i for i, b in enumerate(bins)}
    B = len(bins)
    grid = np.full((B, B), np.nan)
    for r in rows:
        grid[index[int(r["bin_row"])], index[int(r["bin_col"])]] = float(r["mean_sim"])

    # Grand mean over distinct unordered cells, which centers the scale.
    distinct = {}
    for r in rows:
        key = tuple(sorted((int(r["bin_row"]), int(r["bin_col"]))))
        distinct[key] = float(r["mean_sim"])
    center = float(np.mean(list(distinct.values())))
    vals = np.array(list(distinct.values()))
    lo, hi = float(vals.min()), float(vals.max())
    if lo < center < hi:
        norm = TwoSlopeNorm(vcenter=center, vmin=lo, vmax=hi)
    else:
        norm = Normalize(vmin=min(lo, center - 1e-9), vmax=max(hi, center + 1e-9))
    cmap = plt.get_cmap("RdBu_r")

    fig, ax = plt.subplots(figsize=(1.1 * B + 2.4, 1.1 * B + 1.6))
    n_cells = 0
    for i in range(B):
        for j in range(B):
            if np.isnan(grid[i, j]):
                continue
            ax.add_patch(Rectangle((j, i), 1, 1, facecolor=cmap(norm(grid[i, j])),
                                   edgecolor="white", linewidth=0.8))
            ax.text(j + 0.5, i + 0.5, f"{grid[i, j]:.2f}", ha="center", va="center",
                    fontsize=8)
            n_cells += 1
    ax.set_xlim(0, B)
    ax.set_ylim(B, 0)
    ax.set_xticks([k + 0.5 for k in range(B)], [f"$10^{{{b}}}$" for b in bins])
    ax.set_yticks([k + 0.5 for k in range(B)], [f"$10^{{{b}}}$" for b in bins])
    ax.set_xlabel(spec.xlabel or "frequency bin")
    ax.set_ylabel(spec.ylabel or "frequency bin")
    ax.set_title(spec.title or "mean similarity by frequency bin")
    fig.colorbar(plt.cm.ScalarMappable(norm=norm, cmap=cmap), ax=ax, fraction=0.046)
    out = _save(fig, spec.output)
    return RenderInfo(kind=spec.kind, output=out, n_rows=len(rows),
                      details={"n_bins": B, "n_cells": n_cells})


def _render_pca_scatter(spec: FigureSpec, rows: list[dict]) -> RenderInfo:
    points = [r for r in rows if r["is_centroid"] == "0"]
    centroids = [r for r in rows if r["is_centroid"] != "0"]
    bins = sorted({int(r["bin"]) for r in rows})
    cmap = plt.get_cmap("viridis")
    color = {b: cmap(k / max(len(bins) - 1, 1)) for k, b in enumerate(bins)}

    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    for b in bins:
        xs = [float(r["pc1"]) for r in points if int(r["bin"]) == b]
        ys = [float(r["pc2"]) for r in points if int(r["bin"]) == b]
        ax.scatter(xs, ys, s=14, alpha=0.55, color=color[b], label=f"bin $10^{{{b}}}$")
    for r in centroids:
        b = int(r["bin"])
        ax.scatter([float(r["pc1"])], [float(r["pc2"])], s=260, marker="o",
                   color=color[b], edgecolor="black", linewidth=1.4, zorder=5)
    ax.set_xlabel(spec.xlabel or "PC1")
    ax.set_ylabel(spec.ylabel or "PC2")
    ax.set_title(spec.title or "stratified PCA projection (large markers: bin centroids)")
    ax.legend(fontsize=8, loc="best")
    out = _save(fig, spec.output)
    return RenderInfo(kind=spec.kind, output=out, n_rows=len(rows),
                      details={"n_points": len(points), "n_centroids": len(centroids)})


def _render_bias_lines(spec: FigureSpec, rows: list[dict]) -> RenderInfo:
    use = [r for r in rows if r["class"] == "all"] or rows
    corpora = list(dict.fromkeys(r["corpus_id"] for r in use))
    bins = sorted({int(r["bin"]) for r in use})
    x = np.arange(len(corpora))
    cmap = plt.get_cmap("viridis")
    color = {b: cmap(k / max(len(bins) - 1, 1)) for k, b in enumerate(bins)}

    fig, ax = plt.subplots(figsize=(6.8, 4.6))
    for b in bins:
        by_corpus = {r["corpus_id"]: r for r in use if int(r["bin"]) == b}
        xs = [i for i, c in enumerate(corpora) if c in by_corpus]
        mean = [float(by_corpus[corpora[i]]["mean"]) for i in xs]
        lo = [float(by_corpus[corpora[i]]["ci_low"]) for i in xs]
        hi = [float(by_corpus[corpora[i]]["ci_high"]) for i in xs]
        ax.plot(xs, mean, marker="o", color=color[b], label=f"bin $10^{{{b}}}$")
        ax.fill_between(xs, lo, hi, color=color[b], alpha=0.2, linewidth=0)
    ax.axhline(0.0, color="gray", linewidth=0.8, linestyle="--")
    ax.set_xticks(x, corpora)
    ax.set_xlabel(spec.xlabel or "corpus")
    ax.set_ylabel(spec.ylabel or "mean bias")
    ax.set_title(spec.title or "mean bias by frequency bin, with bootstrap CIs")
    ax.legend(fontsize=8, loc="best")
    out = _save(fig, spec.output)
    return RenderInfo(kind=spec.kind, output=out, n_rows=len(rows),
                      details={"n_corpora": len(corpora), "n_bins": len(bins)})


def _render_rmse_strips(spec: FigureSpec, rows: list[dict]) -> RenderInfo:
    metrics = list(dict.fromkeys(r["metric"] for r in rows))
    fig, ax = plt.subplots(figsize=(2.4 * len(metrics) + 2.2, 4.6))
    for m, metric in enumerate(metrics):
        sub = [r for r in rows if r["metric"] == metric]
        n = len(sub)
        # Deterministic horizontal spread, one column pair per metric.
        spread = (np.arange(n) - (n - 1) / 2) * (0.5 / max(n, 1))
        actual = [float(r["rmse_actual"]) for r in sub]
        base_mid = [float(r["baseline_q50"]) for r in sub]
        base_max = [float(r["baseline_max"]) for r in sub]
        ax.vlines(m - 0.18 + spread, base_mid, base_max, color="tab:blue",
                  alpha=0.5, linewidth=1.0)
        ax.scatter(m - 0.18 + spread, base_mid, s=22, color="tab:blue",
                   label="permutation baseline" if m == 0 else None)
        ax.scatter(m + 0.18 + spread, actual, s=26, color="tab:red",
                   label="actual" if m == 0 else None)
    ax.set_xticks(range(len(metrics)), metrics)
    ax.set_ylabel(spec.ylabel or "RMSE")
    ax.set_xlabel(spec.xlabel or "")
    ax.set_title(spec.title or "frequency association per setting: actual vs baseline")
    ax.legend(fontsize=8, loc="best")
    out = _save(fig, spec.output)
    return RenderInfo(kind=spec.kind, output=out, n_rows=len(rows),
                      details={"n_settings": len({r['setting_id'] for r in rows}),
                               "metrics": metrics})


_RENDERERS = {
    "heatmap": _render_heatmap,
    "pca_scatter": _render_pca_scatter,
    "bias_lines": _render_bias_lines,
    "rmse_strips": _render_rmse_strips,
}


def render(spec: FigureSpec) -> RenderInfo:
    """Render one figure from a CSV artifact; returns what was drawn.

    Raises SchemaError when the header does not match the declared schema and
    EmptyDataError for a header-only file.
    """
    rows = _read_rows(spec.input_csv, spec.kind)
    return _RENDERERS[spec.kind](spec, rows)
