"""Matplotlib figures emitted next to the analysis report files.

Three figures per run: a time-vs-score correlation heatmap (prototype rows,
task/part columns), and per-task mean score and mean completion-time bars.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evalstats import PARTS, TASKS, Report, ScoreRow


def _cell_labels() -> list[tuple[int, str]]:
    return [(task, part) for task in TASKS for part in PARTS]


def correlation_heatmap(report: Report, out_path: Path) -> Path:
    cells = _cell_labels()
    prototypes = report.prototypes
    grid = np.full((len(prototypes), len(cells)), np.nan)
    for i, prototype in enumerate(prototypes):
        for j, key in enumerate(cells):
            value = report.correlations.get(prototype, {}).get(key)
            if value is not None:
                grid[i, j] = value

    fig, ax = plt.subplots(figsize=(1.6 * len(cells) + 2, 0.7 * len(prototypes) + 1.5))
    im = ax.imshow(grid, vmin=-1, vmax=1, cmap="RdBu_r", aspect="auto")
    ax.set_xticks(range(len(cells)))
    ax.set_xticklabels([f"T{task} {part}" for task, part in cells])
    ax.set_yticks(range(len(prototypes)))
    ax.set_yticklabels(prototypes)
    for i in range(len(prototypes)):
        for j in range(len(cells)):
            if not np.isnan(grid[i, j]):
                ax.text(j, i, f"{grid[i, j]:.2f}", ha="center", va="center",
                        fontsize=9)
    ax.set_title("Time on task vs score (Pearson r)")
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def _grouped_bars(values: dict[int, dict[str, float]], prototypes: list[str],
                  title: str, ylabel: str, out_path: Path) -> Path:
    tasks = sorted(values)
    width = 0.8 / max(len(tasks), 1)
    x = np.arange(len(prototypes))
    fig, ax = plt.subplots(figsize=(6, 3.4))
    for k, task in enumerate(tasks):
        heights = [values[task].get(p, 0.0) for p in prototypes]
        ax.bar(x + k * width, heights, width, label=f"Task {task}")
    ax.set_xticks(x + width * (len(tasks) - 1) / 2)
    ax.set_xticklabels(prototypes)
    ax.set_title(title)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def _means(rows: Sequence[ScoreRow], field: str) -> dict[int, dict[str, float]]:
    sums: dict[int, dict[str, list[float]]] = {}
    for row in rows:
        sums.setdefault(row.task, {}).setdefault(row.prototype, []).append(
            getattr(row, field))
    return {task: {p: sum(v) / len(v) for p, v in groups.items()}
            for task, groups in sums.items()}


def emit_figures(report: Report, rows: Sequence[ScoreRow],
                 out_dir: str | Path) -> list[Path]:
    """Write the three report figures into out_dir; returns their paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prototypes = report.prototypes
    written = [
        correlation_heatmap(report, out_dir / "correlation_heatmap.png"),
        _grouped_bars(_means(rows, "score"), prototypes,
                      "Mean score per prototype", "score",
                      out_dir / "scores_by_prototype.png"),
        _grouped_bars(_means(rows, "total_time_sec"), prototypes,
                      "Mean time on task per prototype", "seconds",
                      out_dir / "time_by_prototype.png"),
    ]
    return written
