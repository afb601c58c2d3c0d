"""Artifact writers: delimited text, JSON, and the companion figures.

Text output is bit-stable: floats are serialized with ``repr``, which emits
the shortest string that parses back to the identical double, capped at 17
significant digits.  Figures are rendered through the Agg backend with the
software tag stripped so identical runs produce identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_PNG_META = {"Software": None}


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


def figure_path(out_path) -> Path:
    return Path(out_path).with_suffix(".png")


def _save(fig, path) -> None:
    fig.savefig(path, dpi=150, metadata=_PNG_META)
    plt.close(fig)


def render_cdf_figure(path, grid, analytic, whmc, plain, title: str) -> None:
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4))
    ax0.plot(grid, analytic, "k-", label="analytic")
    ax0.plot(grid, whmc, "C0--", label="factor walk")
    ax0.plot(grid, plain, "C1:", label="plain walk")
    ax0.set_xlabel("t")
    ax0.set_ylabel("P(passage <= t)")
    ax0.set_title(title)
    ax0.legend()
    ax1.semilogy(grid, np.abs(np.asarray(whmc) - np.asarray(analytic)), "C0--", label="factor walk")
    ax1.semilogy(grid, np.abs(np.asarray(plain) - np.asarray(analytic)), "C1:", label="plain walk")
    ax1.set_xlabel("t")
    ax1.set_ylabel("absolute cdf error")
    ax1.legend()
    fig.tight_layout()
    _save(fig, path)


def render_rate_figure(path, levels, mse_by_coord: dict, slopes: dict, title: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for name, values in mse_by_coord.items():
        slope = slopes.get(name)
        label = name if slope is None or np.isnan(slope) else f"{name} (slope {slope:.2f})"
        ax.plot(levels, np.log2(values), marker="o", label=label)
    ax.set_xlabel("level (log2 step count)")
    ax.set_ylabel("log2 consecutive-level MSE")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def render_estimate_figure(path, ns, values, std_errors, title: str, reference: Optional[float] = None) -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    x = np.log2(np.asarray(ns, dtype=float))
    ax.errorbar(x, values, yerr=1.96 * np.asarray(std_errors), fmt="o-", capsize=3)
    if reference is not None:
        ax.axhline(reference, color="k", lw=0.8, ls="--")
    ax.set_xlabel("log2 step count")
    ax.set_ylabel("estimate")
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)
