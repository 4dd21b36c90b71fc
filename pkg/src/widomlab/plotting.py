"""Figures for sweeps, zero sets and campaign margins (files only, Agg backend)."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # fixed metadata keeps SVG output byte-identical between runs
    plt.rcParams["svg.hashsalt"] = "widomlab"
    return plt


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = {"Date": None} if path.suffix.lower() in (".svg", ".pdf") else {}
    fig.savefig(path, dpi=120, metadata=meta)
    import matplotlib.pyplot as plt

    plt.close(fig)
    return path


def plot_widom(series: dict, path, limits: dict | None = None, title: str = "Widom factors") -> Path:
    """``series`` maps a label to (degrees, widom factors); ``limits`` adds dashed reference lines."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for label, (ns, ws) in series.items():
        ax.plot(ns, ws, "o-", ms=3, lw=1, label=label)
    for label, val in (limits or {}).items():
        ax.axhline(val, ls="--", lw=0.8, color="gray")
        ax.annotate(label, (ax.get_xlim()[0], val), fontsize=7, va="bottom")
    ax.set_xlabel("n")
    ax.set_ylabel("W_n")
    ax.set_title(title)
    if len(series) <= 8:
        ax.legend(fontsize=7)
    fig.tight_layout()
    return _save(fig, path)


def plot_zeros(zeros, path, boundary=None, title: str = "zeros") -> Path:
    plt = _pyplot()
    z = np.asarray(zeros, dtype=complex)
    fig, ax = plt.subplots(figsize=(5, 5))
    if boundary is not None:
        for curve in boundary:
            c = np.asarray(curve, dtype=complex)
            ax.plot(c.real, c.imag, "-", lw=0.8, color="0.4")
    ax.plot(z.real, z.imag, "o", ms=3, color="C3")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_margins(results, path, title: str = "check margins") -> Path:
    """One strip per check, margins on a symmetric log scale; failures in red."""
    plt = _pyplot()
    checks = sorted({r.check for r in results})
    fig, ax = plt.subplots(figsize=(7, 0.35 * len(checks) + 1.5))
    for i, name in enumerate(checks):
        rows = [r for r in results if r.check == name and not math.isnan(r.margin)]
        if not rows:
            continue
        m = np.array([r.margin for r in rows])
        ok = np.array([r.passed for r in rows])
        ax.plot(m[ok], np.full(ok.sum(), i), "|", color="C0", ms=8)
        ax.plot(m[~ok], np.full((~ok).sum(), i), "x", color="C3", ms=6)
    ax.axvline(0.0, color="k", lw=0.6)
    ax.set_xscale("symlog", linthresh=1e-12)
    ax.set_yticks(range(len(checks)))
    ax.set_yticklabels(checks, fontsize=7)
    ax.set_xlabel("margin (>= 0 passes)")
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)
