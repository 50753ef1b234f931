"""Figures written next to sweep and scaling outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

MARKERS = "osD^v<>ph*"


def _style(ax):
    ax.grid(True, which="both", linestyle=":", linewidth=0.6)
    for side in ("top", "right"):
        ax.spines[side].set_visible(False)


def plot_error_rates(result, path, title=None):
    """Empirical error probability vs SNR, one curve per decoder, with Wilson bars."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    labels = []
    for p in result.points:
        if p.decoder.label not in labels:
            labels.append(p.decoder.label)
    for i, label in enumerate(labels):
        pts = sorted((p for p in result.points if p.decoder.label == label), key=lambda p: p.snr_db)
        snr = np.array([p.snr_db for p in pts])
        pe = np.array([p.p_err for p in pts])
        lo = np.array([p.wilson_ci95[0] for p in pts])
        hi = np.array([p.wilson_ci95[1] for p in pts])
        # zero counts cannot sit on a log axis; show them at the interval top instead
        shown = np.where(pe > 0, pe, np.nan)
        ax.errorbar(snr, shown, yerr=[np.clip(shown - lo, 0, None), np.clip(hi - shown, 0, None)],
                    marker=MARKERS[i % len(MARKERS)], markersize=4, capsize=2, linewidth=1, label=label)
    ax.set_yscale("log")
    ax.set_xlabel("SNR per antenna (dB)")
    ax.set_ylabel("probability of error")
    geom = result.plan.resolve_geometry()
    ax.set_title(title or f"M = {geom.m}, N = {geom.modulus}")
    ax.legend(fontsize=7, frameon=False)
    _style(ax)
    fig.tight_layout()
    fig.savefig(Path(path), dpi=150)
    plt.close(fig)


def plot_scaling(report, path):
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ms = np.array(report.m_points, dtype=float)
    for i, (label, ns) in enumerate(report.median_ns.items()):
        ax.loglog(ms, np.asarray(ns) / 1e3, marker=MARKERS[i % len(MARKERS)], markersize=4,
                  label=f"{label} (slope {report.slopes[label]:.2f})")
    ax.set_xlabel("antennas M")
    ax.set_ylabel("median decode time (us)")
    ax.legend(fontsize=7, frameon=False)
    _style(ax)
    fig.tight_layout()
    fig.savefig(Path(path), dpi=150)
    plt.close(fig)
