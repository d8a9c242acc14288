"""Matplotlib rendering of dependence and smoothed-probability figures.

Figures are written to files (the CLI never opens a window), so the Agg
backend is forced.  SVG output is made byte-reproducible by pinning the
hash salt and dropping the creation date from the metadata.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import InvalidInput
from .kernel import ProbabilityEstimate
from .stationary import DependenceProfile, Variant

_SVG_RC = {"svg.hashsalt": "illiqdep", "svg.fonttype": "path"}

_VARIANT_TITLE = {
    Variant.STATIONARY: "stationary bounds",
    Variant.ORACLE_ADAPTIVE: "oracle-adaptive bounds",
    Variant.FEASIBLE_ADAPTIVE: "feasible-adaptive bounds",
}


def dependence_figure(profile: DependenceProfile, alpha: float = 0.05,
                      title: str | None = None) -> plt.Figure:
    """Per-lag component bars with the symmetric confidence band."""
    hw = profile.half_width(alpha)
    fig, ax = plt.subplots(figsize=(8.0, 3.2))
    ax.vlines(profile.lags, 0.0, profile.components, color="#27496d", lw=1.8)
    ax.axhline(0.0, color="black", lw=0.8)
    for bound in (hw, -hw):
        ax.axhline(bound, color="#c0392b", ls="--", lw=1.0)
    ax.set_xlabel("lag")
    ax.set_ylabel("dependence component")
    ax.set_xlim(0, profile.m + 1)
    top = max(hw * 1.6, float(np.max(np.abs(profile.components), initial=0.0)) * 1.15)
    ax.set_ylim(-top, top)
    label = title or _VARIANT_TITLE.get(profile.variant, profile.variant.value)
    ax.set_title(f"{label} (n={profile.n}, {100 * (1 - alpha):g}% band)", fontsize=10)
    fig.tight_layout()
    return fig


def probability_figure(estimate: ProbabilityEstimate | np.ndarray,
                       source_id: str = "") -> plt.Figure:
    """Smoothed trade-probability path as a full line over the sample."""
    p_hat = estimate.p_hat if isinstance(estimate, ProbabilityEstimate) else np.asarray(estimate)
    fig, ax = plt.subplots(figsize=(8.0, 3.2))
    ax.plot(np.arange(1, p_hat.size + 1), p_hat, color="#27496d", lw=1.2)
    ax.set_xlabel("t")
    ax.set_ylabel("smoothed P(trade)")
    ax.set_ylim(0.0, 1.0)
    title = "smoothed trade probability"
    if source_id:
        title += f" - {source_id}"
    ax.set_title(title, fontsize=10)
    fig.tight_layout()
    return fig


def save_figure(fig: plt.Figure, path: str | Path) -> None:
    """Write a figure to disk; SVG output is deterministic for fixed input."""
    path = Path(path)
    suffix = path.suffix.lower().lstrip(".")
    if suffix == "svg":
        with plt.rc_context(_SVG_RC):
            fig.savefig(path, format="svg", metadata={"Date": None})
    elif suffix in ("png", "pdf"):
        fig.savefig(path, format=suffix)
    else:
        raise InvalidInput(f"unsupported figure format {path.suffix!r}")


def close_figure(fig: plt.Figure) -> None:
    plt.close(fig)
