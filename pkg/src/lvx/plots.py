"""Figure rendering for report outputs (PNG files next to the CSVs)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_field(field, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 3.2))
    if field.values.ndim == 1 or field.values.shape[-1] == 1:
        ax.plot(field.times, np.asarray(field.values).reshape(len(field.times), -1)[:, 0], lw=1.2)
        ax.set_xlabel("t")
        ax.set_ylabel("v(t)")
    else:
        im = ax.imshow(
            field.values.T,
            origin="lower",
            aspect="auto",
            extent=(field.times[0], field.times[-1], field.space[0], field.space[-1]),
        )
        fig.colorbar(im, ax=ax, label="v")
        ax.set_xlabel("t")
        ax.set_ylabel("x")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_trace(trace, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.2))
    diffs = np.asarray(trace.sup_differences)
    ax.semilogy(np.arange(1, diffs.size + 1), np.maximum(diffs, 1e-300), "o-", ms=3, label="sup difference")
    finite = [b if np.isfinite(b) else np.nan for b in trace.tail_bounds]
    ax.semilogy(np.arange(1, diffs.size + 1), finite, "--", label="tail bound")
    ax.set_xlabel("iteration")
    ax.set_ylabel("sup norm")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_moments(times, corners, estimates, ses, path, bound=None, x_index=None) -> None:
    fig, ax = plt.subplots(figsize=(6, 3.2))
    j = x_index if x_index is not None else estimates.shape[1] // 2
    est = estimates[:, j]
    se = ses[:, j]
    ax.errorbar(times, est, yerr=3 * se, fmt="o-", ms=3, lw=1, capsize=2, label="MC estimate (3 SE)")
    if bound is not None:
        ax.plot(times, np.asarray(bound), "r--", lw=1.2, label="moment bound")
    ax.set_xlabel("t")
    ax.set_ylabel("E|Y|^p")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
