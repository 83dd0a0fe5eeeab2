"""Figure rendering. All figures are written as SVG next to the CSV data.

Matplotlib's SVG backend is made deterministic (fixed hash salt, no
embedded timestamps) so repeated runs with the same seed emit identical
bytes.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams["svg.hashsalt"] = "gcnsct"

_SAVE_KWARGS = {"format": "svg", "metadata": {"Date": None}}


def save_sweep_panels(curves: dict[str, "object"], out_a, out_b) -> None:
    """Panel a: distance to the eigenspace per shift; panel b: normalised
    smoothness per shift. One line per activation plus the input level."""
    first = next(iter(curves.values()))
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    for label, curve in curves.items():
        ax.plot(curve.alphas, curve.dist_values, label=label, linewidth=1.2)
    ax.axhline(first.input_dist, color="k", linestyle="--", linewidth=1.0, label="input")
    ax.set_xlabel("alpha")
    ax.set_ylabel("distance to eigenspace")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_a, **_SAVE_KWARGS)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    for label, curve in curves.items():
        ax.plot(curve.alphas, curve.s_values, label=label, linewidth=1.2)
    ax.axhline(first.input_s, color="k", linestyle="--", linewidth=1.0, label="input")
    ax.set_xlabel("alpha")
    ax.set_ylabel("normalized smoothness")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_b, **_SAVE_KWARGS)
    plt.close(fig)


def save_trajectories(points: np.ndarray, eigvec: np.ndarray, out) -> None:
    """Trajectories of 2-D feature states; color encodes the magnitude and
    the dashed line marks the smooth eigenspace."""
    fig, ax = plt.subplots(figsize=(4.6, 4.6))
    magnitudes = np.linalg.norm(points, axis=2)
    vmax = max(float(magnitudes.max()), 1e-12)
    span = 1.1 * float(np.abs(points).max())
    line = np.linspace(-span, span, 2)
    ax.plot(line * eigvec[0], line * eigvec[1], "r--", linewidth=1.2, label="eigenspace")
    for k in range(points.shape[0]):
        ax.plot(points[k, :, 0], points[k, :, 1], color="0.8", linewidth=0.6, zorder=1)
        ax.scatter(
            points[k, :, 0],
            points[k, :, 1],
            c=magnitudes[k],
            cmap="viridis",
            vmin=0.0,
            vmax=vmax,
            s=6,
            zorder=2,
        )
    ax.set_xlabel("feature of node 0")
    ax.set_ylabel("feature of node 1")
    ax.legend(loc="best", fontsize=8)
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(out, **_SAVE_KWARGS)
    plt.close(fig)


def save_heatmap(matrix: np.ndarray, out) -> None:
    """Per-layer (rows) per-dimension (columns) normalised smoothness."""
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    image = ax.imshow(matrix, aspect="auto", origin="lower", cmap="viridis", vmin=0.0, vmax=1.0)
    ax.set_xlabel("feature dimension")
    ax.set_ylabel("layer")
    fig.colorbar(image, ax=ax, label="normalized smoothness")
    fig.tight_layout()
    fig.savefig(out, **_SAVE_KWARGS)
    plt.close(fig)
