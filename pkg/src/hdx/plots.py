"""Figure rendering for report outputs (always to files, never interactive)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def experiment_cloud(rows: list[dict], bound: float | None, path: str) -> None:
    """Scatter of (defect, distance) per trial with the claimed bound line."""
    defects = [r["defect"] for r in rows]
    distances = [r["distance"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.scatter(defects, distances, s=18, alpha=0.7, edgecolors="none")
    if bound is not None and defects:
        top = max(defects) or 1.0
        ax.plot([0, top], [0, bound * top], "r--", lw=1,
                label=f"distance = {bound:g} x defect")
        ax.legend(loc="upper left", fontsize=8)
    ax.set_xlabel("defect  $\\|\\delta\\alpha\\|$")
    ax.set_ylabel("distance to output cocycle")
    ax.set_title(f"correction trials ({rows[0]['method'] if rows else '?'})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def spectrum_figure(report: dict, path: str) -> None:
    """Bar chart of per-link second eigenvalues with the global value marked."""
    table = report.get("link_table") or []
    fig, ax = plt.subplots(figsize=(6, 4.5))
    if table:
        ax.bar([row["vertex"] for row in table], [row["lambda2"] for row in table],
               width=0.9, label="link $\\lambda_2$")
    for key, style in (("lambda2", "r--"), ("local_lambda", "g:"), ("trickling_bound", "b-.")):
        val = report.get(key)
        if val is not None:
            ax.axhline(val, ls=style[1:], color=style[0], lw=1, label=key)
    ax.set_xlabel("vertex")
    ax.set_ylabel("$\\lambda_2$")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
