"""
SVG figures of simulation output, rendered off-screen with matplotlib.
"""

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from .models import RateFit  # noqa: E402

logger = logging.getLogger(__name__)

_CURVE_STYLES = {
    "lower": {"color": "tab:red", "linestyle": "--"},
    "upper": {"color": "tab:green", "linestyle": "--"},
    "descendant_upper": {"color": "tab:purple", "linestyle": ":"},
    "random": {"color": "gray", "linestyle": "-."},
}


def plot_risk_boxplots(
    samples: pd.DataFrame,
    estimator: str,
    path: Union[str, Path],
    bounds: Optional[pd.DataFrame] = None,
) -> Path:
    """
    Boxplots of one estimator's risk per tree size, one panel per alpha.

    Args:
        samples: Frame with the samples.csv columns
        estimator: Estimator to plot
        path: Destination .svg file
        bounds: Optional bound curves (bounds.csv columns) to overlay

    Returns:
        The written path
    """
    frame = samples[samples["estimator"] == estimator]
    alphas = sorted(frame["alpha"].unique())
    fig, axes = plt.subplots(1, max(len(alphas), 1), figsize=(5 * max(len(alphas), 1), 4), squeeze=False)
    for ax, alpha in zip(axes[0], alphas):
        cell = frame[frame["alpha"] == alpha]
        sizes = sorted(cell["n"].unique())
        positions = np.arange(1, len(sizes) + 1)
        ax.boxplot([cell[cell["n"] == n]["risk"].to_numpy() for n in sizes], positions=positions, widths=0.5)
        if bounds is not None:
            overlay = bounds[(bounds["alpha"] == alpha) & bounds["n"].isin(sizes)]
            for curve, rows in overlay.groupby("curve", sort=True):
                rows = rows.set_index("n").loc[sizes]
                ax.plot(positions, rows["value"].to_numpy(), label=curve, **_CURVE_STYLES.get(curve, {}))
            ax.legend(fontsize=8)
        ax.set_yscale("log")
        ax.set_xticks(positions)
        ax.set_xticklabels([str(n) for n in sizes])
        ax.set_xlabel("n")
        ax.set_ylabel("risk")
        ax.set_title(f"{estimator}, alpha = {alpha:g}")
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="svg", bbox_inches="tight")
    plt.close(fig)
    logger.debug("Wrote %s", path)
    return path


def plot_rates(
    summaries: pd.DataFrame,
    fits: Sequence[RateFit],
    path: Union[str, Path],
    statistic: str = "median",
) -> Path:
    """
    Log-log plot of a summary statistic against n with the fitted power laws.

    Returns:
        The written path
    """
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for fit in fits:
        rows = summaries[(summaries["estimator"] == fit.estimator) & (summaries["alpha"] == fit.alpha)]
        rows = rows.sort_values("n")
        label = f"{fit.estimator}, alpha={fit.alpha:g} (slope {fit.slope:.2f})"
        (line,) = ax.plot(rows["n"], rows[statistic], "o", label=label)
        n = np.asarray(fit.sizes, dtype=float)
        ax.plot(n, np.exp(fit.intercept) * n ** fit.slope, "-", color=line.get_color(), alpha=0.7)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel(f"{statistic} risk")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="svg", bbox_inches="tight")
    plt.close(fig)
    logger.debug("Wrote %s", path)
    return path
