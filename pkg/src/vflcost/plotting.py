"""Matplotlib rendering of sweep results to raster/vector figure files."""

from __future__ import annotations

from .errors import ConfigError, OutputError
from .report import SCHEME_COLUMNS, SweepResult

_STYLES = {"CL/CI": ("#1f77b4", "o"), "CL/DI": ("#d95f02", "s"),
           "DL/CI": ("#2ca02c", "^"), "DL/DI": ("#d62728", "d")}


def render_figure(result: SweepResult, path: str) -> None:
    """Render a sweep as a matplotlib figure (format from the extension)."""
    if len(result.rows) < 2:
        raise ConfigError("a figure needs at least 2 sweep rows")
    import matplotlib
    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    xs = [row.sweep_value for row in result.rows]
    with plt.rc_context({"font.size": 11, "axes.grid": True,
                         "grid.alpha": 0.3, "legend.frameon": False}):
        fig, ax = plt.subplots(figsize=(6.2, 4.2))
        for code, _ in SCHEME_COLUMNS:
            color, marker = _STYLES[code]
            ax.plot(xs, result.column(code), color=color, marker=marker,
                    markersize=3.5, linewidth=1.6, label=code)
        ax.set_xlabel(result.axis_label)
        ax.set_ylabel("predictive loss (bits)")
        ax.legend(loc="best")
        fig.tight_layout()
        try:
            fig.savefig(path, dpi=150)
        except OSError as exc:
            raise OutputError(f"cannot write figure to {path}: {exc}") from exc
        finally:
            plt.close(fig)
