"""The three figure kinds, rendered with a fixed deterministic style.

Fitted slopes are read from the CSV and annotated verbatim, never refit
here; the numeric truth lives in the producing toolkit.  SVG output is
byte-stable: fixed hash salt, no creation date, fixed figure geometry.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .schemas import SchemaError, read_probe_csv, read_series_csv  # noqa: E402

BASE_STYLE = {
    "svg.hashsalt": "halfwave-figures",
    "svg.fonttype": "none",  # keep annotations as searchable text
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "axes.grid": True,
    "grid.alpha": 0.35,
    "font.size": 10,
    "lines.linewidth": 1.4,
}


class FigureKind(enum.Enum):
    SEPARATION_CURVES = "separation-curves"
    SCALING_LOGLOG = "scaling-loglog"
    RATIO_PANEL = "ratio-panel"


@dataclass(frozen=True)
class FigureSpec:
    input_csv: Path
    kind: FigureKind
    output: Path
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    style: dict | None = None

    def __post_init__(self):
        if not Path(self.input_csv).exists():
            raise SchemaError(f"input CSV does not exist: {self.input_csv}")


def _no_data(ax) -> None:
    ax.annotate("no data", xy=(0.5, 0.5), xycoords="axes fraction",
                ha="center", va="center", fontsize=14, color="0.45")


def _draw_separation_curves(ax, spec: FigureSpec) -> None:
    table = read_series_csv(spec.input_csv)
    ax.set_xlabel(spec.xlabel or "t")
    ax.set_ylabel(spec.ylabel or "norm value")
    if table.t.size == 0:
        _no_data(ax)
        return
    for name, col in table.columns.items():
        ax.plot(table.t, col, label=name)
    ax.legend(loc="best", fontsize=8)


def _draw_scaling_loglog(ax, spec: FigureSpec) -> None:
    table = read_probe_csv(spec.input_csv)
    ax.set_xlabel(spec.xlabel or "eps")
    ax.set_ylabel(spec.ylabel or "value")
    if not table.rows:
        _no_data(ax)
        return
    ax.set_xscale("log")
    ax.set_yscale("log")
    for i, quantity in enumerate(table.quantities()):
        rows = table.select(quantity)
        eps = [r["eps"] for r in rows]
        vals = [r["value"] for r in rows]
        ax.plot(eps, vals, marker="o", label=quantity)
        # slope and prediction are pass-through from the CSV, not refit
        note = (f"{quantity}: fitted slope = {rows[0]['fitted_slope']:.3f} "
                f"(predicted {rows[0]['predicted_exponent']:.3f})")
        ax.annotate(note, xy=(0.02, 0.04 + 0.06 * i), xycoords="axes fraction", fontsize=8)
    ax.legend(loc="best", fontsize=8)


def _draw_ratio_panel(ax, spec: FigureSpec) -> None:
    table = read_probe_csv(spec.input_csv)
    ax.set_xlabel(spec.xlabel or "eps")
    ax.set_ylabel(spec.ylabel or "value / eps^predicted")
    if not table.rows:
        _no_data(ax)
        return
    ax.set_xscale("log")
    for quantity in table.quantities():
        rows = table.select(quantity)
        eps = [r["eps"] for r in rows]
        ratios = [r["value"] / r["eps"] ** r["predicted_exponent"] for r in rows]
        ax.plot(eps, ratios, marker="s", label=quantity)
    ax.axhline(0.0, color="0.6", linewidth=0.8)
    ax.legend(loc="best", fontsize=8)


_DRAWERS = {
    FigureKind.SEPARATION_CURVES: _draw_separation_curves,
    FigureKind.SCALING_LOGLOG: _draw_scaling_loglog,
    FigureKind.RATIO_PANEL: _draw_ratio_panel,
}

_TITLES = {
    FigureKind.SEPARATION_CURVES: "norm separation over time",
    FigureKind.SCALING_LOGLOG: "scaling against eps",
    FigureKind.RATIO_PANEL: "bound ratios",
}


def plot(spec: FigureSpec) -> Path:
    """Render the figure and return the output path."""
    style = dict(BASE_STYLE)
    style.update(spec.style or {})
    with matplotlib.rc_context(style):
        fig, ax = plt.subplots()
        try:
            _DRAWERS[spec.kind](ax, spec)
            ax.set_title(spec.title or _TITLES[spec.kind])
            fig.tight_layout()
            out = Path(spec.output)
            out.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(out, metadata=_stable_metadata(out))
        finally:
            plt.close(fig)
    return Path(spec.output)


def _stable_metadata(out: Path) -> dict | None:
    suffix = out.suffix.lower()
    if suffix == ".svg":
        return {"Date": None}  # drop the creation timestamp
    if suffix == ".png":
        return {"Software": None}
    return None
