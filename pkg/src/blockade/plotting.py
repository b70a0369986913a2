"""Render sweep results as self-contained SVG line charts.

Correlation columns (g2_*, g3_*) are plotted as log₁₀ with a horizontal
reference line at log₁₀ = 1 → 0, matching the logarithmic convention of
the reproduced figures; brightness columns stay linear.  CSV files hold
linear values only.
"""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

CORRELATION_COLUMNS = ("g2_a", "g2_b", "g2_c", "g3_a")
VALUE_COLUMNS = CORRELATION_COLUMNS + ("N_a", "N_b", "N_c")

_LABELS = {
    "g2_a": r"$\log_{10} g^{(2)}_a(0)$",
    "g2_b": r"$\log_{10} g^{(2)}_b(0)$",
    "g2_c": r"$\log_{10} g^{(2)}_c(0)$",
    "g3_a": r"$\log_{10} g^{(3)}_a(0)$",
    "N_a": r"$N_a$",
    "N_b": r"$N_b$",
    "N_c": r"$N_c$",
}


class PlotError(ValueError):
    """Records cannot be rendered (mixed axes, too few points, ...)."""


def _column(records, name):
    vals = []
    for r in records:
        if r.failed or r.obs is None:
            vals.append(None)
        else:
            vals.append(getattr(r.obs, name))
    return vals


def write_svg_plot(records, y_columns, path, title: str | None = None):
    """Plot the selected observable columns against the shared sweep axis.

    Columns whose values are all undefined are omitted; a warning naming
    them is embedded in the SVG metadata.  Raises PlotError on mixed sweep
    axes or fewer than two records.
    """
    if len(records) < 2:
        raise PlotError("cannot plot fewer than two records")
    axes = {tuple(r.axis_values) for r in records}
    if len(axes) != 1 or len(next(iter(axes))) != 1:
        raise PlotError("records must share exactly one sweep axis")
    unknown = [c for c in y_columns if c not in VALUE_COLUMNS]
    if unknown:
        raise PlotError(f"unknown plot columns {unknown}")
    if not y_columns:
        raise PlotError("no columns selected")

    axis_name = next(iter(axes))[0]
    x = [r.axis_values[axis_name] for r in records]

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    omitted = []
    for col in y_columns:
        ys = _column(records, col)
        log_scale = col in CORRELATION_COLUMNS
        pts = [(xi, math.log10(yi) if log_scale else yi)
               for xi, yi in zip(x, ys) if yi is not None
               and (not log_scale or yi > 0.0)]
        if not pts:
            omitted.append(col)
            continue
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                label=_LABELS[col], linewidth=1.2)
    if any(c in CORRELATION_COLUMNS for c in y_columns):
        ax.axhline(0.0, color="0.4", linewidth=0.8, linestyle="--")
    ax.set_xlabel(rf"{axis_name} / $\kappa$")
    ax.legend(loc="best", fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()

    metadata = {}
    if omitted:
        metadata["Description"] = (
            "warning: columns omitted (all values undefined): "
            + ", ".join(omitted)
        )
    fig.savefig(path, format="svg", metadata=metadata or None)
    plt.close(fig)
    return omitted
