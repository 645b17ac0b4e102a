"""Render the witnessing-suite CSV files into figures.

Reads only the documented CSV schemas; no physics is recomputed here.
Each figure id knows which files it wants, how to panel them and which
axes to label.  ``render`` returns a summary (panel and series counts,
axis ranges) so callers can verify the plot specification without parsing
the image.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .style import SERIES_COLORS, STYLE  # noqa: E402


class FigureDataError(ValueError):
    """Missing, empty or schema-violating input CSV."""


@dataclass(frozen=True)
class FigureSpec:
    """One render job: figure id, input CSVs, output image path."""

    figure_id: str
    csv_paths: tuple[Path, ...]
    output_path: Path
    xlabel: str
    ylabel: str
    panels: tuple[tuple[int, ...], ...]  # csv indices per panel
    logy: bool = False
    group_column: str | None = None


@dataclass(frozen=True)
class RenderSummary:
    figure_id: str
    output_path: Path
    panel_count: int
    series_count: int
    x_range: tuple[float, float]
    y_range: tuple[float, float]


#: figure id -> (filename patterns, x column, y column, axis labels, options)
LAYOUTS = {
    "fig3a": {"patterns": ["fig3a_delta*.csv"], "x": "F", "y": "Ps",
              "xlabel": "fidelity F", "ylabel": "success probability"},
    "fig3b": {"patterns": ["fig3b_n*.csv"], "x": "F", "y": "Ps",
              "xlabel": "fidelity F", "ylabel": "success probability"},
    "fig4": {"patterns": ["fig4_d*.csv"], "x": "j", "y": "PrM",
             "xlabel": "auxiliary index j", "ylabel": "Pr(M)",
             "panel_per_file": True},
    "fig5": {"patterns": ["fig5a_*.csv", "fig5b_*.csv", "fig5c_*.csv",
                          "fig5d_*.csv"],
             "x": None, "y": None, "xlabel": "", "ylabel": "",
             "panel_per_pattern": True,
             "panel_schemas": [("F", "Ps"), ("F", "Ps"), ("F", "Ps"),
                               ("j", "fidelity")]},
    "fig7": {"patterns": ["fig7b_*.csv", "fig7c.csv", "fig7d.csv"],
             "x": None, "y": None, "xlabel": "", "ylabel": "",
             "panel_per_pattern": True,
             "panel_schemas": [("F", "Ps"), ("r", "gap"), ("F", "Fprime")]},
    "fig8": {"patterns": ["fig8.csv"], "x": "F", "y": "R",
             "xlabel": "fidelity F", "ylabel": "resources R",
             "group_column": "protocol", "logy": True},
}


def read_curve(path: Path, x_col: str, y_col: str,
               group_column: str | None = None) -> dict[str, tuple[list, list]]:
    """Load one CSV into {series label: (x values, y values)}."""
    path = Path(path)
    if not path.exists():
        raise FigureDataError(f"missing input CSV: {path}")
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise FigureDataError(f"{path} is empty")
        needed = {x_col, y_col} | ({group_column} if group_column else set())
        missing = needed - set(reader.fieldnames)
        if missing:
            raise FigureDataError(
                f"{path} lacks columns {sorted(missing)}; has {reader.fieldnames}")
        series: dict[str, tuple[list, list]] = {}
        for line, row in enumerate(reader, start=2):
            label = row[group_column] if group_column else path.stem
            xs, ys = series.setdefault(label, ([], []))
            try:
                xs.append(float(row[x_col]))
                ys.append(float(row[y_col]))
            except (TypeError, ValueError):
                raise FigureDataError(
                    f"{path}:{line}: non-numeric value in "
                    f"{x_col!r}/{y_col!r}") from None
    if not series or all(len(xs) == 0 for xs, _ in series.values()):
        raise FigureDataError(f"{path} holds no data rows")
    return series


def build_spec(figure_id: str, input_dir: Path, output_path: Path) -> FigureSpec:
    """Resolve the input files a figure expects inside ``input_dir``."""
    if figure_id not in LAYOUTS:
        raise FigureDataError(f"unknown figure id {figure_id!r}; "
                              f"choose from {sorted(LAYOUTS)}")
    layout = LAYOUTS[figure_id]
    input_dir = Path(input_dir)
    paths: list[Path] = []
    panels: list[tuple[int, ...]] = []
    for pattern in layout["patterns"]:
        matches = sorted(input_dir.glob(pattern))
        if not matches:
            raise FigureDataError(
                f"no file matching {pattern!r} under {input_dir}")
        start = len(paths)
        paths.extend(matches)
        if layout.get("panel_per_pattern"):
            panels.append(tuple(range(start, len(paths))))
    if layout.get("panel_per_file"):
        panels = [(i,) for i in range(len(paths))]
    elif not layout.get("panel_per_pattern"):
        panels = [tuple(range(len(paths)))]
    return FigureSpec(
        figure_id=figure_id,
        csv_paths=tuple(paths),
        output_path=Path(output_path),
        xlabel=layout["xlabel"],
        ylabel=layout["ylabel"],
        panels=tuple(panels),
        logy=layout.get("logy", False),
        group_column=layout.get("group_column"),
    )


def render(spec: FigureSpec) -> RenderSummary:
    """Draw the figure and write the image file."""
    layout = LAYOUTS[spec.figure_id]
    panel_schemas = layout.get("panel_schemas")
    n_panels = len(spec.panels)
    ncols = min(n_panels, 2)
    nrows = (n_panels + ncols - 1) // ncols
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(nrows, ncols,
                                 figsize=(4.2 * ncols, 3.2 * nrows),
                                 squeeze=False)
        series_count = 0
        x_lo = y_lo = float("inf")
        x_hi = y_hi = float("-inf")
        for panel_idx, csv_idxs in enumerate(spec.panels):
            ax = axes[panel_idx // ncols][panel_idx % ncols]
            if panel_schemas:
                x_col, y_col = panel_schemas[panel_idx]
                xlabel, ylabel = x_col, y_col
            else:
                x_col, y_col = layout["x"], layout["y"]
                xlabel, ylabel = spec.xlabel, spec.ylabel
            for idx in csv_idxs:
                curves = read_curve(spec.csv_paths[idx], x_col, y_col,
                                    spec.group_column)
                for label, (xs, ys) in sorted(curves.items()):
                    color = SERIES_COLORS[series_count % len(SERIES_COLORS)]
                    ax.plot(xs, ys, label=label, color=color)
                    series_count += 1
                    x_lo, x_hi = min(x_lo, *xs), max(x_hi, *xs)
                    y_lo, y_hi = min(y_lo, *ys), max(y_hi, *ys)
            if spec.logy:
                ax.set_yscale("log")
            ax.set_xlabel(xlabel)
            ax.set_ylabel(ylabel)
            ax.legend()
        for panel_idx in range(n_panels, nrows * ncols):
            axes[panel_idx // ncols][panel_idx % ncols].set_axis_off()
        fig.suptitle(spec.figure_id)
        spec.output_path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(spec.output_path)
        plt.close(fig)
    return RenderSummary(
        figure_id=spec.figure_id,
        output_path=spec.output_path,
        panel_count=n_panels,
        series_count=series_count,
        x_range=(x_lo, x_hi),
        y_range=(y_lo, y_hi),
    )


def render_figure(figure_id: str, input_dir: Path,
                  output_path: Path) -> RenderSummary:
    return render(build_spec(figure_id, input_dir, output_path))
