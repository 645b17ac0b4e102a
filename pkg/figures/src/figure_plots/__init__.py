"""Publication-style rendering of the witnessing suite's CSV outputs."""

from .render import (FigureDataError, FigureSpec, RenderSummary, build_spec,
                     render, render_figure)

__version__ = "0.1.0"
