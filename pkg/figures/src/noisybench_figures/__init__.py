"""Plotting companion for noisybench: figures and tables from its CSV output."""

__version__ = "0.1.0"

from .render import (
    SchemaError,
    build_problem_figure,
    load_results,
    load_summary,
    render_figures,
    summary_markdown,
)

__all__ = [
    "SchemaError",
    "build_problem_figure",
    "load_results",
    "load_summary",
    "render_figures",
    "summary_markdown",
]
