"""Figure generation for threatsim CSV outputs."""

__version__ = "0.1.0"

from .csvio import InputError, Table, load_table
from .render import (
    KINDS,
    FigureSpec,
    Marker,
    PlotData,
    barycentric_to_xy,
    build_plot_data,
    render,
)

__all__ = [
    "KINDS",
    "FigureSpec",
    "InputError",
    "Marker",
    "PlotData",
    "Table",
    "barycentric_to_xy",
    "build_plot_data",
    "load_table",
    "render",
]
