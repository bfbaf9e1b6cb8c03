"""Throughput-vs-threads charts from concgraph benchmark CSV files."""

from .render import (
    CSV_COLUMNS,
    PlotJob,
    SchemaError,
    collect_series,
    parse_csv,
    render,
    rows_to_csv_text,
)

__all__ = [
    "CSV_COLUMNS",
    "PlotJob",
    "SchemaError",
    "collect_series",
    "parse_csv",
    "render",
    "rows_to_csv_text",
]
