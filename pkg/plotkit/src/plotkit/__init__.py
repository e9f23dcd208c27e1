"""Batch renderer for the catkerr CLI's CSV/JSON artifacts.

The package is deliberately decoupled from the simulation code: it consumes
only the documented file schemas (``wigner_*.csv`` with header ``x,p,w``,
``timeseries.csv``, ``sweep_*.csv``, ``summary.json``) and renders them to
raster images.
"""

from .render import PlotJob, render
from .schemas import (
    SchemaError,
    SweepData,
    TimeseriesData,
    WignerData,
    read_summary,
    read_sweep_csv,
    read_timeseries_csv,
    read_wigner_csv,
    write_wigner_csv,
)

__version__ = "0.1.0"

__all__ = [
    "PlotJob",
    "render",
    "SchemaError",
    "WignerData",
    "TimeseriesData",
    "SweepData",
    "read_wigner_csv",
    "write_wigner_csv",
    "read_timeseries_csv",
    "read_sweep_csv",
    "read_summary",
    "__version__",
]
