"""Plot renderer for the rnls simulator's CSV and snapshot files."""

from .formats import (DiagnosticsTable, ParseError, Snapshot, read_diagnostics,
                      read_fit_report, read_snapshot)
from .render import KINDS, PlotJob, render

__version__ = "0.1.0"
