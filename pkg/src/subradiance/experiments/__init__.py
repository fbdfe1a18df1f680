from .figures import FIGURES, figure_panels, reproduce_figure
from .fitting import PowerLawFit, fit_power_law, parity_average, parity_aware_fit
from .sweep import (
    CSV_COLUMNS,
    ComparisonRecord,
    SweepSpec,
    benchmark_compare,
    run_sweep,
)

__all__ = [
    "CSV_COLUMNS",
    "FIGURES",
    "ComparisonRecord",
    "PowerLawFit",
    "SweepSpec",
    "benchmark_compare",
    "figure_panels",
    "fit_power_law",
    "parity_average",
    "parity_aware_fit",
    "reproduce_figure",
    "run_sweep",
]
