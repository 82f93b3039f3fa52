from copresence.metrics.constants import EPOCH_KEY, EpochMetrics
from copresence.metrics.data_series import DataSeries
from copresence.metrics.figures import plot_bars, plot_lines, write_figure, write_table
from copresence.metrics.metrics_store import LOSS_CURVE_FILE, MetricsStore

__all__ = [
    "EPOCH_KEY",
    "LOSS_CURVE_FILE",
    "DataSeries",
    "EpochMetrics",
    "MetricsStore",
    "plot_bars",
    "plot_lines",
    "write_figure",
    "write_table",
]
