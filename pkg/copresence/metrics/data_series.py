import math
from collections import defaultdict
from typing import Dict, List, Optional

import pandas as pd
import plotly_express as px
import wandb

from copresence.logger import init_logger
from copresence.metrics.figures import write_figure, write_table

logger = init_logger(__name__)


class DataSeries:
    """One training curve: a y value per x, repeated x values averaged on consolidate."""

    def __init__(
        self,
        x_name: str,
        y_name: str,
        save_table_to_wandb: bool = True,
        save_plots: bool = True,
    ) -> None:
        self._points: Dict[float, List[float]] = defaultdict(list)
        self._x_name = x_name
        self._y_name = y_name
        self._last_y = 0.0
        self._save_table_to_wandb = save_table_to_wandb
        self._save_plots = save_plots

    def __len__(self) -> int:
        return len(self._points)

    @property
    def metric_name(self) -> str:
        return self._y_name

    @property
    def last(self) -> float:
        return self._last_y

    def put(self, data_x: float, data_y: float) -> None:
        self._points[data_x].append(data_y)
        self._last_y = data_y

    def consolidate(self) -> None:
        self._points = defaultdict(
            list, {x: [sum(ys) / len(ys)] for x, ys in sorted(self._points.items())}
        )
        if self._points:
            self._last_y = self._points[max(self._points)][0]

    def values(self) -> List[float]:
        return [ys[-1] for _, ys in sorted(self._points.items())]

    def to_df(self) -> pd.DataFrame:
        rows = [(x, ys[-1]) for x, ys in sorted(self._points.items())]
        return pd.DataFrame(rows, columns=[self._x_name, self._y_name])

    def _log_summary(self, df: pd.DataFrame, plot_name: str) -> None:
        # diverged epochs carry NaN and are left out of the summary
        finite = df[self._y_name][df[self._y_name].map(math.isfinite)]
        if finite.empty:
            logger.warning(f"{plot_name}: no finite {self._y_name} values")
            return
        logger.debug(
            f"{plot_name}: {self._y_name} min {finite.min():.6g}"
            f" max {finite.max():.6g} last {df[self._y_name].iloc[-1]:.6g}"
        )
        if wandb.run:
            wandb.run.summary[f"{plot_name}_min"] = float(finite.min())
            wandb.run.summary[f"{plot_name}_last"] = float(df[self._y_name].iloc[-1])

    def plot_step(self, path: str, plot_name: str, y_axis_label: Optional[str] = None) -> None:
        if not self._points:
            return

        self.consolidate()
        df = self.to_df()
        self._log_summary(df, plot_name)
        write_table(df, path, plot_name, index=False)

        if wandb.run and self._save_table_to_wandb:
            wandb.log({f"{plot_name}_table": wandb.Table(dataframe=df)})

        if self._save_plots:
            fig = px.line(
                df,
                x=self._x_name,
                y=self._y_name,
                markers=True,
                labels={self._y_name: y_axis_label or self._y_name},
            )
            write_figure(fig, f"{path}/{plot_name}.svg")
