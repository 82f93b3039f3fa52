import os
from functools import reduce
from typing import Any, Dict, List, Optional

import pandas as pd
import wandb

from copresence.config import MetricsConfig
from copresence.logger import init_logger
from copresence.metrics.constants import EPOCH_KEY, EpochMetrics
from copresence.metrics.data_series import DataSeries
from copresence.metrics.figures import plot_lines

logger = init_logger(__name__)

LOSS_CURVE_FILE = "loss_curve"


class MetricsStore:
    """Per-epoch training curves of one run."""

    def __init__(
        self,
        config: MetricsConfig,
        run_config: Optional[Dict[str, Any]] = None,
    ) -> None:
        self._config = config
        self._run_config = run_config or {}
        self._series: Dict[EpochMetrics, DataSeries] = {
            metric: DataSeries(
                EPOCH_KEY,
                metric.value,
                save_plots=config.write_figures,
            )
            for metric in EpochMetrics
        }
        self._init_wandb()

    def _init_wandb(self):
        if not self._config.wandb_project or wandb.run:
            return

        wandb.init(
            project=self._config.wandb_project,
            group=self._config.wandb_group,
            name=self._config.wandb_run_name,
            config=self._run_config,
        )

    def on_epoch_end(self, epoch: int, values: Dict[EpochMetrics, float]) -> None:
        for metric, value in values.items():
            self._series[metric].put(epoch, float(value))
        if wandb.run:
            wandb.log({metric.value: float(value) for metric, value in values.items()}, step=epoch)

    def series(self, metric: EpochMetrics) -> List[float]:
        return self._series[metric].values()

    def to_df(self) -> pd.DataFrame:
        frames = [s.to_df() for s in self._series.values() if len(s)]
        if not frames:
            return pd.DataFrame(columns=[EPOCH_KEY] + [m.value for m in EpochMetrics])
        merged_df = reduce(
            lambda left, right: pd.merge(left, right, on=[EPOCH_KEY], how="outer"),
            frames,
        )
        return merged_df.sort_values(EPOCH_KEY).reset_index(drop=True)

    def plot(self, base_path: str) -> pd.DataFrame:
        os.makedirs(base_path, exist_ok=True)
        merged_df = self.to_df()
        merged_df.to_csv(f"{base_path}/{LOSS_CURVE_FILE}.csv", index=False, float_format="%.10g")

        if wandb.run:
            wandb.log({f"{LOSS_CURVE_FILE}_table": wandb.Table(dataframe=merged_df)})

        loss_columns = [
            m.value
            for m in (EpochMetrics.TRAIN_LOSS, EpochMetrics.VAL_LOSS)
            if m.value in merged_df and merged_df[m.value].notna().any()
        ]
        if self._config.write_figures and len(merged_df) and loss_columns:
            plot_lines(merged_df, EPOCH_KEY, loss_columns, base_path, LOSS_CURVE_FILE)

        curves_path = f"{base_path}/curves"
        os.makedirs(curves_path, exist_ok=True)
        for metric, data_series in self._series.items():
            data_series.plot_step(curves_path, metric.value)
        return merged_df
