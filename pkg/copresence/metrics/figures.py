"""SVG figures and CSV tables for reports, written next to each other."""
import os
from typing import List, Optional

import pandas as pd
import plotly_express as px

from copresence.errors import StorageError
from copresence.logger import init_logger

logger = init_logger(__name__)


def write_figure(fig, path: str) -> bool:
    """Writes a plotly figure through kaleido; returns False when the renderer is unavailable."""
    try:
        fig.write_image(path)
    except OSError as e:
        raise StorageError(f"Cannot write figure {path}: {e}") from None
    except Exception as e:  # kaleido raises its own types when no renderer is installed
        logger.warning(f"Skipping figure {path}: {e}")
        return False
    return True


def write_table(df: pd.DataFrame, path: str, name: str, index: bool = True) -> str:
    file_path = f"{path}/{name}.csv"
    try:
        os.makedirs(path, exist_ok=True)
        df.to_csv(file_path, index=index, float_format="%.10g")
    except OSError as e:
        raise StorageError(f"Cannot write table {file_path}: {e}") from None
    return file_path


def plot_bars(
    df: pd.DataFrame,
    x: str,
    y: str,
    path: str,
    name: str,
    color: Optional[str] = None,
    error_y: Optional[str] = None,
) -> bool:
    fig = px.bar(df, x=x, y=y, color=color, error_y=error_y, barmode="group")
    return write_figure(fig, f"{path}/{name}.svg")


def plot_lines(df: pd.DataFrame, x: str, y: List[str], path: str, name: str) -> bool:
    long_df = df.melt(id_vars=[x], value_vars=y, var_name="series", value_name="value")
    fig = px.line(long_df, x=x, y="value", color="series", markers=True)
    return write_figure(fig, f"{path}/{name}.svg")
