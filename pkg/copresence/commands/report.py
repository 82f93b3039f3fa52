import argparse
import os
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

from copresence import __version__
from copresence.commands.common import add_config_argument, resolve_config
from copresence.errors import CompatibilityError, StorageError
from copresence.logger import init_logger, log_event
from copresence.metrics import plot_bars, plot_lines, write_table
from copresence.objectives import METRIC_COLUMNS, read_json, write_json
from copresence.objectives.reports import ESTIMATION_PREFIX, per_category_frame, strata_frame
from copresence.trainer import RunRecord

logger = init_logger(__name__)

DELTA_SUFFIX = "delta_pct"


@dataclass
class RunSummary:
    label: str
    run_dir: str
    record: RunRecord
    per_category: pd.DataFrame
    strata: pd.DataFrame


def load_run(run_dir: str, label: str) -> RunSummary:
    record = RunRecord.load(run_dir)
    path = os.path.join(run_dir, f"{ESTIMATION_PREFIX}.json")
    if not os.path.exists(path):
        raise StorageError(f"{run_dir} holds no {ESTIMATION_PREFIX}.json test report")
    payload = read_json(path)
    return RunSummary(
        label=label,
        run_dir=run_dir,
        record=record,
        per_category=per_category_frame(payload),
        strata=strata_frame(payload),
    )


def run_labels(run_dirs: Sequence[str]) -> List[str]:
    labels = []
    for run_dir in run_dirs:
        label = os.path.basename(os.path.normpath(run_dir)) or run_dir
        while label in labels:
            label = f"{label}'"
        labels.append(label)
    return labels


def relative_delta(ours: np.ndarray, base: np.ndarray) -> np.ndarray:
    """Signed percentage (ours - base) / base; 0 when both are 0, NaN when only base is."""
    ours = np.asarray(ours, dtype=np.float64)
    base = np.asarray(base, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = 100.0 * (ours - base) / base
    delta = np.where(base == 0, np.where(ours == 0, 0.0, np.nan), delta)
    return delta


def comparison_table(frames: Dict[str, pd.DataFrame]) -> pd.DataFrame:
    """Side-by-side metric columns per run; runs after the first get delta columns against it."""
    labels = list(frames)
    base_label = labels[0]
    base = frames[base_label]
    columns = {}
    for name in METRIC_COLUMNS:
        for label in labels:
            columns[f"{name}[{label}]"] = frames[label][name].reindex(base.index)
        for label in labels[1:]:
            columns[f"{name}[{label}] {DELTA_SUFFIX}"] = relative_delta(
                frames[label][name].reindex(base.index), base[name]
            )
    table = pd.DataFrame(columns, index=base.index)
    table.index.name = base.index.name
    return table


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser("report", help="Compare finished training runs.")
    add_config_argument(parser)
    parser.add_argument(
        "run_dirs",
        nargs="+",
        help="Run directories; the first one is the baseline of the delta columns.",
    )
    parser.add_argument("--out-dir", type=str, default="report", help="Report directory.")
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    runs = [load_run(d, label) for d, label in zip(args.run_dirs, run_labels(args.run_dirs))]

    base = runs[0]
    for other in runs[1:]:
        if other.record.categories != base.record.categories:
            raise CompatibilityError(
                f"{other.run_dir} scores categories {other.record.categories}, "
                f"{base.run_dir} scores {base.record.categories}"
            )

    per_category = comparison_table({r.label: r.per_category for r in runs})
    per_category.index.name = "category"
    strata = comparison_table({r.label: r.strata for r in runs})

    out_dir = args.out_dir
    write_table(per_category, out_dir, "per_category_comparison")
    write_table(strata, out_dir, "strata_comparison")
    write_json(
        {
            "runs": {r.label: r.run_dir for r in runs},
            "baseline": base.label,
            "config_hashes": {r.label: r.record.config_hash for r in runs},
            "configs": {r.label: r.record.config for r in runs},
            "version": __version__,
        },
        os.path.join(out_dir, "report.json"),
    )

    if config.metrics.write_figures:
        long_df = pd.concat(
            [r.per_category.assign(run=r.label).rename_axis("category").reset_index() for r in runs]
        )
        plot_bars(long_df, "category", "ssd", out_dir, "per_category_ssd", color="run")
        strata_df = pd.DataFrame(
            {r.label: r.strata["ssd"] for r in runs}, index=base.strata.index
        ).rename_axis("stratum").reset_index()
        plot_lines(strata_df, "stratum", [r.label for r in runs], out_dir, "strata_ssd")

    with pd.option_context("display.width", 160, "display.max_columns", 40):
        print(per_category)
        print(strata)
    log_event(logger, "report", runs=[r.run_dir for r in runs], out_dir=out_dir)
    return 0
