import os
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from copresence.config import CopresenceConfig
from copresence.errors import ConfigError
from copresence.logger import init_logger, log_event
from copresence.metrics import plot_bars, write_table
from copresence.objectives import METRIC_COLUMNS
from copresence.trainer.run_record import RunRecord, append_run_record
from copresence.trainer.trainer import train
from copresence.types import AblationAxis, LossType
from copresence.utils.parallel import ParallelRunner
from copresence.weather_sim import WeatherDataset

logger = init_logger(__name__)

MEDIAN_ROW = "median"

BACKBONE = "backbone"
WITH_MFE = "+mfe"
WITH_PUL = "+pul"
FULL = "+mfe+pul"
COMPONENT_VALUES = [BACKBONE, WITH_MFE, WITH_PUL, FULL]
_COMPONENT_ALIASES = {"full": FULL, "w/o-unc": BACKBONE, "no-unc": BACKBONE}

DEFAULT_VALUES: Dict[AblationAxis, List[str]] = {
    AblationAxis.LATENT_SIZE: ["4", "8", "16", "24", "32"],
    AblationAxis.LOSS_KIND: ["l1", "smooth_l1", "l2"],
    AblationAxis.LAMBDA: ["1e-3", "1e-4", "1e-5", "1e-6", "1e-7"],
    AblationAxis.COMPONENT: list(COMPONENT_VALUES),
}


def apply_component(config: CopresenceConfig, component: str) -> CopresenceConfig:
    """Switches weather tokens and the latent branch on or off.

    The backbone drops both and trains on the data term alone.
    """
    component = _COMPONENT_ALIASES.get(component, component)
    if component not in COMPONENT_VALUES:
        raise ConfigError(
            f"Unknown component {component!r}; valid components: {', '.join(COMPONENT_VALUES)}"
        )
    train_config = replace(
        config.train,
        disable_mfe=component in (BACKBONE, WITH_PUL),
        disable_pul=component in (BACKBONE, WITH_MFE),
    )
    if component == BACKBONE:
        train_config = replace(train_config, kl_weight=0.0)
    return replace(config, train=train_config)


def apply_axis_value(config: CopresenceConfig, axis: AblationAxis, value: str) -> CopresenceConfig:
    try:
        if axis == AblationAxis.LATENT_SIZE:
            return replace(config, model=replace(config.model, latent_size=int(value)))
        if axis == AblationAxis.LOSS_KIND:
            return replace(config, train=replace(config.train, loss_type=LossType.from_str(value)))
        if axis == AblationAxis.LAMBDA:
            return replace(config, train=replace(config.train, kl_weight=float(value)))
    except ValueError as e:
        raise ConfigError(f"Invalid {axis} value {value!r}: {e}") from None
    if axis == AblationAxis.COMPONENT:
        return apply_component(config, value)
    raise ConfigError(f"Unknown ablation axis {axis}")


def with_seed(config: CopresenceConfig, seed: int) -> CopresenceConfig:
    return replace(
        config,
        model=replace(config.model, seed=seed),
        train=replace(config.train, seed=seed),
    )


@dataclass
class AblationJob:
    config: CopresenceConfig
    dataset_dir: str
    run_dir: str
    value: str
    seed: int


def _run_job(job: AblationJob) -> Dict[str, Any]:
    dataset = WeatherDataset(job.dataset_dir)
    result = train(job.config, dataset, job.run_dir)
    if not result.record.final_estimation:
        raise ConfigError(f"{job.dataset_dir} has no test split to score the ablation on")
    return {"value": job.value, "seed": job.seed, "record": result.record.to_dict()}


def ablation_sweep(
    axis: AblationAxis,
    values: Optional[Sequence[str]],
    base_config: CopresenceConfig,
    dataset_dir: str,
    out_dir: str,
    seeds: Sequence[int] = (0,),
    num_workers: int = 1,
) -> pd.DataFrame:
    """One training run per (value, seed); per-seed rows plus a median row per value."""
    values = list(values) if values is not None else list(DEFAULT_VALUES[axis])
    if not values:
        raise ConfigError("ablation values must be non-empty")
    if not seeds:
        raise ConfigError("ablation needs at least one seed")

    jobs = [
        AblationJob(
            config=with_seed(apply_axis_value(base_config, axis, value), seed),
            dataset_dir=dataset_dir,
            run_dir=os.path.join(out_dir, f"{axis}={value}", f"seed={seed}"),
            value=value,
            seed=seed,
        )
        for value in values
        for seed in seeds
    ]
    logger.info(f"Ablation over {axis}: {len(values)} values x {len(seeds)} seeds")
    outcomes = ParallelRunner(num_workers).map(_run_job, jobs)

    rows = []
    for job, outcome in zip(jobs, outcomes):
        record = RunRecord.from_dict(outcome["record"])
        append_run_record(out_dir, record, axis=str(axis), value=job.value, run_dir=job.run_dir)
        rows.append(
            {
                str(axis): job.value,
                "seed": str(job.seed),
                **{name: record.final_estimation.get(name) for name in METRIC_COLUMNS},
            }
        )

    table = ablation_table(pd.DataFrame(rows), str(axis), values)
    write_table(table, out_dir, f"ablation_{axis}", index=False)
    medians = table[table["seed"] == MEDIAN_ROW]
    if base_config.metrics.write_figures:
        long_df = medians.melt(id_vars=[str(axis)], value_vars=METRIC_COLUMNS, var_name="metric")
        plot_bars(long_df, str(axis), "value", out_dir, f"ablation_{axis}", color="metric")
    log_event(
        logger,
        "ablation",
        axis=str(axis),
        rows=medians[[str(axis)] + METRIC_COLUMNS].to_dict(orient="records"),
    )
    return table


def ablation_table(rows: pd.DataFrame, axis: str, values: Sequence[str]) -> pd.DataFrame:
    """Per-seed rows of each value followed by that value's median row."""
    frames = []
    for value in values:
        per_seed = rows[rows[axis] == value]
        median = {axis: value, "seed": MEDIAN_ROW}
        median.update(
            {name: per_seed[name].astype(float).median() for name in METRIC_COLUMNS}
        )
        frames.append(per_seed)
        frames.append(pd.DataFrame([median]))
    table = pd.concat(frames, ignore_index=True)
    for name in METRIC_COLUMNS:
        table[name] = table[name].astype(float)
    return table[[axis, "seed"] + METRIC_COLUMNS]
