import os
import time
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import yaml

from copresence.config import CopresenceConfig, ModelConfig, TrainConfig, dataclass_to_dict
from copresence.errors import CompatibilityError, NonFiniteError, StorageError, TrainingError
from copresence.logger import format_event, init_logger, set_log_level
from copresence.metrics import EpochMetrics, MetricsStore
from copresence.model import MeFormer, ModelParams, save_checkpoint
from copresence.objectives import (
    LossReport,
    bce_multilabel,
    kl_gaussians,
    metric_suite,
    regression_loss,
    total_loss,
)
from copresence.tensor import Tape
from copresence.tensor import functional as F
from copresence.trainer.adam import AdamState, adam_step
from copresence.trainer.evaluator import EvaluationResult, evaluate_model, write_evaluation
from copresence.trainer.run_record import RunRecord, config_hash
from copresence.types import TaskType
from copresence.utils.random import derive_rng
from copresence.weather_sim import DatasetSplit, WeatherDataset

logger = init_logger(__name__)

CHECKPOINT_FILE = "checkpoint.npz"
TRAIN_LOG_FILE = "train_log.jsonl"
RESOLVED_CONFIG_FILE = "config.yml"

# stream keys of the generators derived from the training seed
_VAL_STREAM = 1
_SHUFFLE_STREAM = 2
_STEP_STREAM = 3

# paths that say where a run writes, not what it computes
_UNHASHED_KEYS = (
    ("generation", "output_dir"),
    ("generation", "num_workers"),
    ("metrics",),
    ("ablation",),
)


@dataclass
class TrainResult:
    model: MeFormer
    record: RunRecord
    run_dir: str
    checkpoint_path: str


def resolve_model_config(model: ModelConfig, train: TrainConfig) -> ModelConfig:
    """Applies the training ablation flags to the model config."""
    return replace(
        model,
        use_mfe=model.use_mfe and not train.disable_mfe,
        use_pul=model.use_pul and not train.disable_pul,
    )


def resolve_config(config: CopresenceConfig) -> CopresenceConfig:
    return replace(config, model=resolve_model_config(config.model, config.train))


def hashed_config(config_dict: Dict[str, Any]) -> Dict[str, Any]:
    hashed = {section: dict(values) for section, values in config_dict.items()}
    for key in _UNHASHED_KEYS:
        if len(key) == 1:
            hashed.pop(key[0], None)
        else:
            hashed.get(key[0], {}).pop(key[1], None)
    return hashed


def split_validation(
    split: DatasetSplit, fraction: float, seed: int
) -> Tuple[DatasetSplit, DatasetSplit]:
    """Seeded hold-out of `fraction` of the split; both parts keep manifest order."""
    total = len(split)
    num_val = int(round(fraction * total))
    if num_val >= total:
        num_val = 0
    order = derive_rng(seed, _VAL_STREAM).permutation(total)
    val = split.subset(np.sort(order[:num_val]))
    train = split.subset(np.sort(order[num_val:]))
    return replace(train, name="train"), replace(val, name="val")


class Trainer:
    """Seeded minibatch Adam over one MeFormer, keeping the best-validation weights."""

    def __init__(self, config: CopresenceConfig, dataset: WeatherDataset, run_dir: str) -> None:
        self._config = resolve_config(config)
        self._train_config = self._config.train
        self._dataset = dataset
        self._run_dir = run_dir

        model_config = self._config.model
        if dataset.num_categories != model_config.num_categories:
            raise CompatibilityError(
                f"dataset has {dataset.num_categories} categories, "
                f"model config expects {model_config.num_categories}"
            )
        if dataset.image_size != model_config.image_size:
            raise CompatibilityError(
                f"dataset images are {dataset.image_size}px, "
                f"model config expects {model_config.image_size}px"
            )

        self._config_dict = dataclass_to_dict(self._config)
        self._config_hash = config_hash(hashed_config(self._config_dict))
        self.model = MeFormer(model_config)
        self._adam_state = AdamState.zeros_like(dict(self.model.params.items()))
        self._log_lines: List[str] = []

    @property
    def config(self) -> CopresenceConfig:
        return self._config

    def _event(self, event: str, **fields: Any) -> None:
        line = format_event(event, **fields)
        logger.info(line)
        self._log_lines.append(line)

    def _targets(self, split: DatasetSplit, indices: np.ndarray) -> np.ndarray:
        if self._train_config.task == TaskType.CLASSIFICATION:
            return split.label_binary[indices].astype(np.float64)
        return split.label_prob[indices]

    def _data_loss(self, prediction, target):
        train_config = self._train_config
        if train_config.task == TaskType.CLASSIFICATION:
            return bce_multilabel(prediction, target)
        return regression_loss(
            prediction, target, train_config.loss_type, train_config.smooth_l1_delta
        )

    def _step(self, images: np.ndarray, target: np.ndarray, rng: np.random.Generator) -> LossReport:
        train_config = self._train_config
        with Tape() as tape:
            forward = self.model.forward_train(
                images,
                target,
                rng=rng,
                dropout=train_config.dropout,
                latent_mode=train_config.latent_mode,
            )
            data_loss = self._data_loss(forward.prediction, target)
            if forward.prior is not None:
                kl = F.mean(kl_gaussians(forward.posterior, forward.prior))
                report = total_loss(data_loss, kl, train_config.kl_weight)
            else:
                report = total_loss(data_loss, 0.0, train_config.kl_weight)
            tape.backward(report.objective)

        grads = {name: tensor.grad for name, tensor in self.model.params.items()}
        adam_step(
            dict(self.model.params.items()),
            grads,
            self._adam_state,
            lr=train_config.learning_rate,
            beta1=train_config.beta1,
            beta2=train_config.beta2,
            eps=train_config.eps,
            weight_decay=train_config.weight_decay,
        )
        self.model.params.zero_grad()
        return report

    def _validate(self, split: DatasetSplit) -> Tuple[float, float, float]:
        """(data loss, mean SSD, mean R^2) of mean-mode predictions."""
        output = self.model.predict(split.images, self._train_config.eval_batch_size)
        target = self._targets(split, np.arange(len(split)))
        loss = float(self._data_loss(output.prediction, target).values)
        report = metric_suite(output.prediction, split.label_prob)
        overall = report.overall
        return loss, overall["ssd"], overall["r2"]

    def train(self, max_samples: Optional[int] = None) -> TrainResult:
        train_config = self._train_config
        seed = train_config.seed
        started = time.perf_counter()

        full_split = self._dataset.split("train")
        limit = max_samples if max_samples is not None else train_config.max_samples
        if limit is not None:
            full_split = full_split.subset(np.arange(min(limit, len(full_split))))
        if len(full_split) == 0:
            raise TrainingError("the train split is empty")

        train_split, val_split = split_validation(full_split, train_config.val_fraction, seed)
        if len(val_split) == 0:
            logger.warning("No validation hold-out; selecting the checkpoint on the train split")
            val_split = replace(train_split, name="val")

        store = MetricsStore(self._config.metrics, self._config_dict)
        self._event(
            "train_start",
            config_hash=self._config_hash,
            train_samples=len(train_split),
            val_samples=len(val_split),
            parameters=self.model.params.num_parameters(),
        )

        record = RunRecord(
            config_hash=self._config_hash,
            config=self._config_dict,
            seed=seed,
            categories=self._dataset.categories,
            dataset_digest=self._dataset.digest,
        )
        best_arrays = self.model.params.to_arrays()
        best_ssd = np.inf
        batch_size = train_config.batch_size

        for epoch in range(train_config.epochs):
            order = derive_rng(seed, _SHUFFLE_STREAM, epoch).permutation(len(train_split))
            reports: List[LossReport] = []
            for batch, start in enumerate(range(0, len(order), batch_size)):
                indices = order[start : start + batch_size]
                rng = derive_rng(seed, _STEP_STREAM, epoch, batch)
                try:
                    reports.append(
                        self._step(
                            train_split.images[indices],
                            self._targets(train_split, indices),
                            rng,
                        )
                    )
                except NonFiniteError as e:
                    raise TrainingError(f"epoch {epoch}, batch {batch}: {e}") from None

            train_loss = float(np.mean([r.total for r in reports]))
            data_loss = float(np.mean([r.mse for r in reports]))
            kl = float(np.mean([r.kl for r in reports]))
            val_loss, val_ssd, val_r2 = self._validate(val_split)

            record.train_losses.append(train_loss)
            record.val_losses.append(val_loss)
            record.val_ssd.append(val_ssd)
            store.on_epoch_end(
                epoch,
                {
                    EpochMetrics.TRAIN_LOSS: train_loss,
                    EpochMetrics.TRAIN_DATA_LOSS: data_loss,
                    EpochMetrics.TRAIN_KL: kl,
                    EpochMetrics.VAL_LOSS: val_loss,
                    EpochMetrics.VAL_SSD: val_ssd,
                    EpochMetrics.VAL_R2: val_r2,
                },
            )
            self._event(
                "epoch",
                epoch=epoch,
                train_loss=train_loss,
                train_data_loss=data_loss,
                train_kl=kl,
                val_loss=val_loss,
                val_ssd=val_ssd,
            )

            if val_ssd < best_ssd:
                best_ssd = val_ssd
                best_arrays = self.model.params.to_arrays()
                record.best_epoch = epoch

        self.model = MeFormer(
            self._config.model, ModelParams.from_arrays(self._config.model, best_arrays)
        )
        self._adam_state = AdamState.zeros_like(dict(self.model.params.items()))

        test_result = None
        test_split = self._dataset.split("test")
        if len(test_split):
            test_result = evaluate_model(
                self.model,
                test_split,
                self._dataset.categories,
                self._config.metrics.prediction_threshold,
                train_config.eval_batch_size,
            )
            record.final_estimation = test_result.estimation.overall
        checkpoint_path = self._write_outputs(store, record, test_result)
        self._event(
            "train_end",
            best_epoch=record.best_epoch,
            checkpoint=checkpoint_path,
            wall_time=round(time.perf_counter() - started, 3),
            **{f"test_{k}": v for k, v in record.final_estimation.items()},
        )
        self._flush_log()
        return TrainResult(
            model=self.model,
            record=record,
            run_dir=self._run_dir,
            checkpoint_path=checkpoint_path,
        )

    def _write_outputs(
        self,
        store: MetricsStore,
        record: RunRecord,
        test_result: Optional[EvaluationResult],
    ) -> str:
        os.makedirs(self._run_dir, exist_ok=True)
        checkpoint_path = os.path.join(self._run_dir, CHECKPOINT_FILE)
        save_checkpoint(
            checkpoint_path,
            self.model,
            self._dataset.categories,
            extra={"config": self._config_dict, "config_hash": self._config_hash},
        )
        record.save(self._run_dir)
        if test_result is not None:
            write_evaluation(test_result, self._run_dir, config=self._config_dict)
        store.plot(self._run_dir)
        with open(os.path.join(self._run_dir, RESOLVED_CONFIG_FILE), "w") as f:
            yaml.safe_dump(self._config_dict, f, sort_keys=True)
        return checkpoint_path

    def _flush_log(self) -> None:
        with open(os.path.join(self._run_dir, TRAIN_LOG_FILE), "w") as f:
            for line in self._log_lines:
                f.write(line + "\n")


def train(
    config: CopresenceConfig,
    dataset: WeatherDataset,
    run_dir: Optional[str] = None,
    max_samples: Optional[int] = None,
) -> TrainResult:
    set_log_level(config.metrics.log_level)
    run_dir = run_dir if run_dir is not None else config.metrics.output_dir
    try:
        return Trainer(config, dataset, run_dir).train(max_samples)
    except OSError as e:
        raise StorageError(f"Cannot write training outputs to {run_dir}: {e}") from None
