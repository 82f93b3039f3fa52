from copresence.trainer.ablation import (
    COMPONENT_VALUES,
    DEFAULT_VALUES,
    MEDIAN_ROW,
    ablation_sweep,
    ablation_table,
    apply_axis_value,
    apply_component,
)
from copresence.trainer.adam import AdamState, adam_step
from copresence.trainer.evaluator import (
    EvaluationResult,
    check_compatible,
    evaluate,
    evaluate_model,
    write_evaluation,
)
from copresence.trainer.run_record import (
    RUN_RECORD_FILE,
    RunRecord,
    append_run_record,
    config_hash,
    read_run_ledger,
)
from copresence.trainer.trainer import (
    CHECKPOINT_FILE,
    TRAIN_LOG_FILE,
    Trainer,
    TrainResult,
    resolve_model_config,
    split_validation,
    train,
)

__all__ = [
    "CHECKPOINT_FILE",
    "COMPONENT_VALUES",
    "DEFAULT_VALUES",
    "MEDIAN_ROW",
    "RUN_RECORD_FILE",
    "TRAIN_LOG_FILE",
    "AdamState",
    "EvaluationResult",
    "RunRecord",
    "TrainResult",
    "Trainer",
    "ablation_sweep",
    "ablation_table",
    "adam_step",
    "append_run_record",
    "apply_axis_value",
    "apply_component",
    "check_compatible",
    "config_hash",
    "evaluate",
    "evaluate_model",
    "read_run_ledger",
    "resolve_model_config",
    "split_validation",
    "train",
    "write_evaluation",
]
