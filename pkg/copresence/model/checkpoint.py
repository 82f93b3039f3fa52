import io
import json
import os
import zipfile
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from copresence import __version__
from copresence.config import ModelConfig, dataclass_from_dict, dataclass_to_dict
from copresence.errors import CompatibilityError, ConfigError, StorageError
from copresence.logger import init_logger
from copresence.model.meformer import MeFormer
from copresence.model.params import ModelParams

logger = init_logger(__name__)

CHECKPOINT_FORMAT_VERSION = 1
META_ENTRY = "__meta__.json"
PARAM_PREFIX = "param/"
# fixed entry timestamp keeps checkpoint bytes a pure function of the weights
_ZIP_DATE = (1980, 1, 1, 0, 0, 0)


@dataclass
class CheckpointMeta:
    model_config: ModelConfig
    categories: List[str]
    version: str = __version__
    format_version: int = CHECKPOINT_FORMAT_VERSION
    extra: Dict[str, Any] = field(default_factory=dict)


def _array_bytes(array: np.ndarray) -> bytes:
    buffer = io.BytesIO()
    np.lib.format.write_array(buffer, np.ascontiguousarray(array), allow_pickle=False)
    return buffer.getvalue()


def _write_entry(archive: zipfile.ZipFile, name: str, payload: bytes) -> None:
    info = zipfile.ZipInfo(name, date_time=_ZIP_DATE)
    info.compress_type = zipfile.ZIP_STORED
    info.external_attr = 0o644 << 16
    archive.writestr(info, payload)


def save_checkpoint(
    path: str,
    model: MeFormer,
    categories: List[str],
    extra: Optional[Dict[str, Any]] = None,
) -> None:
    if len(categories) != model.config.num_categories:
        raise CompatibilityError(
            f"{len(categories)} category names for a model with "
            f"{model.config.num_categories} categories"
        )
    meta = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "version": __version__,
        "model_config": dataclass_to_dict(model.config),
        "categories": list(categories),
        "parameters": model.params.names(),
        "extra": extra or {},
    }
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with zipfile.ZipFile(path, "w") as archive:
            for name, array in model.params.to_arrays().items():
                _write_entry(archive, f"{PARAM_PREFIX}{name}.npy", _array_bytes(array))
            _write_entry(
                archive,
                META_ENTRY,
                json.dumps(meta, indent=2, sort_keys=True).encode("utf-8"),
            )
    except OSError as e:
        raise StorageError(f"Cannot write checkpoint {path}: {e}") from None
    logger.debug(f"Saved checkpoint with {len(model.params)} tensors to {path}")


def load_checkpoint(path: str) -> Tuple[MeFormer, CheckpointMeta]:
    if not os.path.isfile(path):
        raise StorageError(f"Checkpoint not found: {path}")
    try:
        with zipfile.ZipFile(path, "r") as archive:
            meta = json.loads(archive.read(META_ENTRY).decode("utf-8"))
            arrays = OrderedDict()
            for name in meta["parameters"]:
                payload = archive.read(f"{PARAM_PREFIX}{name}.npy")
                arrays[name] = np.lib.format.read_array(io.BytesIO(payload), allow_pickle=False)
    except (OSError, KeyError, zipfile.BadZipFile, json.JSONDecodeError, ValueError) as e:
        raise StorageError(f"Cannot read checkpoint {path}: {e}") from None

    if meta.get("format_version") != CHECKPOINT_FORMAT_VERSION:
        raise CompatibilityError(
            f"checkpoint format {meta.get('format_version')} is not supported "
            f"(expected {CHECKPOINT_FORMAT_VERSION})"
        )
    try:
        model_config = dataclass_from_dict(ModelConfig, meta["model_config"])
    except ConfigError as e:
        raise CompatibilityError(f"checkpoint model config is incompatible: {e}") from None

    params = ModelParams.from_arrays(model_config, arrays)
    model = MeFormer(model_config, params)
    return model, CheckpointMeta(
        model_config=model_config,
        categories=list(meta["categories"]),
        version=meta["version"],
        format_version=meta["format_version"],
        extra=meta.get("extra", {}),
    )


def check_categories(expected: List[str], found: List[str], what: str) -> None:
    if list(expected) != list(found):
        raise CompatibilityError(
            f"category list of {what} {found} does not match {expected}"
        )
