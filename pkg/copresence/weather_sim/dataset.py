import json
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
from PIL import Image, UnidentifiedImageError

from copresence.errors import ConfigError, StorageError
from copresence.logger import init_logger
from copresence.weather_sim.dataset_generator import (
    CATEGORIES_FILE,
    GENERATION_FILE,
    MANIFEST_FILE,
)

logger = init_logger(__name__)

SPLITS = ("train", "test")


def read_image(path: str, size: Optional[int] = None) -> np.ndarray:
    """Decodes an image file to an HxWx3 float array in [0, 1]."""
    try:
        with Image.open(path) as image:
            image = image.convert("RGB")
            if size is not None and image.size != (size, size):
                image = image.resize((size, size), Image.Resampling.BILINEAR)
            pixels = np.asarray(image, dtype=np.float64)
    except FileNotFoundError:
        raise StorageError(f"Image not found: {path}") from None
    except (UnidentifiedImageError, OSError) as e:
        raise StorageError(f"Cannot decode image {path}: {e}") from None
    return pixels / 255.0


@dataclass
class DatasetSplit:
    name: str
    images: np.ndarray
    label_prob: np.ndarray
    label_binary: np.ndarray
    strata: List[str]
    files: List[str]

    def __len__(self) -> int:
        return len(self.files)

    def subset(self, indices) -> "DatasetSplit":
        indices = np.asarray(indices, dtype=int)
        return DatasetSplit(
            name=self.name,
            images=self.images[indices],
            label_prob=self.label_prob[indices],
            label_binary=self.label_binary[indices],
            strata=[self.strata[i] for i in indices],
            files=[self.files[i] for i in indices],
        )


class WeatherDataset:
    """Read access to a directory written by `generate_dataset`."""

    def __init__(self, root: str):
        self.root = root
        if not os.path.isdir(root):
            raise StorageError(f"Dataset directory not found: {root}")

        self._categories: List[str] = self._load_json(CATEGORIES_FILE)
        self._generation: Dict[str, Any] = self._load_json(GENERATION_FILE)
        self._rows = self._load_manifest()
        self._splits: Dict[str, DatasetSplit] = {}

    def _load_json(self, name: str) -> Any:
        path = os.path.join(self.root, name)
        try:
            with open(path, "r") as f:
                return json.load(f)
        except FileNotFoundError:
            raise StorageError(f"Dataset file missing: {path}") from None
        except (OSError, json.JSONDecodeError) as e:
            raise StorageError(f"Cannot read {path}: {e}") from None

    def _load_manifest(self) -> List[Dict[str, Any]]:
        path = os.path.join(self.root, MANIFEST_FILE)
        try:
            with open(path, "r") as f:
                rows = [json.loads(line) for line in f if line.strip()]
        except FileNotFoundError:
            raise StorageError(f"Dataset manifest missing: {path}") from None
        except (OSError, json.JSONDecodeError) as e:
            raise StorageError(f"Cannot read manifest {path}: {e}") from None

        for row in rows:
            if len(row["label_prob"]) != len(self._categories):
                raise StorageError(
                    f"{row['file']} has {len(row['label_prob'])} labels for "
                    f"{len(self._categories)} categories"
                )
        return rows

    @property
    def categories(self) -> List[str]:
        return list(self._categories)

    @property
    def num_categories(self) -> int:
        return len(self._categories)

    @property
    def image_size(self) -> int:
        return int(self._generation["config"]["image_size"])

    @property
    def generation_config(self) -> Dict[str, Any]:
        return self._generation

    @property
    def digest(self) -> Optional[str]:
        return self._generation.get("digest")

    @property
    def rows(self) -> List[Dict[str, Any]]:
        return list(self._rows)

    def __len__(self) -> int:
        return len(self._rows)

    def split(self, name: str) -> DatasetSplit:
        if name not in SPLITS:
            raise ConfigError(f"Unknown split {name!r}; valid splits: {', '.join(SPLITS)}")
        if name not in self._splits:
            rows = [row for row in self._rows if row["split"] == name]
            self._splits[name] = self._materialize(name, rows)
        return self._splits[name]

    def _materialize(self, name: str, rows: List[Dict[str, Any]]) -> DatasetSplit:
        size = self.image_size
        images = np.zeros((len(rows), size, size, 3))
        for i, row in enumerate(rows):
            images[i] = read_image(os.path.join(self.root, row["file"]))
        logger.debug(f"Loaded {len(rows)} {name} images from {self.root}")

        n = self.num_categories
        return DatasetSplit(
            name=name,
            images=images,
            label_prob=np.array([row["label_prob"] for row in rows], dtype=np.float64).reshape(
                -1, n
            ),
            label_binary=np.array([row["label_binary"] for row in rows], dtype=np.int64).reshape(
                -1, n
            ),
            strata=[row["stratum"] for row in rows],
            files=[row["file"] for row in rows],
        )
