import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from PIL import Image

from copresence import __version__
from copresence.config import STRATUM_LABELS, GenerationConfig, dataclass_to_dict
from copresence.errors import StorageError
from copresence.logger import init_logger
from copresence.types import WeatherType
from copresence.utils.parallel import ParallelRunner
from copresence.utils.random import derive_rng
from copresence.weather_sim.effects import (
    build_weather_effects,
    effect_table_to_dict,
    load_effect_table,
)
from copresence.weather_sim.labels import binarize, ground_truth_from_weights
from copresence.weather_sim.membership import (
    MembershipConfig,
    load_membership_config,
    state_to_probabilities,
)
from copresence.weather_sim.renderer import render_blend
from copresence.weather_sim.scenario import simulate_scenario
from copresence.weather_sim.scene import render_base_scene

logger = init_logger(__name__)

MANIFEST_FILE = "manifest.jsonl"
CATEGORIES_FILE = "categories.json"
MEMBERSHIP_FILE = "membership_config.json"
EFFECTS_FILE = "effect_config.json"
GENERATION_FILE = "generation_config.json"
IMAGES_DIR = "images"

# stream keys kept apart from sample indices, which are non-negative
_STRATA_STREAM = -1 & 0xFFFFFFFF
_SPLIT_STREAM = -2 & 0xFFFFFFFF


@dataclass
class SceneSample:
    image: np.ndarray
    label_prob: np.ndarray
    label_binary: np.ndarray
    blend_weights: np.ndarray
    scenario_seed: int
    stratum: str


@dataclass
class DatasetSummary:
    output_dir: str
    num_samples: int
    stratum_counts: Dict[str, int]
    split_counts: Dict[str, int]
    digest: str
    unchanged: bool = False
    categories: List[str] = field(default_factory=list)


def dataset_categories(num_categories: int) -> List[WeatherType]:
    return list(WeatherType)[:num_categories]


def stratum_of(count: int) -> str:
    return STRATUM_LABELS[min(count, len(STRATUM_LABELS)) - 1]


def allocate_strata(config: GenerationConfig) -> List[str]:
    """Per-sample stratum labels: largest-remainder counts, seeded order."""
    strata = config.active_strata
    if not strata:
        strata = [STRATUM_LABELS[0]]
        shares = np.ones(1)
    else:
        shares = np.array(
            [config.stratum_proportions[STRATUM_LABELS.index(s)] for s in strata]
        )
    quotas = shares / shares.sum() * config.num_samples
    counts = np.floor(quotas).astype(int)
    remainder = config.num_samples - int(counts.sum())
    # ties go to the earlier stratum
    order = sorted(range(len(strata)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:remainder]:
        counts[i] += 1

    labels = [label for label, count in zip(strata, counts) for _ in range(count)]
    permutation = derive_rng(config.seed, _STRATA_STREAM).permutation(len(labels))
    return [labels[i] for i in permutation]


def assign_splits(config: GenerationConfig) -> List[str]:
    num_train = int(round(config.train_fraction * config.num_samples))
    permutation = derive_rng(config.seed, _SPLIT_STREAM).permutation(config.num_samples)
    splits = ["test"] * config.num_samples
    for index in permutation[:num_train]:
        splits[index] = "train"
    return splits


def _copresent_count(stratum: str, config: GenerationConfig, rng: np.random.Generator) -> int:
    if stratum == STRATUM_LABELS[-1]:
        return int(rng.integers(len(STRATUM_LABELS), config.max_copresent + 1))
    return int(stratum)


def _blend_weights(
    memberships: np.ndarray,
    count: int,
    config: GenerationConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    num_categories = memberships.size
    selection = memberships + config.selection_floor
    chosen = np.sort(
        rng.choice(num_categories, size=count, replace=False, p=selection / selection.sum())
    )

    weights = np.zeros(num_categories)
    if count == 1:
        weights[chosen] = 1.0
        return weights

    affinity = memberships[chosen] + 1e-3
    affinity = affinity / affinity.sum()
    jitter = rng.dirichlet(np.full(count, config.blend_concentration))
    raw = 0.5 * affinity + 0.5 * jitter
    raw = raw / raw.sum()
    weights[chosen] = config.min_blend_weight + (1.0 - count * config.min_blend_weight) * raw
    return weights


def render_sample(
    config: GenerationConfig,
    index: int,
    stratum: str,
    membership: MembershipConfig,
    effects: Sequence,
) -> SceneSample:
    rng = derive_rng(config.seed, index)
    categories = dataset_categories(config.num_categories)

    scenario_seed = int(rng.integers(0, 2**31 - 1))
    state = simulate_scenario(config.dynamics, np.random.default_rng(scenario_seed))
    memberships = state_to_probabilities(state, membership, categories)

    count = _copresent_count(stratum, config, rng)
    weights = _blend_weights(memberships, count, config, rng)

    base = render_base_scene(rng, config.image_size)
    present = np.flatnonzero(weights)
    image = render_blend(base, [effects[i] for i in present], weights[present])

    label_prob = ground_truth_from_weights(weights)
    return SceneSample(
        image=image,
        label_prob=label_prob,
        label_binary=binarize(label_prob, config.binarization_threshold),
        blend_weights=weights,
        scenario_seed=scenario_seed,
        stratum=stratum,
    )


def image_file_name(index: int) -> str:
    return f"{IMAGES_DIR}/{index:06d}.png"


def write_png(image: np.ndarray, path: str) -> None:
    pixels = np.round(np.clip(image, 0.0, 1.0) * 255.0).astype(np.uint8)
    Image.fromarray(pixels).save(path, format="PNG")


def _render_chunk(job: Tuple[GenerationConfig, str, List[Tuple[int, str, str]]]) -> List[str]:
    config, output_dir, items = job
    membership = load_membership_config(config.membership_config_path)
    effects = build_weather_effects(
        dataset_categories(config.num_categories), load_effect_table(config.effect_config_path)
    )

    rows = []
    for index, stratum, split in items:
        sample = render_sample(config, index, stratum, membership, effects)
        file_name = image_file_name(index)
        write_png(sample.image, os.path.join(output_dir, file_name))
        row = {
            "file": file_name,
            "label_prob": sample.label_prob.tolist(),
            "label_binary": sample.label_binary.tolist(),
            "blend_weights": sample.blend_weights.tolist(),
            "stratum": sample.stratum,
            "split": split,
            "scenario_seed": sample.scenario_seed,
        }
        rows.append(json.dumps(row))
    return rows


def _write_json(path: str, payload: Any) -> None:
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def _dataset_digest(output_dir: str, manifest_bytes: bytes, num_samples: int) -> str:
    digest = hashlib.sha256(manifest_bytes)
    for index in range(num_samples):
        with open(os.path.join(output_dir, image_file_name(index)), "rb") as f:
            digest.update(f.read())
    return digest.hexdigest()


def _previous_digest(output_dir: str) -> Optional[str]:
    path = os.path.join(output_dir, GENERATION_FILE)
    if not os.path.isfile(path):
        return None
    try:
        with open(path, "r") as f:
            return json.load(f).get("digest")
    except (OSError, json.JSONDecodeError):
        return None


def _remove_stale_images(images_dir: str, num_samples: int) -> None:
    expected = {os.path.basename(image_file_name(i)) for i in range(num_samples)}
    for name in os.listdir(images_dir):
        if name.endswith(".png") and name not in expected:
            os.remove(os.path.join(images_dir, name))


def generate_dataset(
    config: GenerationConfig, output_dir: Optional[str] = None
) -> DatasetSummary:
    """Writes a dataset directory that is a pure function of `config`."""
    output_dir = output_dir or config.output_dir
    membership = load_membership_config(config.membership_config_path)
    effect_table = load_effect_table(config.effect_config_path)
    categories = [str(c) for c in dataset_categories(config.num_categories)]
    previous_digest = _previous_digest(output_dir)

    try:
        os.makedirs(os.path.join(output_dir, IMAGES_DIR), exist_ok=True)
    except OSError as e:
        raise StorageError(f"Cannot create dataset directory {output_dir}: {e}") from None

    strata = allocate_strata(config)
    splits = assign_splits(config)
    items = [(index, strata[index], splits[index]) for index in range(config.num_samples)]

    runner = ParallelRunner(config.num_workers)
    chunks = np.array_split(np.arange(config.num_samples), config.num_workers)
    jobs = [(config, output_dir, [items[i] for i in chunk]) for chunk in chunks if len(chunk)]

    logger.info(
        f"Generating {config.num_samples} scenes of {config.image_size}x{config.image_size} "
        f"into {output_dir} with {config.num_workers} worker(s)"
    )
    try:
        rows = [row for chunk_rows in runner.map(_render_chunk, jobs) for row in chunk_rows]
        _remove_stale_images(os.path.join(output_dir, IMAGES_DIR), config.num_samples)

        manifest_bytes = "".join(row + "\n" for row in rows).encode("utf-8")
        with open(os.path.join(output_dir, MANIFEST_FILE), "wb") as f:
            f.write(manifest_bytes)
        _write_json(os.path.join(output_dir, CATEGORIES_FILE), categories)
        _write_json(os.path.join(output_dir, MEMBERSHIP_FILE), membership.to_dict())
        _write_json(
            os.path.join(output_dir, EFFECTS_FILE),
            effect_table_to_dict(effect_table, dataset_categories(config.num_categories)),
        )

        digest = _dataset_digest(output_dir, manifest_bytes, config.num_samples)
        recorded_config = dataclass_to_dict(config)
        # where and how fast the data was written does not change its bytes
        recorded_config.pop("output_dir")
        recorded_config.pop("num_workers")
        _write_json(
            os.path.join(output_dir, GENERATION_FILE),
            {
                "config": recorded_config,
                "digest": digest,
                "version": __version__,
            },
        )
    except OSError as e:
        raise StorageError(f"Failed writing dataset to {output_dir}: {e}") from None

    stratum_counts = {label: strata.count(label) for label in STRATUM_LABELS if label in strata}
    split_counts = {name: splits.count(name) for name in ("train", "test")}
    summary = DatasetSummary(
        output_dir=output_dir,
        num_samples=config.num_samples,
        stratum_counts=stratum_counts,
        split_counts=split_counts,
        digest=digest,
        unchanged=previous_digest == digest,
        categories=categories,
    )
    logger.info(
        f"Dataset written: strata {stratum_counts}, splits {split_counts}, "
        f"digest {digest[:12]}{' (unchanged)' if summary.unchanged else ''}"
    )
    return summary
