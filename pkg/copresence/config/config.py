from dataclasses import dataclass, field
from typing import List, Optional

from copresence.config.base_poly_config import BasePolyConfig
from copresence.errors import ConfigError
from copresence.logger import init_logger
from copresence.types import (
    AblationAxis,
    LatentMode,
    LossType,
    TaskType,
    WeatherEffectType,
)

logger = init_logger(__name__)

STRATUM_LABELS = ["1", "2", "3", "4", ">4"]
TEMPERATURE_LIMITS = (-30.0, 50.0)


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


@dataclass
class BaseEffectConfig(BasePolyConfig):
    color: List[float] = field(
        default_factory=lambda: [0.5, 0.5, 0.5],
        metadata={"help": "RGB color in [0, 1] the effect pulls pixels towards."},
    )

    def __post_init__(self):
        _check(len(self.color) == 3, f"effect color needs 3 channels, got {self.color}")
        _check(all(0.0 <= c <= 1.0 for c in self.color), "effect color must lie in [0, 1]")


@dataclass
class TintEffectConfig(BaseEffectConfig):
    strength: float = field(
        default=0.5,
        metadata={"help": "Mix factor between the base pixel and the tint color."},
    )
    contrast: float = field(
        default=1.0,
        metadata={"help": "Contrast multiplier applied around mid-gray before tinting."},
    )

    @staticmethod
    def get_type():
        return WeatherEffectType.TINT


@dataclass
class VisibilityEffectConfig(BaseEffectConfig):
    density: float = field(
        default=2.0,
        metadata={"help": "Extinction coefficient of the depth-ramped haze."},
    )
    horizon: float = field(
        default=0.45,
        metadata={"help": "Row fraction of the horizon; depth is largest there."},
    )

    @staticmethod
    def get_type():
        return WeatherEffectType.VISIBILITY


@dataclass
class ParticleEffectConfig(BaseEffectConfig):
    density: float = field(
        default=0.02,
        metadata={"help": "Fraction of pixels seeding a particle."},
    )
    length: int = field(
        default=4,
        metadata={"help": "Streak length in pixels; 1 renders flakes."},
    )
    opacity: float = field(
        default=0.8,
        metadata={"help": "Blend factor of particle pixels."},
    )
    pattern_seed: int = field(
        default=0,
        metadata={"help": "Seed of the fixed particle pattern."},
    )

    @staticmethod
    def get_type():
        return WeatherEffectType.PARTICLE


@dataclass
class MoistureDynamicsConfig:
    dt: float = field(
        default=1.0,
        metadata={"help": "Duration of one moisture step."},
    )
    scenario_steps: int = field(
        default=8,
        metadata={"help": "Moisture steps simulated per generated scene."},
    )
    reversion_rate: float = field(
        default=0.3,
        metadata={"help": "Mean-reversion speed of flux and temperature noise."},
    )
    noise_scale: float = field(
        default=0.25,
        metadata={"help": "Standard deviation of flux noise per unit time."},
    )
    inflow_mean: float = field(default=1.0, metadata={"help": "Long-run moisture inflow rate."})
    outflow_mean: float = field(default=1.0, metadata={"help": "Long-run moisture outflow rate."})
    evapotranspiration_mean: float = field(
        default=0.5, metadata={"help": "Long-run evapotranspiration rate."}
    )
    precipitation_mean: float = field(
        default=0.5, metadata={"help": "Long-run precipitation rate."}
    )
    temperature_mean: float = field(default=12.0, metadata={"help": "Long-run temperature (C)."})
    temperature_noise: float = field(
        default=2.0, metadata={"help": "Temperature noise standard deviation per unit time."}
    )
    temperature_min: float = field(default=-30.0, metadata={"help": "Lower temperature clamp (C)."})
    temperature_max: float = field(default=50.0, metadata={"help": "Upper temperature clamp (C)."})
    initial_moisture_max: float = field(
        default=20.0, metadata={"help": "Initial moisture is drawn uniformly up to this value."}
    )
    initial_flux_max: float = field(
        default=3.0, metadata={"help": "Initial flux rates are drawn uniformly up to this value."}
    )
    initial_temperature_range: List[float] = field(
        default_factory=lambda: [-15.0, 40.0],
        metadata={"help": "Uniform range of the initial temperature (C)."},
    )
    moisture_capacity: float = field(
        default=20.0,
        metadata={"help": "Moisture storage at which relative moisture reaches 1."},
    )

    def __post_init__(self):
        _check(self.dt > 0, f"dt must be positive, got {self.dt}")
        _check(self.scenario_steps >= 0, "scenario_steps must be non-negative")
        _check(self.reversion_rate >= 0, "reversion_rate must be non-negative")
        _check(self.noise_scale >= 0, "noise_scale must be non-negative")
        _check(self.temperature_min < self.temperature_max, "temperature range is empty")
        low, high = TEMPERATURE_LIMITS
        _check(
            low <= self.temperature_min and self.temperature_max <= high,
            f"temperature clamp must lie within [{low:g}, {high:g}] C",
        )
        _check(self.moisture_capacity > 0, "moisture_capacity must be positive")
        _check(len(self.initial_temperature_range) == 2, "initial_temperature_range needs 2 values")
        _check(
            self.temperature_min
            <= min(self.initial_temperature_range)
            <= max(self.initial_temperature_range)
            <= self.temperature_max,
            "initial_temperature_range must lie within the temperature clamp",
        )


@dataclass
class GenerationConfig:
    num_samples: int = field(
        default=2000,
        metadata={"help": "Number of scenes to generate."},
    )
    image_size: int = field(
        default=64,
        metadata={"help": "Side length of the square rendered scenes."},
    )
    num_categories: int = field(
        default=14,
        metadata={"help": "Number of weather categories, taken in canonical order."},
    )
    max_copresent: int = field(
        default=6,
        metadata={"help": "Largest number of co-present categories in one scene."},
    )
    stratum_proportions: List[float] = field(
        default_factory=lambda: [0.3, 0.25, 0.2, 0.15, 0.1],
        metadata={"help": "Share of scenes with 1, 2, 3, 4 and >4 co-present categories."},
    )
    train_fraction: float = field(
        default=0.8,
        metadata={"help": "Share of scenes assigned to the train split."},
    )
    binarization_threshold: float = field(
        default=0.5,
        metadata={"help": "Probability at or above which a binary label is 1."},
    )
    min_blend_weight: float = field(
        default=0.05,
        metadata={"help": "Smallest blend weight a co-present category receives."},
    )
    blend_concentration: float = field(
        default=2.0,
        metadata={"help": "Dirichlet concentration jittering membership-derived weights."},
    )
    selection_floor: float = field(
        default=0.02,
        metadata={"help": "Added to memberships before sampling co-present categories."},
    )
    membership_config_path: Optional[str] = field(
        default=None,
        metadata={"help": "JSON membership config; the built-in one is used when unset."},
    )
    effect_config_path: Optional[str] = field(
        default=None,
        metadata={"help": "JSON effect layers per category, overriding the built-in table."},
    )
    dynamics: MoistureDynamicsConfig = field(default_factory=MoistureDynamicsConfig)
    seed: int = field(
        default=42,
        metadata={"help": "Seed for scenario simulation, strata and the split."},
    )
    num_workers: int = field(
        default=1,
        metadata={"help": "Parallel workers used to render samples."},
    )
    output_dir: str = field(
        default="data/copresence",
        metadata={"help": "Directory the dataset is written to."},
    )

    def __post_init__(self):
        _check(self.num_samples >= 1, f"num_samples must be at least 1, got {self.num_samples}")
        _check(self.image_size >= 8, f"image_size must be at least 8, got {self.image_size}")
        _check(1 <= self.num_categories <= 14, "num_categories must lie in [1, 14]")
        _check(
            1 <= self.max_copresent <= self.num_categories,
            f"max_copresent must lie in [1, {self.num_categories}], got {self.max_copresent}",
        )
        _check(
            len(self.stratum_proportions) == len(STRATUM_LABELS),
            f"stratum_proportions needs {len(STRATUM_LABELS)} entries",
        )
        _check(all(p >= 0 for p in self.stratum_proportions), "stratum proportions must be >= 0")
        _check(0.0 < self.train_fraction <= 1.0, "train_fraction must lie in (0, 1]")
        _check(
            0.0 < self.binarization_threshold < 1.0,
            "binarization_threshold must lie in (0, 1)",
        )
        _check(
            0.0 <= self.min_blend_weight * self.max_copresent < 1.0,
            "min_blend_weight times max_copresent must stay below 1",
        )
        _check(self.blend_concentration > 0, "blend_concentration must be positive")
        _check(self.num_workers >= 1, "num_workers must be at least 1")

    @property
    def active_strata(self) -> List[str]:
        strata = STRATUM_LABELS[: min(self.max_copresent, 4)]
        if self.max_copresent > 4:
            strata = strata + [STRATUM_LABELS[-1]]
        return [s for s in strata if self.stratum_proportions[STRATUM_LABELS.index(s)] > 0]


@dataclass
class ModelConfig:
    num_categories: int = field(
        default=14,
        metadata={"help": "Weather categories n (one token and one output each)."},
    )
    channels: int = field(
        default=32,
        metadata={"help": "Channel width c of the scene features."},
    )
    image_size: int = field(
        default=64,
        metadata={"help": "Side length of input images."},
    )
    patch_size: int = field(
        default=8,
        metadata={"help": "Side length of the non-overlapping patches."},
    )
    latent_size: int = field(
        default=16,
        metadata={"help": "Latent size M of the prior and posterior Gaussians."},
    )
    depth: int = field(
        default=2,
        metadata={"help": "Number of encoder layers."},
    )
    num_heads: int = field(
        default=1,
        metadata={"help": "Attention heads; must divide the channel width."},
    )
    ffn_hidden: Optional[int] = field(
        default=None,
        metadata={"help": "Hidden width of the feed-forward block; defaults to h*w."},
    )
    latent_hidden_sizes: List[int] = field(
        default_factory=lambda: [64, 32],
        metadata={"help": "Hidden widths of the prior and posterior nets."},
    )
    token_init_std: float = field(
        default=0.02,
        metadata={"help": "Standard deviation of the weather-token initialization."},
    )
    use_mfe: bool = field(
        default=True,
        metadata={"help": "Stack weather tokens with the scene features."},
    )
    use_pul: bool = field(
        default=True,
        metadata={"help": "Add the prior latent branch to the head and train it with KL."},
    )
    seed: int = field(
        default=0,
        metadata={"help": "Seed of the parameter initialization."},
    )

    def __post_init__(self):
        _check(self.num_categories >= 1, "num_categories must be at least 1")
        _check(self.latent_size >= 1, "latent_size must be at least 1")
        _check(self.channels >= 1, "channels must be at least 1")
        _check(self.depth >= 0, "depth must be non-negative")
        _check(
            self.image_size % self.patch_size == 0,
            f"image_size {self.image_size} is not divisible by patch_size {self.patch_size}",
        )
        _check(
            self.num_heads >= 1 and self.channels % self.num_heads == 0,
            f"channels {self.channels} not divisible by num_heads {self.num_heads}",
        )
        _check(
            self.spatial % self.num_heads == 0,
            f"h*w {self.spatial} not divisible by num_heads {self.num_heads}",
        )
        _check(len(self.latent_hidden_sizes) >= 1, "latent_hidden_sizes needs at least one width")

    @property
    def grid(self) -> int:
        return self.image_size // self.patch_size

    @property
    def spatial(self) -> int:
        return self.grid * self.grid

    @property
    def patch_dim(self) -> int:
        return 3 * self.patch_size * self.patch_size

    @property
    def rows(self) -> int:
        return self.channels + (self.num_categories if self.use_mfe else 0)

    @property
    def feature_rows(self) -> int:
        """Rows of X fed to the latent nets and the head."""
        return self.num_categories if self.use_mfe else self.channels

    @property
    def ffn_width(self) -> int:
        return self.ffn_hidden if self.ffn_hidden is not None else self.spatial


@dataclass
class TrainConfig:
    learning_rate: float = field(
        default=2e-4,
        metadata={"help": "Adam learning rate."},
    )
    weight_decay: float = field(
        default=1e-4,
        metadata={"help": "Decoupled weight decay."},
    )
    beta1: float = field(default=0.9, metadata={"help": "Adam first-moment decay."})
    beta2: float = field(default=0.999, metadata={"help": "Adam second-moment decay."})
    eps: float = field(default=1e-8, metadata={"help": "Adam denominator epsilon."})
    dropout: float = field(
        default=0.1,
        metadata={"help": "Dropout on encoder feed-forward activations."},
    )
    epochs: int = field(
        default=20,
        metadata={"help": "Training epochs."},
    )
    batch_size: int = field(
        default=16,
        metadata={"help": "Samples per optimizer step."},
    )
    kl_weight: float = field(
        default=1e-5,
        metadata={"help": "Weight lambda of the KL term."},
    )
    loss_type: LossType = field(
        default=LossType.L2,
        metadata={"help": "Regression data term: l1, smooth_l1 or l2."},
    )
    smooth_l1_delta: float = field(
        default=1.0,
        metadata={"help": "Transition point of the smooth-l1 loss."},
    )
    task: TaskType = field(
        default=TaskType.ESTIMATION,
        metadata={"help": "estimation regresses probabilities, classification uses BCE."},
    )
    latent_mode: LatentMode = field(
        default=LatentMode.STOCHASTIC,
        metadata={"help": "How the head's latent is drawn from the prior during training."},
    )
    disable_mfe: bool = field(
        default=False,
        metadata={"help": "Drop the weather tokens."},
    )
    disable_pul: bool = field(
        default=False,
        metadata={"help": "Drop the prior latent branch and the KL term."},
    )
    val_fraction: float = field(
        default=0.1,
        metadata={"help": "Share of the train split held out for checkpoint selection."},
    )
    max_samples: Optional[int] = field(
        default=None,
        metadata={"help": "Cap on train samples, for smoke runs."},
    )
    eval_batch_size: int = field(
        default=64,
        metadata={"help": "Samples per evaluation forward pass."},
    )
    seed: int = field(
        default=0,
        metadata={"help": "Seed of shuffling, dropout and latent sampling."},
    )

    def __post_init__(self):
        for name in ("learning_rate", "weight_decay", "kl_weight", "smooth_l1_delta"):
            _check(getattr(self, name) >= 0, f"{name} must be non-negative")
        _check(0.0 <= self.dropout < 1.0, "dropout must lie in [0, 1)")
        _check(0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0, "betas must lie in [0, 1)")
        _check(self.eps > 0, "eps must be positive")
        _check(self.epochs >= 0, "epochs must be non-negative")
        _check(self.batch_size >= 1, "batch_size must be at least 1")
        _check(0.0 <= self.val_fraction < 1.0, "val_fraction must lie in [0, 1)")
        _check(self.max_samples is None or self.max_samples >= 1, "max_samples must be >= 1")
        _check(self.eval_batch_size >= 1, "eval_batch_size must be at least 1")


@dataclass
class MetricsConfig:
    output_dir: str = field(
        default="outputs",
        metadata={"help": "Root directory for run artifacts."},
    )
    write_figures: bool = field(
        default=True,
        metadata={"help": "Write SVG figures next to CSV tables."},
    )
    prediction_threshold: float = field(
        default=0.5,
        metadata={"help": "Probability at or above which a prediction counts as present."},
    )
    wandb_project: Optional[str] = field(
        default=None,
        metadata={"help": "Weights & Biases project name."},
    )
    wandb_group: Optional[str] = field(
        default=None,
        metadata={"help": "Weights & Biases group name."},
    )
    wandb_run_name: Optional[str] = field(
        default=None,
        metadata={"help": "Weights & Biases run name."},
    )
    log_level: str = field(
        default="info",
        metadata={"help": "Console log level."},
    )

    def __post_init__(self):
        _check(
            0.0 < self.prediction_threshold < 1.0,
            "prediction_threshold must lie in (0, 1)",
        )
        _check(
            self.log_level.upper() in ("DEBUG", "INFO", "WARNING", "ERROR"),
            f"unknown log_level {self.log_level}",
        )


@dataclass
class AblationConfig:
    axis: AblationAxis = field(
        default=AblationAxis.LATENT_SIZE,
        metadata={"help": "latent_size, loss_kind, lambda or component."},
    )
    values: Optional[List[str]] = field(
        default=None,
        metadata={"help": "Values swept along the axis; the axis defaults when unset."},
    )
    seeds: List[int] = field(
        default_factory=lambda: [0],
        metadata={"help": "Training seeds run for every value."},
    )
    num_workers: int = field(
        default=1,
        metadata={"help": "Parallel training runs."},
    )

    def __post_init__(self):
        _check(len(self.seeds) >= 1, "ablation needs at least one seed")
        _check(self.values is None or len(self.values) >= 1, "ablation values must be non-empty")
        _check(self.num_workers >= 1, "num_workers must be at least 1")


@dataclass
class CopresenceConfig:
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    ablation: AblationConfig = field(default_factory=AblationConfig)

    def __post_init__(self):
        _check(
            self.model.num_categories == self.generation.num_categories,
            f"model.num_categories ({self.model.num_categories}) differs from "
            f"generation.num_categories ({self.generation.num_categories})",
        )
        _check(
            self.model.image_size == self.generation.image_size,
            f"model.image_size ({self.model.image_size}) differs from "
            f"generation.image_size ({self.generation.image_size})",
        )
