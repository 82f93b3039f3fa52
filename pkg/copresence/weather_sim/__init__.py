from copresence.weather_sim.dataset import DatasetSplit, WeatherDataset, read_image
from copresence.weather_sim.dataset_generator import (
    DatasetSummary,
    SceneSample,
    dataset_categories,
    generate_dataset,
    stratum_of,
)
from copresence.weather_sim.effects import WeatherEffect, build_weather_effects
from copresence.weather_sim.labels import (
    binarize,
    ground_truth_from_weights,
    label_error_propagation,
    label_error_variance,
)
from copresence.weather_sim.membership import (
    MembershipConfig,
    MembershipTerm,
    default_membership_config,
    membership_scores,
    state_to_probabilities,
)
from copresence.weather_sim.physics import fog_density, relative_moisture
from copresence.weather_sim.renderer import render_blend
from copresence.weather_sim.scenario import ScenarioState, simulate_scenario, step_moisture

__all__ = [
    "DatasetSplit",
    "DatasetSummary",
    "MembershipConfig",
    "MembershipTerm",
    "ScenarioState",
    "SceneSample",
    "WeatherDataset",
    "WeatherEffect",
    "binarize",
    "build_weather_effects",
    "dataset_categories",
    "default_membership_config",
    "fog_density",
    "generate_dataset",
    "ground_truth_from_weights",
    "label_error_propagation",
    "label_error_variance",
    "membership_scores",
    "read_image",
    "relative_moisture",
    "render_blend",
    "simulate_scenario",
    "state_to_probabilities",
    "step_moisture",
]
