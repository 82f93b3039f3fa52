"""Smooth weather memberships of a scenario state.

Each category's membership is a product of terms, one per scenario
variable. A logistic term rises (positive slope) or falls (negative slope)
through its midpoint; a bell term peaks at exactly 1 on its midpoint.
"""
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from copresence.errors import ConfigError, StorageError
from copresence.types import WeatherType
from copresence.weather_sim.physics import fog_density, relative_moisture
from copresence.weather_sim.scenario import ScenarioState

MEMBERSHIP_CONFIG_VERSION = "1"

VARIABLES = ("moisture", "temperature", "fog_density", "precipitation", "outflow", "inflow")
TERM_KINDS = ("logistic", "bell")


@dataclass
class MembershipTerm:
    variable: str
    midpoint: float
    slope: float
    kind: str = "logistic"

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ConfigError(f"unknown membership variable {self.variable!r}")
        if self.kind not in TERM_KINDS:
            raise ConfigError(f"unknown membership term kind {self.kind!r}")
        if self.kind == "bell" and self.slope <= 0:
            raise ConfigError("bell terms need a positive slope")

    def evaluate(self, value: float) -> float:
        # tanh form is exact at the midpoint and never overflows
        sigma = 0.5 * (1.0 + math.tanh(0.5 * self.slope * (value - self.midpoint)))
        if self.kind == "bell":
            return 4.0 * sigma * (1.0 - sigma)
        return sigma


@dataclass
class MembershipConfig:
    boundary: float = 10.0
    moisture_capacity: float = 20.0
    rules: Dict[str, List[MembershipTerm]] = field(default_factory=dict)
    version: str = MEMBERSHIP_CONFIG_VERSION

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MembershipConfig":
        unknown = set(data) - {"boundary", "moisture_capacity", "rules", "version"}
        if unknown:
            raise ConfigError(f"Unknown membership config key(s): {', '.join(sorted(unknown))}")
        version = str(data.get("version", MEMBERSHIP_CONFIG_VERSION))
        if version != MEMBERSHIP_CONFIG_VERSION:
            raise ConfigError(f"membership config version {version} is not supported")

        rules = {}
        for name, terms in data.get("rules", {}).items():
            try:
                WeatherType.from_str(name)
            except ValueError as e:
                raise ConfigError(str(e)) from None
            rules[name] = [MembershipTerm(**term) for term in terms]
        return cls(
            boundary=float(data.get("boundary", 10.0)),
            moisture_capacity=float(data.get("moisture_capacity", 20.0)),
            rules=rules,
            version=version,
        )


def default_membership_config(boundary: float = 10.0) -> MembershipConfig:
    """Built-in rules; `boundary` is the sunny/rainy moisture threshold."""

    def term(variable, midpoint, slope, kind="logistic"):
        return MembershipTerm(variable=variable, midpoint=midpoint, slope=slope, kind=kind)

    rules = {
        "blizzard": [
            term("precipitation", 2.5, 2.0),
            term("temperature", -5.0, -0.8),
            term("outflow", 2.0, 2.0),
        ],
        "clear": [term("moisture", 7.0, -1.2), term("temperature", 5.0, 0.4)],
        "clearing": [
            term("moisture", boundary - 2.0, 1.5, "bell"),
            term("precipitation", 0.5, -3.0),
        ],
        "cloudy": [term("moisture", 8.0, 1.0), term("precipitation", 1.0, -3.0)],
        "extrasunny": [term("moisture", 4.0, -3.0), term("temperature", 22.0, 0.5)],
        "foggy": [term("fog_density", 1.0, 3.0)],
        "neutral": [term("moisture", boundary, 1.5, "bell")],
        "overcast": [term("moisture", boundary + 2.0, 1.0), term("precipitation", 1.0, -3.0)],
        "rain": [term("moisture", boundary, 1.2)],
        "smog": [term("outflow", 0.3, -6.0), term("moisture", 6.0, -1.0)],
        "snow": [term("moisture", boundary, 1.2), term("temperature", 0.0, -1.0)],
        "snowlight": [term("precipitation", 0.8, 2.0, "bell"), term("temperature", 2.0, -1.0)],
        "thunder": [term("precipitation", 2.0, 2.0), term("temperature", 15.0, 0.5)],
        "frozen": [term("temperature", -2.0, -1.0), term("precipitation", 0.5, -3.0)],
    }
    return MembershipConfig(boundary=boundary, rules=rules)


def load_membership_config(path: Optional[str]) -> MembershipConfig:
    if path is None:
        return default_membership_config()
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except OSError as e:
        raise StorageError(f"Could not read membership config {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"Membership config {path} is not valid JSON: {e}") from None
    return MembershipConfig.from_dict(data)


def state_variables(state: ScenarioState, moisture_capacity: float) -> Dict[str, float]:
    return {
        "moisture": state.moisture,
        "temperature": state.temperature,
        "fog_density": fog_density(
            state.temperature, relative_moisture(state.moisture, moisture_capacity)
        ),
        "precipitation": state.precipitation,
        "outflow": state.outflow,
        "inflow": state.inflow,
    }


def membership_scores(
    state: ScenarioState,
    config: Optional[MembershipConfig] = None,
    categories: Optional[Sequence[WeatherType]] = None,
) -> np.ndarray:
    """Raw memberships in [0, 1], one per category."""
    config = config or default_membership_config()
    categories = list(WeatherType) if categories is None else list(categories)
    variables = state_variables(state, config.moisture_capacity)

    scores = np.zeros(len(categories))
    for i, category in enumerate(categories):
        terms = config.rules.get(str(category))
        if terms is None:
            raise ConfigError(f"membership config has no rule for {category}")
        scores[i] = math.prod(term.evaluate(variables[term.variable]) for term in terms)
    return scores


def state_to_probabilities(
    state: ScenarioState,
    config: Optional[MembershipConfig] = None,
    categories: Optional[Sequence[WeatherType]] = None,
) -> np.ndarray:
    """Memberships divided by their maximum, so the dominant category sits at 1."""
    state.validate()
    scores = membership_scores(state, config, categories)
    peak = scores.max()
    if peak <= 0:
        return scores
    return scores / peak
