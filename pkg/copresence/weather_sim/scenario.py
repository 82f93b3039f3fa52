import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from copresence.config import TEMPERATURE_LIMITS, MoistureDynamicsConfig
from copresence.errors import NonFiniteError

_FLUXES = ("inflow", "outflow", "evapotranspiration", "precipitation")


@dataclass(frozen=True)
class ScenarioState:
    """Atmospheric state driving one synthetic scene.

    moisture is the storage S, the four rates are the moisture fluxes
    M_I, M_O, E and P, t counts elapsed steps.
    """

    moisture: float
    temperature: float
    inflow: float = 0.0
    outflow: float = 0.0
    evapotranspiration: float = 0.0
    precipitation: float = 0.0
    t: int = 0

    @property
    def net_flux(self) -> float:
        return self.inflow + self.evapotranspiration - self.outflow - self.precipitation

    def validate(self) -> None:
        values = {"moisture": self.moisture, "temperature": self.temperature}
        values.update({name: getattr(self, name) for name in _FLUXES})
        for name, value in values.items():
            if not math.isfinite(value):
                raise NonFiniteError(f"ScenarioState.{name} is {value}")
        if self.moisture < 0:
            raise ValueError(f"moisture must be >= 0, got {self.moisture}")
        low, high = TEMPERATURE_LIMITS
        if not low <= self.temperature <= high:
            raise ValueError(
                f"temperature must lie in [{low:g}, {high:g}] C, got {self.temperature}"
            )
        for name in _FLUXES:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")


def _mean_revert(
    value: float,
    mean: float,
    rate: float,
    noise: float,
    dt: float,
    rng: Optional[np.random.Generator],
) -> float:
    value = value + rate * (mean - value) * dt
    if rng is not None and noise > 0:
        value += noise * math.sqrt(dt) * float(rng.standard_normal())
    return value


def step_moisture(
    state: ScenarioState,
    dt: float,
    dynamics: Optional[MoistureDynamicsConfig] = None,
    rng: Optional[np.random.Generator] = None,
) -> ScenarioState:
    """Advances moisture by one conservation step, then evolves the fluxes.

    Without `dynamics` the fluxes and temperature are held constant. With it
    they revert towards the configured means, plus noise when `rng` is given.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    state.validate()

    moisture = max(0.0, state.moisture + dt * state.net_flux)

    if dynamics is None:
        return replace(state, moisture=moisture, t=state.t + 1)

    rate = dynamics.reversion_rate
    means = {
        "inflow": dynamics.inflow_mean,
        "outflow": dynamics.outflow_mean,
        "evapotranspiration": dynamics.evapotranspiration_mean,
        "precipitation": dynamics.precipitation_mean,
    }
    fluxes = {
        name: max(
            0.0,
            _mean_revert(getattr(state, name), means[name], rate, dynamics.noise_scale, dt, rng),
        )
        for name in _FLUXES
    }
    temperature = _mean_revert(
        state.temperature,
        dynamics.temperature_mean,
        rate,
        dynamics.temperature_noise,
        dt,
        rng,
    )
    temperature = min(max(temperature, dynamics.temperature_min), dynamics.temperature_max)

    return ScenarioState(
        moisture=moisture,
        temperature=temperature,
        t=state.t + 1,
        **fluxes,
    )


def random_initial_state(
    dynamics: MoistureDynamicsConfig, rng: np.random.Generator
) -> ScenarioState:
    low, high = dynamics.initial_temperature_range
    return ScenarioState(
        moisture=float(rng.uniform(0.0, dynamics.initial_moisture_max)),
        temperature=float(rng.uniform(low, high)),
        inflow=float(rng.uniform(0.0, dynamics.initial_flux_max)),
        outflow=float(rng.uniform(0.0, dynamics.initial_flux_max)),
        evapotranspiration=float(rng.uniform(0.0, dynamics.initial_flux_max)),
        precipitation=float(rng.uniform(0.0, dynamics.initial_flux_max)),
    )


def simulate_scenario(
    dynamics: MoistureDynamicsConfig, rng: np.random.Generator
) -> ScenarioState:
    state = random_initial_state(dynamics, rng)
    for _ in range(dynamics.scenario_steps):
        state = step_moisture(state, dynamics.dt, dynamics, rng)
    return state
