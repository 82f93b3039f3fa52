import math

import numpy as np
import pytest

from copresence.config import MoistureDynamicsConfig
from copresence.errors import ConfigError, NonFiniteError
from copresence.types import WeatherType
from copresence.weather_sim import (
    MembershipConfig,
    ScenarioState,
    binarize,
    build_weather_effects,
    default_membership_config,
    fog_density,
    ground_truth_from_weights,
    label_error_propagation,
    label_error_variance,
    membership_scores,
    relative_moisture,
    render_blend,
    simulate_scenario,
    state_to_probabilities,
    step_moisture,
)
from copresence.weather_sim.scene import render_base_scene

CATEGORIES = list(WeatherType)


def _score(scores, category: WeatherType) -> float:
    return scores[CATEGORIES.index(category)]


def _constant_effect(value: float):
    return lambda base: np.full_like(base, value)


class TestStepMoisture:
    def test_conservation_step(self):
        state = ScenarioState(
            moisture=10.0,
            temperature=15.0,
            inflow=2.0,
            evapotranspiration=1.0,
            outflow=0.5,
            precipitation=1.5,
        )
        assert step_moisture(state, dt=1.0).moisture == pytest.approx(11.0)

    def test_equilibrium(self):
        state = ScenarioState(moisture=4.2, temperature=15.0)
        assert step_moisture(state, dt=1.0).moisture == 4.2

    def test_clamped_at_zero(self):
        state = ScenarioState(moisture=0.2, temperature=15.0, precipitation=1.0)
        assert step_moisture(state, dt=1.0).moisture == 0.0

    def test_advances_time(self):
        assert step_moisture(ScenarioState(moisture=1.0, temperature=0.0), dt=0.5).t == 1

    def test_non_finite_flux_rejected(self):
        state = ScenarioState(moisture=1.0, temperature=0.0, inflow=math.inf)
        with pytest.raises(NonFiniteError):
            step_moisture(state, dt=1.0)

    def test_non_positive_step_rejected(self):
        with pytest.raises(ValueError):
            step_moisture(ScenarioState(moisture=1.0, temperature=0.0), dt=0.0)

    @pytest.mark.parametrize("inflow, precipitation", [(2.0, 0.5), (0.25, 1.0), (1.0, 1.0)])
    def test_constant_fluxes_follow_closed_form(self, inflow, precipitation):
        state = ScenarioState(
            moisture=30.0,
            temperature=15.0,
            inflow=inflow,
            evapotranspiration=0.3,
            outflow=0.2,
            precipitation=precipitation,
        )
        start, net, dt = state.moisture, state.net_flux, 0.25
        for _ in range(40):
            state = step_moisture(state, dt=dt)
        assert state.t == 40
        assert state.moisture == pytest.approx(start + 40 * dt * net, rel=1e-12)

    @pytest.mark.parametrize("temperature", [-30.5, 50.5])
    def test_temperature_outside_range_rejected(self, temperature):
        with pytest.raises(ValueError, match="temperature"):
            step_moisture(ScenarioState(moisture=1.0, temperature=temperature), dt=1.0)

    def test_temperature_range_bounds_accepted(self):
        for temperature in (-30.0, 50.0):
            step_moisture(ScenarioState(moisture=1.0, temperature=temperature), dt=1.0)

    def test_dynamics_stay_in_bounds(self):
        dynamics = MoistureDynamicsConfig()
        rng = np.random.default_rng(3)
        state = simulate_scenario(dynamics, rng)
        assert state.t == dynamics.scenario_steps
        assert state.moisture >= 0
        assert dynamics.temperature_min <= state.temperature <= dynamics.temperature_max
        assert min(state.inflow, state.outflow, state.precipitation) >= 0

    def test_simulation_is_seeded(self):
        dynamics = MoistureDynamicsConfig()
        first = simulate_scenario(dynamics, np.random.default_rng(11))
        second = simulate_scenario(dynamics, np.random.default_rng(11))
        assert first == second


class TestFogDensity:
    def test_both_terms_vanish(self):
        assert fog_density(0.0, 1.0) == 0.0

    def test_matches_extended_precision(self):
        alpha, beta = np.longdouble("17.27"), np.longdouble("237.7")
        t, s = np.longdouble(20), np.longdouble("0.8")
        expected = alpha * t / (beta + t) + np.log(s)
        assert fog_density(20.0, 0.8, clip=False) == pytest.approx(float(expected), abs=1e-12)

    def test_negative_density_clipped(self):
        assert fog_density(0.0, 0.1) == 0.0
        assert fog_density(0.0, 0.1, clip=False) == pytest.approx(math.log(0.1))

    @pytest.mark.parametrize("moisture", [0.0, -0.5])
    def test_non_positive_relative_moisture_rejected(self, moisture):
        with pytest.raises(ValueError):
            fog_density(10.0, moisture)

    def test_temperature_below_pole_rejected(self):
        with pytest.raises(ValueError):
            fog_density(-237.7, 0.5)

    def test_relative_moisture_is_bounded(self):
        assert relative_moisture(0.0, 20.0) > 0
        assert relative_moisture(50.0, 20.0) == 1.0
        assert relative_moisture(5.0, 20.0) == 0.25


class TestMembership:
    def test_dry_hot_scene_is_sunny(self):
        state = ScenarioState(moisture=1.0, temperature=35.0)
        scores = membership_scores(state)
        assert _score(scores, WeatherType.RAIN) < 0.05
        assert _score(scores, WeatherType.EXTRASUNNY) > 0.9

    def test_rain_midpoint_at_boundary(self):
        config = default_membership_config(boundary=10.0)
        scores = membership_scores(ScenarioState(moisture=10.0, temperature=15.0), config)
        assert _score(scores, WeatherType.RAIN) == 0.5

    def test_neutral_dominates_calm_state(self):
        state = ScenarioState(moisture=10.0, temperature=10.0)
        probabilities = state_to_probabilities(state)
        assert CATEGORIES[int(np.argmax(probabilities))] == WeatherType.NEUTRAL
        assert probabilities.max() == 1.0

    def test_memberships_lie_in_unit_interval(self):
        dynamics = MoistureDynamicsConfig()
        rng = np.random.default_rng(5)
        for _ in range(20):
            scores = membership_scores(simulate_scenario(dynamics, rng))
            assert ((scores >= 0) & (scores <= 1)).all()

    def test_category_subset(self):
        scores = membership_scores(
            ScenarioState(moisture=10.0, temperature=15.0),
            categories=[WeatherType.RAIN, WeatherType.SNOW],
        )
        assert scores.shape == (2,)

    def test_config_round_trips_through_dict(self):
        config = default_membership_config(boundary=8.0)
        assert MembershipConfig.from_dict(config.to_dict()) == config

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            MembershipConfig.from_dict({"boundary": 1.0, "colour": "red"})

    def test_unknown_category_rejected(self):
        with pytest.raises(ConfigError):
            MembershipConfig.from_dict({"rules": {"hail": []}})

    def test_missing_rule_rejected(self):
        config = MembershipConfig(rules={})
        with pytest.raises(ConfigError):
            membership_scores(ScenarioState(moisture=1.0, temperature=1.0), config)


class TestRenderBlend:
    def test_degenerate_blend_is_first_effect(self, rng):
        base = render_base_scene(rng, 16)
        effects = build_weather_effects([WeatherType.RAIN, WeatherType.FOGGY])
        out = render_blend(base, effects, [1.0, 0.0])
        np.testing.assert_array_equal(out, effects[0](base))

    def test_even_blend_of_constant_tints(self):
        base = np.zeros((4, 4, 3))
        out = render_blend(base, [_constant_effect(0.2), _constant_effect(0.6)], [0.5, 0.5])
        np.testing.assert_allclose(out, 0.4, atol=1e-15)

    def test_matches_per_pixel_weighted_sum(self, rng):
        base = rng.random((8, 8, 3))
        effects = build_weather_effects([WeatherType.SNOW, WeatherType.SMOG])
        out = render_blend(base, effects, [0.3, 0.7])
        first, second = effects[0](base), effects[1](base)
        for index in np.ndindex(base.shape):
            assert out[index] == pytest.approx(
                0.3 * first[index] + 0.7 * second[index], abs=1e-12
            )

    def test_blend_is_weighted_sum_of_pure_renders(self, rng):
        base = render_base_scene(rng, 16)
        effects = build_weather_effects(CATEGORIES)
        n = len(effects)
        pure = [render_blend(base, effects, np.eye(n)[i]) for i in range(n)]
        for _ in range(5):
            weights = rng.dirichlet(np.ones(n))
            weights[rng.random(n) < 0.5] = 0.0
            weights[int(rng.integers(n))] += 1e-3
            weights /= weights.sum()
            expected = np.zeros_like(base)
            for weight, layer in zip(weights, pure):
                if weight:
                    expected += weight * layer
            np.testing.assert_allclose(render_blend(base, effects, weights), expected, atol=1e-12)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            render_blend(np.zeros((2, 2, 3)), [_constant_effect(0.1)] * 2, [0.5, 0.6])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            render_blend(np.zeros((2, 2, 3)), [_constant_effect(0.1)], [0.5, 0.5])

    def test_every_category_has_an_effect(self, rng):
        base = render_base_scene(rng, 16)
        for effect in build_weather_effects(CATEGORIES):
            out = effect(base)
            assert out.shape == base.shape
            assert 0.0 <= out.min() and out.max() <= 1.0
            assert not np.array_equal(out, base)


class TestLabels:
    @pytest.mark.parametrize(
        "weights", [[0.3, 0.7], [0.0, 1.0, 0.0], [0.2, 0.3, 0.5]]
    )
    def test_label_is_blend_weight_vector(self, weights):
        np.testing.assert_array_equal(ground_truth_from_weights(weights), weights)

    def test_invalid_weights_rejected(self):
        with pytest.raises(ValueError):
            ground_truth_from_weights([0.5, 0.2])

    @pytest.mark.parametrize(
        "sigma_a, variance", [(0.1, 1e-4), (0.0, 0.0), (0.2, 1.6e-3)]
    )
    def test_label_error_variance(self, sigma_a, variance):
        assert label_error_variance(sigma_a) == pytest.approx(variance, abs=1e-18)

    def test_label_error_propagation_is_one_percent(self):
        assert label_error_propagation(0.1) == pytest.approx(0.01)
        assert label_error_propagation(0.1) ** 2 == pytest.approx(1e-4)

    @pytest.mark.parametrize(
        "probabilities, threshold, expected",
        [
            ([0.3, 0.7], 0.5, [0, 1]),
            ([0.5], 0.5, [1]),
            ([0.2, 0.3, 0.5], 0.25, [0, 1, 1]),
        ],
    )
    def test_binarize(self, probabilities, threshold, expected):
        np.testing.assert_array_equal(binarize(probabilities, threshold), expected)

    def test_binarize_threshold_range(self):
        with pytest.raises(ValueError):
            binarize([0.5], 1.0)
