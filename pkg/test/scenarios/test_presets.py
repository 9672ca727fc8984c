import math

import numpy as np
from pydantic import TypeAdapter
import pytest
from pathlib import Path
import sys, os

sys.path.insert(0, Path(os.path.dirname(__file__)).parent.parent.as_posix())

from latentqcd.common.errors import InvalidSpecError, UnknownPresetError
from latentqcd.errormodel import Gaussian, HmmSpec, Laplace, StudentT, stationary_distribution
from latentqcd.scenarios import (
    Combined,
    Difficulty,
    EmissionShift,
    ShiftKind,
    TailSwap,
    TransitionShift,
    ade_inflation,
    ade_scale_mean,
    calibrated_emission_shift,
    pre_change_spec,
    preset,
    scene,
    scene_names,
)


@pytest.fixture
def pre():
    return HmmSpec.symmetric(0.15, Gaussian(mean=0.0, std=0.3), Gaussian(mean=1.0, std=0.3))


def test_registry_holds_the_seven_scenes():
    # Act
    names = scene_names()

    # Assert
    assert len(names) == 7
    assert names[0] == "highway_car_following"
    assert "urban_pedestrian_zone" in names


def test_car_following_scene():
    # Act
    car_following = scene("highway_car_following")
    spec = pre_change_spec(car_following)

    # Assert
    assert car_following.p == 0.15
    np.testing.assert_allclose(spec.P, [[0.85, 0.15], [0.15, 0.85]])
    assert spec.emission_L.mean == 0.0
    assert spec.emission_H.mean == pytest.approx(1.0)
    assert spec.emission_L.variance == pytest.approx(0.1)


def test_pedestrian_zone_is_hard():
    # Act
    pedestrian = scene("urban_pedestrian_zone")
    spec = pre_change_spec(pedestrian)

    # Assert
    assert pedestrian.p == 0.91
    assert pedestrian.mean_gap == pedestrian.variance == Difficulty.HARD
    assert spec.emission_H.mean - spec.emission_L.mean == pytest.approx(0.5)
    assert spec.emission_H.variance == pytest.approx(0.5)


def test_self_transition_reading_of_p():
    # Act
    spec = pre_change_spec(scene("highway_car_following"), interpretation="self_transition")

    # Assert
    np.testing.assert_allclose(spec.P, [[0.15, 0.85], [0.85, 0.15]])


def test_unknown_preset():
    # Act & Assert
    with pytest.raises(UnknownPresetError) as error:
        preset("autobahn")
    assert "highway_car_following" in str(error.value)


def test_default_shift_inflates_the_ade_by_148_percent():
    # Act
    scenario = preset("highway_car_following", check=False)

    # Assert
    assert ade_inflation(scenario.pre, scenario.post) == pytest.approx(1.48, abs=1e-9)
    assert scenario.post.emission_L.std == pytest.approx(1.5 * scenario.pre.emission_L.std)
    assert scenario.changepoint_grid == (1, 51, 251, 501)
    assert scenario.label == "highway_car_following"


def test_preset_with_a_configured_shift():
    # Act
    scenario = preset("highway_stop_and_go", shift=TransitionShift(new_p=0.6), m=20, check=False)

    # Assert
    assert scenario.post.P[0, 1] == pytest.approx(0.6)
    assert scenario.post.emissions == scenario.pre.emissions
    assert scenario.changepoint_grid == (1, 21, 101, 201)


def test_calibrated_shift_solves_for_the_mean(pre):
    # Act
    shift = calibrated_emission_shift(pre, sigma_scale=1.0, inflation=1.0)

    # Assert
    assert shift.delta_mean == pytest.approx(math.log(2.0), abs=1e-10)


def test_ade_scale_mean(pre):
    # Act
    value = ade_scale_mean(pre)

    # Assert
    pi = stationary_distribution(pre.P)
    expected = pi[0] * math.exp(0.045) + pi[1] * math.exp(1.045)
    assert value == pytest.approx(expected)


def test_ade_scale_mean_needs_gaussian_emissions(pre):
    # Act & Assert
    with pytest.raises(InvalidSpecError):
        ade_scale_mean(TailSwap(target="laplace").apply(pre))


def test_emission_shift(pre):
    # Act
    post = EmissionShift(delta_mean=0.5, sigma_scale=2.0).apply(pre)

    # Assert
    assert post.emission_L == Gaussian(mean=0.5, std=0.6)
    assert post.emission_H.mean == pytest.approx(1.5)
    assert post.transition == pre.transition


def test_tail_swap_keeps_moments(pre):
    # Act
    laplace = TailSwap(target="laplace").apply(pre)
    student = TailSwap(target="student_t", dof=3.0).apply(pre)

    # Assert
    assert isinstance(laplace.emission_L, Laplace)
    assert isinstance(student.emission_H, StudentT)
    for spec in (laplace, student):
        for original, swapped in zip(pre.emissions, spec.emissions):
            assert swapped.mean == pytest.approx(original.mean)
            assert swapped.variance == pytest.approx(original.variance)
    assert student.emission_L.scale == pytest.approx(0.3 / math.sqrt(3.0))


def test_combined_shift_applies_in_order(pre):
    # Arrange
    combined = Combined(shifts=[TransitionShift(new_p=0.4), EmissionShift(delta_mean=1.0)])

    # Act
    post = combined.apply(pre)

    # Assert
    assert post.P[1, 0] == pytest.approx(0.4)
    assert post.emission_L.mean == pytest.approx(1.0)


def test_shifts_parse_by_kind():
    # Arrange
    adapter = TypeAdapter(ShiftKind)

    # Act
    shift = adapter.validate_python({"kind": "combined", "shifts": [{"kind": "tail", "target": "laplace"}]})

    # Assert
    assert isinstance(shift, Combined)
    assert isinstance(shift.shifts[0], TailSwap)
    with pytest.raises(ValueError):
        adapter.validate_python({"kind": "transition", "new_p": 1.0})
    with pytest.raises(ValueError):
        adapter.validate_python({"kind": "emission", "delta_mean": 0.1, "sigma_scale": 0.5})
