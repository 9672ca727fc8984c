import numpy as np
import pytest
from pathlib import Path
import sys, os

sys.path.insert(0, Path(os.path.dirname(__file__)).parent.parent.as_posix())

from latentqcd.common.errors import MalformedLogError, NonFiniteValueError
from latentqcd.errormodel import (
    Gaussian,
    HmmSpec,
    read_error_log,
    read_trajectory,
    sample_path,
    write_error_log,
    write_mode_assignment,
)


def test_error_log_is_written_and_read_back(tmp_path):
    # Arrange
    spec = HmmSpec.symmetric(0.2, Gaussian(mean=0.0, std=0.3), Gaussian(mean=1.0, std=0.3))
    path = sample_path(spec, 50, seed=4)

    # Act
    write_error_log(tmp_path / "errors.csv", path, include_modes=True)
    errors = read_error_log(tmp_path / "errors.csv")

    # Assert
    assert np.array_equal(errors, path.errors)
    header = (tmp_path / "errors.csv").read_text().splitlines()[0]
    assert header == "t,e,mode"


def test_error_log_round_trip_is_bit_exact(tmp_path):
    # Arrange
    errors = np.random.default_rng(8).uniform(0.0, 10.0, size=10_000)

    # Act
    write_error_log(tmp_path / "uniform.csv", errors)
    read_back = read_error_log(tmp_path / "uniform.csv")

    # Assert
    assert np.array_equal(read_back, errors)


def test_error_log_rejects_wrong_header(tmp_path):
    # Arrange
    (tmp_path / "bad.csv").write_text("time,error\n1,0.5\n")

    # Act & Assert
    with pytest.raises(MalformedLogError):
        read_error_log(tmp_path / "bad.csv")


def test_error_log_rejects_non_monotone_time(tmp_path):
    # Arrange
    (tmp_path / "bad.csv").write_text("t,e\n1,0.5\n1,0.7\n")

    # Act & Assert
    with pytest.raises(MalformedLogError):
        read_error_log(tmp_path / "bad.csv")


def test_error_log_rejects_non_finite_values(tmp_path):
    # Arrange
    (tmp_path / "bad.csv").write_text("t,e\n1,0.5\n2,inf\n")

    # Act & Assert
    with pytest.raises(NonFiniteValueError):
        read_error_log(tmp_path / "bad.csv")


def test_mode_assignment_csv(tmp_path):
    # Arrange
    spec = HmmSpec.symmetric(0.2, Gaussian(mean=0.0, std=0.3), Gaussian(mean=1.0, std=0.3))
    path = sample_path(spec, 5, seed=4)

    # Act
    write_mode_assignment(tmp_path / "modes.csv", path.errors, path.mode_sequence())

    # Assert
    lines = (tmp_path / "modes.csv").read_text().splitlines()
    assert lines[0] == "t,e,mode"
    assert len(lines) == 6
    assert all(line.split(",")[2] in ("L", "H") for line in lines[1:])


def test_trajectory_csv(tmp_path):
    # Arrange
    (tmp_path / "traj.csv").write_text("t,px,py,tx,ty\n0,0,0,0,0\n1,1,0,0,0\n")

    # Act
    pred, truth = read_trajectory(tmp_path / "traj.csv")

    # Assert
    assert pred.shape == truth.shape == (2, 2)
    assert pred[1, 0] == 1.0
