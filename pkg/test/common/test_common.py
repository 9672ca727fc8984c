import json
import pytest
from pathlib import Path
import sys, os

sys.path.insert(0, Path(os.path.dirname(__file__)).parent.parent.as_posix())

from latentqcd.common import (
    GlobalContext,
    Transferables,
    derive_seed,
    dict_to_object,
    exact_mean,
    object_to_dict,
    standard_error,
)
from latentqcd.common.errors import (
    ConvergenceError,
    DegenerateFitError,
    FalseAlarmDominatedError,
    InvalidSpecError,
    MalformedLogError,
    NonFiniteValueError,
    UnknownPresetError,
    exit_code,
)
from latentqcd.detectors import Detector, NllDetector
from latentqcd.errormodel import Gaussian


def test_exit_codes_follow_error_families():
    # Arrange
    cases = {
        InvalidSpecError(): 2,
        UnknownPresetError("nowhere"): 2,
        DegenerateFitError(): 3,
        MalformedLogError(): 3,
        ConvergenceError(): 4,
        FalseAlarmDominatedError(): 4,
        RuntimeError("boom"): 1,
    }

    # Act
    codes = {type(e).__name__: exit_code(e) for e in cases}

    # Assert
    assert codes == {type(e).__name__: code for e, code in cases.items()}


def test_errors_carry_default_messages():
    # Act
    error = DegenerateFitError()

    # Assert
    assert error.message == "Degenerate Fit"
    assert isinstance(NonFiniteValueError(), ValueError)


def test_derive_seed_is_deterministic_and_distinct():
    # Act
    a = derive_seed(7, 0, 1)
    b = derive_seed(7, 0, 1)
    c = derive_seed(7, 1, 0)

    # Assert
    assert a == b
    assert a != c
    assert 0 <= a < 2**64


def test_exact_mean_and_standard_error():
    # Arrange
    values = [1e16, 1.0, -1e16, 3.0]

    # Act
    mean = exact_mean(values)

    # Assert
    assert mean == 1.0
    assert standard_error([2.0]) == 0.0
    assert standard_error([1.0, 3.0]) == pytest.approx(1.0)


def test_global_context_loads_yaml_on_top_of_defaults(tmp_path):
    # Arrange
    path = tmp_path / "context.yaml"
    path.write_text("output_folder: somewhere\npreset_file:\n")
    context = GlobalContext()

    try:
        # Act
        context.load_from_yaml(path)

        # Assert
        assert context["output_folder"] == "somewhere"
        assert context["preset_file"].endswith("presets.json")
        assert context.get("missing", None) is None
        with pytest.raises(KeyError):
            context["missing"]
    finally:
        context.reset()


def test_detector_serializes_and_rebuilds():
    # Arrange
    detector = NllDetector(pre=Gaussian(mean=0.0, std=1.0), threshold=3.0)

    # Act
    rebuilt = Transferables().to_object(json.loads(detector.json()), Detector)

    # Assert
    assert isinstance(rebuilt, NllDetector)
    assert rebuilt.threshold == 3.0
    assert rebuilt.pre == detector.pre


def test_clone_applies_overrides_and_keeps_label():
    # Arrange
    detector = NllDetector(pre=Gaussian(mean=0.0, std=1.0), threshold=3.0)
    detector.label = "custom"

    # Act
    clone = detector.clone(threshold=4.0)

    # Assert
    assert clone is not detector
    assert clone.threshold == 4.0
    assert clone.label == "custom"
    assert detector.threshold == 3.0


def test_nested_values_survive_encoding():
    # Arrange
    value = {"a": [1, 2.5, "x"], "b": None, "c": (True,)}

    # Act
    decoded = dict_to_object(object_to_dict(value))

    # Assert
    assert decoded == value


def test_overview_lists_detectors_with_documented_arguments():
    # Act
    overview = Transferables().overview(Detector)

    # Assert
    assert "DcMmdDetector" in overview
    assert "NllDetector" in overview
    assert "Detector" not in overview
    assert overview["DcMmdDetector"]["required_args"]["reference"]["description"]
    assert overview["DcMmdDetector"]["optional_args"]["m"]["default"] == "50"
