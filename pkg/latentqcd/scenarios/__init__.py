from .shifts import (
    Combined,
    EmissionShift,
    ShiftKind,
    TailSwap,
    TransitionShift,
    ade_inflation,
    ade_scale_mean,
    calibrated_emission_shift,
)
from .presets import (
    Difficulty,
    PresetRegistry,
    ScenePreset,
    load_registry,
    pre_change_spec,
    preset,
    scene,
    scene_names,
)
from .suites import (
    UnknownPostchangeSuite,
    heavy_tail_suite,
    stationarity_suite,
    unknown_postchange_suite,
)
