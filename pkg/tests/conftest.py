import pytest

from dpmean.harness import (
    DatasetKind,
    DatasetSpec,
    ExperimentConfig,
    PRESET_MEANS,
    PRESET_SIZE,
    preset_config,
    sweep,
)
from dpmean.mechanisms import Mechanism

GATE_SEED = 20240601


@pytest.fixture(scope="session")
def eps_half_grid_reports():
    """All three mechanisms at epsilon 0.5 over the preset mean grid,
    10^4 trials per cell; shared by the envelope and peak-location tests."""
    specs = tuple(
        DatasetSpec(DatasetKind.TWO_POINT, PRESET_SIZE, mu, (0.0, 1.0)) for mu in PRESET_MEANS
    )
    config = ExperimentConfig(tuple(Mechanism), (0.5,), specs, 10_000, GATE_SEED)
    reports = sweep(config)
    return {
        mech: [r for r in reports if r.mechanism is mech] for mech in Mechanism
    }


@pytest.fixture(scope="session")
def fig2c_reports():
    """The full mechanism-comparison preset at a fixed seed."""
    return sweep(preset_config("fig2c", GATE_SEED))
