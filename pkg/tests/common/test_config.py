# tests/common/test_config.py
import pytest

from common.config import Settings
from common.errors import (
    CheckpointFormatError,
    ConfigError,
    DatasetError,
    EgcnnError,
    NonFiniteError,
    ParameterRangeError,
    ShapeMismatchError,
    TrainingDivergedError,
)


def test_defaults():
    s = Settings(_env_file=None)
    assert s.epsilon == 1e-20
    assert s.gamma == "softplus"
    assert (s.e_edge, s.e_max, s.tau) == (0.1, 1.0, 5.0)
    assert s.learning_rate == 1e-3
    assert s.default_preset == "canny-k3"
    assert s.default_checkpoint is None


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("EGCNN_TAU", "2.5")
    monkeypatch.setenv("egcnn_workers", "4")
    s = Settings(_env_file=None)
    assert s.tau == 2.5
    assert s.workers == 4


@pytest.mark.parametrize(
    "error",
    [
        CheckpointFormatError,
        ConfigError,
        DatasetError,
        NonFiniteError,
        ParameterRangeError,
        ShapeMismatchError,
        TrainingDivergedError,
    ],
)
def test_errors_share_a_base(error):
    assert issubclass(error, EgcnnError)
