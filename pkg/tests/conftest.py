from pathlib import Path

import numpy as np
import pytest

from fpte.database.models import dispose_engine
from fpte.diffusion.model import DiffusionModel
from fpte.oscillators.linear import linear_amplitude_model
from fpte.oscillators.params import DuffingParams, LinearOscParams

REPO_ROOT = Path(__file__).resolve().parents[1]


def _constant(value):
    return lambda x: np.full(np.shape(x), value)


@pytest.fixture
def r_process():
    """dr = (1/(2r) - r) dt + dW on (0, 5); x_ref = 2.5."""
    return linear_amplitude_model(LinearOscParams(d=1.0, omega_n=1.0, eps=1.0), radius=5.0)


@pytest.fixture
def steep_rprocess():
    """dr = (1/(2r) - 100 r) dt + dW on (0, 5); log s = 100 y^2 - ln y spans about 2500."""
    return DiffusionModel(
        lambda x: 0.5 / np.asarray(x, dtype=float) - 100.0 * np.asarray(x, dtype=float),
        _constant(1.0),
        0.0,
        5.0,
        name="steep",
    )


@pytest.fixture
def brownian():
    """m = 0, sigma^2 = 2 on (0, 1); both ends regular."""
    return DiffusionModel(_constant(0.0), _constant(2.0), 0.0, 1.0, name="brownian")


@pytest.fixture
def exit_model():
    """m = 0, sigma^2 = z^1.5 on (0, 1); the left end is an exit."""
    return DiffusionModel(_constant(0.0), lambda z: np.asarray(z, dtype=float) ** 1.5, 0.0, 1.0, name="exit")


@pytest.fixture
def ornstein_uhlenbeck():
    """m = -x, sigma^2 = 2 on (-8, 8); stationary law is N(0, 1)."""
    return DiffusionModel(lambda x: -np.asarray(x, dtype=float), _constant(2.0), -8.0, 8.0, name="ou")


@pytest.fixture
def table1():
    return DuffingParams.table1()


@pytest.fixture
def scenarios_dir():
    return REPO_ROOT / "scenarios"


@pytest.fixture
def ledger(tmp_path, monkeypatch):
    """Point the run ledger at a fresh sqlite file and drop the cached engine afterwards."""
    from fpte import settings

    url = f"sqlite:///{tmp_path / 'ledger.sqlite'}"
    monkeypatch.setattr(settings, "DATABASE_URL", url)
    dispose_engine()
    yield url
    dispose_engine()
