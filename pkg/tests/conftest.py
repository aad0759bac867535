import numpy as np
import pytest

from src.config.configurations import reload_settings
from src.entity.series_entity import DataSeries
from src.logs.logger_config import LoggerConfig


@pytest.fixture(autouse=True)
def fresh_logging():
    """Rebuild loggers per test so handlers never hold a stale stderr."""
    LoggerConfig.reset()
    yield
    LoggerConfig.reset()


@pytest.fixture
def clean_env(monkeypatch):
    for name in ("CSSD_THREADS", "CSSD_MESH_RATIO_THRESHOLD", "CSSD_LOG_LEVEL", "CSSD_LOG_DIR"):
        monkeypatch.delenv(name, raising=False)
    reload_settings()
    yield monkeypatch
    monkeypatch.undo()
    reload_settings()


@pytest.fixture
def tent_series():
    """Three sites where one jump either left or right of the middle site is optimal."""
    return DataSeries(xs=[0.0, 1.0, 2.0], ys=[0.0, 1.0, 0.0], deltas=[1.0, 1.0, 1.0])


@pytest.fixture
def line_series():
    xs = np.linspace(0.0, 3.0, 10)
    return DataSeries(xs=xs, ys=2.0 * xs + 1.0, deltas=np.full(10, 0.5))


def make_random_series(rng: np.random.Generator, n: int, dim: int = 1) -> DataSeries:
    """Well-conditioned random series: gaps in [0.5, 1.5], deltas in [0.5, 2]."""
    xs = np.cumsum(rng.uniform(0.5, 1.5, n))
    ys = rng.normal(0.0, 1.0, (n, dim))
    deltas = rng.uniform(0.5, 2.0, n)
    return DataSeries(xs=xs, ys=ys, deltas=deltas)


@pytest.fixture
def random_series():
    return make_random_series
