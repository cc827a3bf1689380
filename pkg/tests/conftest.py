import pytest

from app.core.config import get_settings
from app.core.rng import RngStream
from app.core.worker_pool import WorkerPool
from app.schemas.models import ModelSpec


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Fresh settings per test, artifacts under tmp_path, no stray .env values."""
    for name in ("LAB_THREADS", "LAB_SEED", "LAB_REPLICAS", "LOG_FILE", "DEBUG"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("OUTPUT_DIR", str(tmp_path / "results"))
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    return RngStream(seed=12345, stream_id=0)


@pytest.fixture
def pool():
    workers = WorkerPool(threads=2, chunk_size=64)
    yield workers
    workers.close()


@pytest.fixture
def tcp():
    return ModelSpec.tcp_variable()
