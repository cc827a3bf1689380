import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, TypeVar

from opentelemetry import trace

from .config import get_settings
from .errors import UsageError

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)

T = TypeVar("T")

# Replicas handed to one worker at a time.
DEFAULT_CHUNK_SIZE = 256


@dataclass
class PoolStats:
    """Running totals for logging"""
    batches: int = 0
    replicas: int = 0


class WorkerPool:
    """Thread pool running replica functions over stream ids.

    Results always come back in stream-id order, so reductions downstream
    do not depend on how many workers ran or which finished first.
    """

    def __init__(self, threads: Optional[int] = None, chunk_size: int = DEFAULT_CHUNK_SIZE):
        self.threads = resolve_thread_count(threads)
        self.chunk_size = max(1, int(chunk_size))
        self.stats = PoolStats()
        self._executor: Optional[ThreadPoolExecutor] = None

    def _get_executor(self) -> ThreadPoolExecutor:
        if self._executor is None:
            self._executor = ThreadPoolExecutor(max_workers=self.threads, thread_name_prefix="replica")
        return self._executor

    def map_replicas(self, fn: Callable[[int], T], n: int) -> list[T]:
        """Evaluate fn(stream_id) for stream_id in 0..n-1, ordered by stream id."""
        with tracer.start_as_current_span("map_replicas") as span:
            span.set_attribute("replicas", n)
            span.set_attribute("threads", self.threads)

            if self.threads == 1 or n <= self.chunk_size:
                results = [fn(i) for i in range(n)]
            else:
                chunks = [range(lo, min(lo + self.chunk_size, n)) for lo in range(0, n, self.chunk_size)]
                results = []
                for block in self._get_executor().map(lambda ids: [fn(i) for i in ids], chunks):
                    results.extend(block)

            self.stats.batches += 1
            self.stats.replicas += n
            logger.debug(f"Ran {n} replicas on {self.threads} thread(s) (batches so far: {self.stats.batches})")
            return results

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None
            logger.debug("Worker pool shut down")


def resolve_thread_count(threads: Optional[int] = None) -> int:
    """Explicit value, then LAB_THREADS, then available parallelism."""
    if threads is not None:
        if threads < 1:
            raise UsageError(f"thread count must be positive, got {threads}")
        return threads
    configured = get_settings().LAB_THREADS
    if configured:
        return configured
    return os.cpu_count() or 1


# Global pool instance
_worker_pool: Optional[WorkerPool] = None


def get_worker_pool() -> WorkerPool:
    """Get the global worker pool, creating it with default sizing if needed"""
    global _worker_pool
    if _worker_pool is None:
        _worker_pool = WorkerPool()
    return _worker_pool


def configure_worker_pool(threads: Optional[int] = None) -> WorkerPool:
    """Replace the global pool, e.g. after `--threads` was parsed"""
    global _worker_pool
    if _worker_pool is not None:
        _worker_pool.close()
    _worker_pool = WorkerPool(threads=threads)
    logger.info(f"Worker pool configured with {_worker_pool.threads} thread(s)")
    return _worker_pool
