"""Counter-based random streams, one per replica.

A stream is keyed by (seed, stream_id) so replica k draws the same numbers
whichever worker runs it and in whatever order.
"""
import math

import numpy as np

_MASK64 = (1 << 64) - 1


class RngStream:
    __slots__ = ("seed", "stream_id", "_gen")

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        key = (self.seed << 64) | self.stream_id
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def uniform(self) -> float:
        """Uniform on (0, 1]."""
        return 1.0 - float(self._gen.random())

    def uniform_between(self, low: float, high: float) -> float:
        return low + (high - low) * float(self._gen.random())

    def exponential(self) -> float:
        """Unit-mean exponential by inverse transform, always finite."""
        return -math.log(self.uniform())

    def poisson(self, mean: float) -> int:
        return int(self._gen.poisson(mean))

    def sorted_uniforms(self, count: int, low: float, high: float) -> list[float]:
        if count == 0:
            return []
        draws = np.sort(self._gen.random(count))
        return [low + (high - low) * float(u) for u in draws]
