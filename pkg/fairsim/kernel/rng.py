"""Seeded random streams, one per stochastic component."""

import hashlib
from typing import List, Sequence, TypeVar

import numpy as np

T = TypeVar("T")


def derive_seed(seed: int, stream_id: str) -> int:
    """Derive a 64-bit stream seed from the master seed and a component label.

    Stable across runs and platforms (sha256, not ``hash()``).
    """
    digest = hashlib.sha256(f"{seed}/{stream_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class RngStream:
    """Independent random stream for a single component.

    The same ``(seed, stream_id)`` always yields the same draw sequence, and a
    component's draws never shift another component's sequence.
    """

    def __init__(self, seed: int, stream_id: str):
        self.seed = seed
        self.stream_id = stream_id
        self._generator = np.random.Generator(np.random.PCG64(derive_seed(seed, stream_id)))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id!r})"

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return float(self._generator.random())

    def uniform(self, low: float, high: float) -> float:
        return float(self._generator.uniform(low, high))

    def normal(self, mean: float, std: float) -> float:
        return float(self._generator.normal(mean, std))

    def lognormal(self, mean: float, sigma: float) -> float:
        return float(self._generator.lognormal(mean, sigma))

    def pareto(self, shape: float) -> float:
        """Lomax (Pareto II) draw, support [0, inf)."""
        return float(self._generator.pareto(shape))

    def exponential(self, scale: float) -> float:
        return float(self._generator.exponential(scale))

    def integer(self, low: int, high: int) -> int:
        """Integer in [low, high)."""
        return int(self._generator.integers(low, high))

    def shuffled(self, items: Sequence[T]) -> List[T]:
        """Uniformly shuffled copy of ``items`` (Fisher-Yates via numpy)."""
        order = self._generator.permutation(len(items))
        return [items[i] for i in order]

    def fork(self, label: str) -> "RngStream":
        """Child stream scoped under this one."""
        return RngStream(self.seed, f"{self.stream_id}/{label}")
