"""Latency models for links, gateways and feeds."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional

from fairsim.infra.errors import InfrastructureError
from fairsim.kernel.rng import RngStream
from fairsim.kernel.time import SimTime, to_simtime


class LatencyKind(str, Enum):
    """Supported delay distributions."""
    CONSTANT = "constant"
    UNIFORM_JITTER = "uniform-jitter"
    NORMAL = "normal"
    LOGNORMAL = "lognormal"
    PARETO = "pareto"


# required distribution parameters per kind, all in nanoseconds except shapes
REQUIRED_PARAMS: Dict[LatencyKind, tuple] = {
    LatencyKind.CONSTANT: (),
    LatencyKind.UNIFORM_JITTER: ("high",),
    LatencyKind.NORMAL: ("std",),
    LatencyKind.LOGNORMAL: ("median", "sigma"),
    LatencyKind.PARETO: ("scale", "shape"),
}


def missing_params(kind: LatencyKind, params: Mapping[str, float]) -> List[str]:
    """Required parameters of ``kind`` absent from ``params``."""
    return [p for p in REQUIRED_PARAMS[kind] if p not in params]


@dataclass(frozen=True)
class LatencyModel:
    """Delay distribution: ``base + offset(endpoint) + draw``, truncated at 0.

    Parameters by kind:
        uniform-jitter: ``low`` (default 0), ``high``; draw ~ U[low, high]
        normal: ``mean`` (default 0), ``std``
        lognormal: ``median``, ``sigma``; draw = median * exp(sigma * N(0,1))
        pareto: ``scale``, ``shape``; draw = scale * Lomax(shape), heavy tail

    A constant model consumes no random draws.
    """
    kind: LatencyKind = LatencyKind.CONSTANT
    base: SimTime = 0
    params: Mapping[str, float] = field(default_factory=dict)
    port_offsets: Mapping[str, SimTime] = field(default_factory=dict)

    def __post_init__(self) -> None:
        missing = missing_params(self.kind, self.params)
        if missing:
            raise InfrastructureError(f"Latency kind '{self.kind.value}' missing params: {missing}")
        if self.base < 0:
            raise InfrastructureError(f"Latency base must be >= 0, got {self.base}")

    @classmethod
    def constant(cls, delay: SimTime, port_offsets: Optional[Mapping[str, SimTime]] = None) -> "LatencyModel":
        return cls(LatencyKind.CONSTANT, delay, {}, dict(port_offsets or {}))

    @classmethod
    def uniform(cls, base: SimTime, high: float, low: float = 0.0) -> "LatencyModel":
        return cls(LatencyKind.UNIFORM_JITTER, base, {"low": low, "high": high})

    @property
    def is_deterministic(self) -> bool:
        return self.kind is LatencyKind.CONSTANT

    def offset(self, endpoint: Optional[str]) -> SimTime:
        if endpoint is None:
            return 0
        return self.port_offsets.get(endpoint, 0)

    def draw(self, rng: RngStream) -> float:
        """Random component only (0 for constant)."""
        p = self.params
        if self.kind is LatencyKind.CONSTANT:
            return 0.0
        if self.kind is LatencyKind.UNIFORM_JITTER:
            return rng.uniform(p.get("low", 0.0), p["high"])
        if self.kind is LatencyKind.NORMAL:
            return rng.normal(p.get("mean", 0.0), p["std"])
        if self.kind is LatencyKind.LOGNORMAL:
            return rng.lognormal(math.log(p["median"]), p["sigma"])
        return p["scale"] * rng.pareto(p["shape"])

    def sample(self, rng: RngStream, endpoint: Optional[str] = None) -> SimTime:
        """Sampled delay in whole nanoseconds, never negative."""
        return to_simtime(self.base + self.offset(endpoint) + self.draw(rng))

    def minimum(self, endpoint: Optional[str] = None) -> SimTime:
        """Lower bound of :meth:`sample` for this endpoint."""
        if self.kind is LatencyKind.NORMAL:
            return 0
        floor = self.params.get("low", 0.0) if self.kind is LatencyKind.UNIFORM_JITTER else 0.0
        return to_simtime(self.base + self.offset(endpoint) + floor)

    def with_base(self, base: SimTime) -> "LatencyModel":
        return LatencyModel(self.kind, base, dict(self.params), dict(self.port_offsets))
