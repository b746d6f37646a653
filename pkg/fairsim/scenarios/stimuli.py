"""Stimulus schedule generation."""

from typing import Iterator, Optional

from fairsim.kernel.rng import RngStream
from fairsim.kernel.time import SimTime, to_simtime
from fairsim.participants.models import Opportunity, Stimulus, StimulusKind
from fairsim.scenarios.config import ScheduleKind, StimuliConfig


EXCHANGE_PARTICIPANT = "~exchange"


def stimulus_owner(cfg: StimuliConfig) -> str:
    """Participant the opportunity's resting liquidity belongs to."""
    return cfg.owner or EXCHANGE_PARTICIPANT


def generate_stimuli(
    cfg: StimuliConfig,
    rng: RngStream,
    count: Optional[int] = None,
    min_gap: SimTime = 0,
) -> Iterator[Stimulus]:
    """Yield stimuli lazily in time order.

    Each stimulus opens after the previous race's horizon plus a gap that is
    exponential (poisson schedule) or fixed at the mean inter-arrival time,
    and never shorter than ``min_gap``.
    """
    total = cfg.count if count is None else count
    opportunity = Opportunity(
        cfg.opportunity.book, cfg.opportunity.side, cfg.opportunity.price, cfg.opportunity.qty
    )
    owner = stimulus_owner(cfg)
    t_e = cfg.start_ns
    for stimulus_id in range(total):
        stimulus = Stimulus(stimulus_id, t_e, opportunity, cfg.kind, owner, cfg.horizon_ns)
        yield stimulus
        if cfg.schedule is ScheduleKind.FIXED:
            gap = cfg.mean_interarrival_ns
        else:
            gap = to_simtime(rng.exponential(cfg.mean_interarrival_ns))
        t_e = stimulus.closes_at + max(gap, min_gap)
