"""Checks of the three FIFO requirements against the run's ground truth."""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from fairsim.book.models import Side, Trade
from fairsim.infra.feed import Delivery
from fairsim.kernel.time import SimTime


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Submission:
    """A message the engine accepted, with the send time of the fragment that set its stamp."""
    stimulus_id: int
    participant: str
    engine: str
    t_send: SimTime
    t_arrival: SimTime
    colocated: bool = True


@dataclass
class AuditTrail:
    """Ground truth gathered while a scenario runs."""
    deliveries: List[Delivery] = field(default_factory=list)
    submissions: List[Submission] = field(default_factory=list)
    fills: List[Tuple[str, Trade]] = field(default_factory=list)
    dropped: Dict[str, int] = field(default_factory=dict)

    def drop(self, reason: str) -> None:
        self.dropped[reason] = self.dropped.get(reason, 0) + 1


@dataclass(frozen=True)
class RequirementsCheck:
    req1_max_spread: SimTime
    req2_violations: int
    req3_violations: int


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def max_delivery_spread(deliveries: List[Delivery]) -> SimTime:
    """Req. 1: latest minus earliest delivery of one update, maximized over updates."""
    by_update: Dict[int, List[SimTime]] = {}
    for d in deliveries:
        by_update.setdefault(d.update_id, []).append(d.t_receive)
    return max((max(ts) - min(ts) for ts in by_update.values()), default=0)


def submission_order_violations(submissions: List[Submission]) -> int:
    """Req. 2: colocated pairs of one race whose arrival order inverts their send order."""
    groups: Dict[Tuple[int, str], List[Submission]] = {}
    for s in submissions:
        if s.colocated:
            groups.setdefault((s.stimulus_id, s.engine), []).append(s)
    violations = 0
    for group in groups.values():
        for a, b in itertools.combinations(group, 2):
            if a.participant == b.participant:
                continue
            if _sign(a.t_send - b.t_send) * _sign(a.t_arrival - b.t_arrival) < 0:
                violations += 1
    return violations


def priority_violations(fills: List[Tuple[str, Trade]]) -> int:
    """Req. 3: fills at one price and side that skip an earlier-sequenced resting order."""
    highest: Dict[Tuple[str, Side, int], int] = {}
    violations = 0
    for engine, trade in fills:
        key = (engine, trade.maker_side, trade.price)
        seen: Optional[int] = highest.get(key)
        if seen is not None and trade.maker_seq < seen:
            violations += 1
            logger.warning(f"Priority violation on {engine}: maker seq {trade.maker_seq} after {seen}")
        else:
            highest[key] = trade.maker_seq
    return violations


def check_requirements(trail: AuditTrail) -> RequirementsCheck:
    return RequirementsCheck(
        req1_max_spread=max_delivery_spread(trail.deliveries),
        req2_violations=submission_order_violations(trail.submissions),
        req3_violations=priority_violations(trail.fills),
    )
