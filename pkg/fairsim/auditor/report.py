"""The serialized fairness report."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, Field

from fairsim.auditor.metrics import (
    DEFAULT_DELTAS,
    EpsilonDeltaCurve,
    estimate_epsilon_delta,
    victory_distribution,
)
from fairsim.auditor.races import RaceRecord
from fairsim.auditor.requirements import AuditTrail, check_requirements


logger = logging.getLogger(__name__)


class EpsilonPoint(BaseModel):
    delta: float
    epsilon: int


class PairSummary(BaseModel):
    """Victory statistics of one participant pair."""
    pair: List[str]
    reaction_times_ns: List[int]
    races: int
    wins: Dict[str, int]
    faster: Optional[str] = None
    faster_win_rate: Optional[float] = None
    sub_epsilon: bool = False
    sub_epsilon_faster_win_rate: Optional[float] = None
    chi2: Optional[float] = None
    p_value: Optional[float] = None

    def win_rate(self, participant: str) -> float:
        return self.wins.get(participant, 0) / self.races if self.races else 0.0


class FairnessReport(BaseModel):
    """Everything the auditor concludes about one run.

    ``epsilon_of_delta`` is nondecreasing in delta.
    ``resolved_config`` is the scenario with every default filled in and the
    race count applied; together with ``seed`` it reproduces the run.
    """
    scenario: str = ""
    seed: int = 0
    config_hash: str = ""
    trace_digest: str = ""
    audit_epsilon_ns: int = 0
    races: int = 0
    uncontested_races: int = 0
    straddling_races: int = 0
    l_hat: Optional[int] = None
    epsilon_of_delta: List[EpsilonPoint] = Field(default_factory=list)
    max_spread: int = 0
    delta_at_audit_epsilon: Optional[float] = None
    req1_max_spread: int = 0
    req2_violations: int = 0
    req3_violations: int = 0
    victory_stats: List[PairSummary] = Field(default_factory=list)
    dropped_messages: Dict[str, int] = Field(default_factory=dict)
    duplicates_discarded: int = 0
    resolved_config: Dict[str, Any] = Field(default_factory=dict)

    def epsilon(self, delta: float) -> Optional[int]:
        for point in self.epsilon_of_delta:
            if point.delta == delta:
                return point.epsilon
        return None

    def pair(self, a: str, b: str) -> Optional[PairSummary]:
        key = sorted([a, b])
        for summary in self.victory_stats:
            if summary.pair == key:
                return summary
        return None

    def to_json(self) -> str:
        """Canonical form: sorted keys, stable across runs with equal inputs."""
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(self.to_json(), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "FairnessReport":
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))


def build_report(
    records: Sequence[RaceRecord],
    trail: AuditTrail,
    epsilon: int,
    deltas: Sequence[float] = DEFAULT_DELTAS,
    **provenance: Any,
) -> FairnessReport:
    """Run every auditor operation over a finished run."""
    contested = [r for r in records if r.contested]
    checks = check_requirements(trail)
    report = FairnessReport(
        audit_epsilon_ns=epsilon,
        races=len(contested),
        uncontested_races=len(records) - len(contested),
        straddling_races=sum(1 for r in contested if r.straddles_window),
        req1_max_spread=checks.req1_max_spread,
        req2_violations=checks.req2_violations,
        req3_violations=checks.req3_violations,
        dropped_messages=dict(sorted(trail.dropped.items())),
        **provenance,
    )
    if not contested:
        logger.warning("No contested races: epsilon(delta) not estimated")
        return report

    curve: EpsilonDeltaCurve = estimate_epsilon_delta(contested, deltas)
    report.l_hat = curve.l_hat
    report.epsilon_of_delta = [EpsilonPoint(delta=d, epsilon=e) for d, e in curve.points]
    report.max_spread = curve.max_spread
    report.delta_at_audit_epsilon = curve.delta_at(epsilon)

    for stats in victory_distribution(contested, epsilon).values():
        report.victory_stats.append(
            PairSummary(
                pair=list(stats.pair),
                reaction_times_ns=list(stats.reaction_times),
                races=stats.races,
                wins=stats.wins,
                faster=stats.faster,
                faster_win_rate=stats.faster_win_rate,
                sub_epsilon=stats.sub_epsilon,
                sub_epsilon_faster_win_rate=stats.sub_epsilon_faster_win_rate,
                chi2=stats.chi2,
                p_value=stats.p_value,
            )
        )
    return report
