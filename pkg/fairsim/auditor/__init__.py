"""Race detection, epsilon-fairness metrics and FIFO requirement checks."""

from fairsim.auditor.metrics import (
    DEFAULT_DELTAS,
    EcdfPoint,
    EpsilonDeltaCurve,
    PairStats,
    Verdict,
    estimate_epsilon_delta,
    judge_race,
    victory_distribution,
)
from fairsim.auditor.races import RACES_CSV_HEADER, AuditError, RaceEntry, RaceRecord, RaceTracker
from fairsim.auditor.report import EpsilonPoint, FairnessReport, PairSummary, build_report
from fairsim.auditor.requirements import (
    AuditTrail,
    RequirementsCheck,
    Submission,
    check_requirements,
)

__all__ = [
    "DEFAULT_DELTAS",
    "EcdfPoint",
    "EpsilonDeltaCurve",
    "PairStats",
    "Verdict",
    "estimate_epsilon_delta",
    "judge_race",
    "victory_distribution",
    "RACES_CSV_HEADER",
    "AuditError",
    "RaceEntry",
    "RaceRecord",
    "RaceTracker",
    "EpsilonPoint",
    "FairnessReport",
    "PairSummary",
    "build_report",
    "AuditTrail",
    "RequirementsCheck",
    "Submission",
    "check_requirements",
]
