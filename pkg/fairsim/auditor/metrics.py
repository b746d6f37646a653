"""Per-race fairness verdicts, the empirical (epsilon, delta) curve and victory statistics."""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from fairsim.auditor.races import AuditError, RaceRecord
from fairsim.kernel.time import SimTime


logger = logging.getLogger(__name__)

DEFAULT_DELTAS: Tuple[float, ...] = (0.5, 0.9, 0.99, 0.999)


class Verdict(str, Enum):
    FAIR = "fair"
    UNFAIR = "unfair"


def judge_race(rec: RaceRecord, epsilon: SimTime) -> Verdict:
    """Pairwise criterion: fair iff every |d_A - d_B| <= epsilon.

    Raises:
        AuditError: If the race has fewer than two entries
    """
    if not rec.contested:
        raise AuditError(f"Race {rec.stimulus_id} has {len(rec.entries)} entries")
    return Verdict.FAIR if rec.spread <= epsilon else Verdict.UNFAIR


@dataclass(frozen=True)
class EcdfPoint:
    spread: SimTime
    fraction: float


@dataclass
class EpsilonDeltaCurve:
    """Empirical epsilon(delta) over a race population.

    Each epsilon is an observed spread (inverted-CDF quantile), so the curve is
    nondecreasing in delta.
    """
    points: List[Tuple[float, SimTime]]
    l_hat: SimTime
    spreads: List[SimTime] = field(default_factory=list)

    @property
    def races(self) -> int:
        return len(self.spreads)

    @property
    def max_spread(self) -> SimTime:
        return max(self.spreads) if self.spreads else 0

    def epsilon(self, delta: float) -> SimTime:
        return _quantile(self.spreads, delta)

    def delta_at(self, epsilon: SimTime) -> float:
        """Fraction of races that are epsilon-fair."""
        if not self.spreads:
            return 0.0
        ordered = np.sort(np.asarray(self.spreads, dtype=np.int64))
        return float(np.searchsorted(ordered, epsilon, side="right")) / len(ordered)

    def ecdf(self) -> List[EcdfPoint]:
        values, counts = np.unique(np.asarray(self.spreads, dtype=np.int64), return_counts=True)
        cumulative = np.cumsum(counts) / len(self.spreads)
        return [EcdfPoint(int(v), float(c)) for v, c in zip(values, cumulative)]


def _quantile(values: Sequence[int], q: float) -> SimTime:
    return int(np.quantile(np.asarray(values, dtype=np.int64), q, method="inverted_cdf"))


def estimate_epsilon_delta(
    records: Iterable[RaceRecord], deltas: Sequence[float] = DEFAULT_DELTAS
) -> EpsilonDeltaCurve:
    """Estimate epsilon(delta) and the exchange-wide constant delay.

    ``l_hat`` is the lower median over all residuals of all races.

    Raises:
        AuditError: If no contested race is given
    """
    contested = [r for r in records if r.contested]
    if not contested:
        raise AuditError("No contested races to estimate from")
    for delta in deltas:
        if not 0.0 < delta <= 1.0:
            raise AuditError(f"Delta must lie in (0, 1], got {delta}")
    spreads = [r.spread for r in contested]
    residuals = [d for r in contested for d in r.residuals]
    points = [(float(delta), _quantile(spreads, delta)) for delta in sorted(deltas)]
    return EpsilonDeltaCurve(points=points, l_hat=_quantile(residuals, 0.5), spreads=spreads)


@dataclass
class PairStats:
    """Head-to-head results of one participant pair (ids in sorted order)."""
    pair: Tuple[str, str]
    reaction_times: Tuple[SimTime, SimTime]
    races: int = 0
    wins: Dict[str, int] = field(default_factory=dict)
    sub_epsilon: bool = False
    chi2: Optional[float] = None
    p_value: Optional[float] = None

    @property
    def faster(self) -> Optional[str]:
        r_a, r_b = self.reaction_times
        if r_a == r_b:
            return None
        return self.pair[0] if r_a < r_b else self.pair[1]

    def win_rate(self, participant: str) -> float:
        if not self.races:
            return 0.0
        return self.wins.get(participant, 0) / self.races

    @property
    def faster_win_rate(self) -> Optional[float]:
        faster = self.faster
        return self.win_rate(faster) if faster is not None else None

    @property
    def sub_epsilon_faster_win_rate(self) -> Optional[float]:
        """Faster participant's win rate when the pair's |r_A - r_B| < epsilon."""
        return self.faster_win_rate if self.sub_epsilon else None


def victory_distribution(records: Iterable[RaceRecord], epsilon: SimTime) -> Dict[Tuple[str, str], PairStats]:
    """Per-pair win fractions, overall and for sub-epsilon pairs.

    Only races one of the pair won count toward that pair. Equal-r pairs get a
    chi-square uniformity test on their win counts.

    Raises:
        AuditError: If ``records`` is empty
    """
    records = list(records)
    if not records:
        raise AuditError("No races for victory statistics")
    pairs: Dict[Tuple[str, str], PairStats] = {}
    for rec in records:
        winner = rec.winner
        if winner is None:
            continue
        for a, b in itertools.combinations(sorted(rec.entries, key=lambda e: e.participant), 2):
            if winner not in (a.participant, b.participant):
                continue
            key = (a.participant, b.participant)
            pair = pairs.get(key)
            if pair is None:
                pair = pairs[key] = PairStats(
                    pair=key,
                    reaction_times=(a.reaction_time, b.reaction_time),
                    wins={a.participant: 0, b.participant: 0},
                    sub_epsilon=abs(a.reaction_time - b.reaction_time) < epsilon,
                )
            pair.races += 1
            pair.wins[winner] += 1

    for pair in pairs.values():
        if pair.faster is None and pair.races:
            result = stats.chisquare([pair.wins[pair.pair[0]], pair.wins[pair.pair[1]]])
            pair.chi2 = float(result.statistic)
            pair.p_value = float(result.pvalue)
    return dict(sorted(pairs.items()))
