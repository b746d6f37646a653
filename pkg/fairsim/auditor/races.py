"""Race records and the tracker that assembles them during a run."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from fairsim.kernel.time import SimTime


logger = logging.getLogger(__name__)

RACES_CSV_HEADER = ("stimulus_id", "participant", "r_ns", "t_e_ns", "t_arrival_ns", "won")


class AuditError(Exception):
    """Base exception for auditor operations called on unusable input."""
    pass


@dataclass(frozen=True)
class RaceEntry:
    """One participant's first engine arrival in a race.

    ``t_arrival`` is the engine's priority timestamp for the message.
    """
    participant: str
    reaction_time: SimTime
    t_arrival: SimTime
    won: bool = False
    t_send: Optional[SimTime] = None
    colocated: bool = True
    min_delay: SimTime = 0


@dataclass
class RaceRecord:
    stimulus_id: int
    t_e: SimTime
    entries: List[RaceEntry] = field(default_factory=list)
    engine: str = ""
    straddles_window: bool = False

    def residual(self, entry: RaceEntry) -> SimTime:
        """d_P = t_arrival - t_e - r_P."""
        return entry.t_arrival - self.t_e - entry.reaction_time

    @property
    def residuals(self) -> List[SimTime]:
        return [self.residual(e) for e in self.entries]

    @property
    def spread(self) -> SimTime:
        """Max pairwise residual difference."""
        residuals = self.residuals
        if len(residuals) < 2:
            return 0
        return max(residuals) - min(residuals)

    @property
    def contested(self) -> bool:
        return len(self.entries) >= 2

    @property
    def winner(self) -> Optional[str]:
        for entry in self.entries:
            if entry.won:
                return entry.participant
        return None

    def entry(self, participant: str) -> Optional[RaceEntry]:
        for e in self.entries:
            if e.participant == participant:
                return e
        return None

    def pre_positioned(self, entry: RaceEntry) -> bool:
        """Whether the entry's timestamp predates its earliest honest send."""
        return entry.t_arrival < self.t_e + entry.reaction_time + entry.min_delay

    def to_rows(self) -> List[Tuple[int, str, int, int, int, int]]:
        return [
            (self.stimulus_id, e.participant, e.reaction_time, self.t_e, e.t_arrival, int(e.won))
            for e in self.entries
        ]


@dataclass
class _OpenRace:
    t_e: SimTime
    engine: str
    entries: Dict[str, RaceEntry] = field(default_factory=dict)
    winners: List[str] = field(default_factory=list)


class RaceTracker:
    """Collects per-stimulus arrivals and winners as the engine reports them."""

    def __init__(self) -> None:
        self._races: Dict[int, _OpenRace] = {}
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def __len__(self) -> int:
        return len(self._races)

    def open(self, stimulus_id: int, t_e: SimTime, engine: str) -> None:
        if stimulus_id in self._races:
            raise AuditError(f"Race {stimulus_id} opened twice")
        self._races[stimulus_id] = _OpenRace(t_e, engine)

    def engine_of(self, stimulus_id: int) -> Optional[str]:
        race = self._races.get(stimulus_id)
        return race.engine if race else None

    def arrival(
        self,
        stimulus_id: int,
        participant: str,
        reaction_time: SimTime,
        t_arrival: SimTime,
        t_send: Optional[SimTime] = None,
        colocated: bool = True,
        min_delay: SimTime = 0,
    ) -> bool:
        """Record a participant's arrival; later arrivals of the same participant are ignored."""
        race = self._races.get(stimulus_id)
        if race is None or participant in race.entries:
            return False
        race.entries[participant] = RaceEntry(
            participant, reaction_time, t_arrival, False, t_send, colocated, min_delay
        )
        return True

    def win(self, stimulus_id: int, participant: str) -> None:
        race = self._races.get(stimulus_id)
        if race is None:
            return
        if race.winners:
            self.logger.debug(f"Race {stimulus_id} already won by {race.winners[0]}; ignoring {participant}")
            return
        race.winners.append(participant)

    def records(self) -> List[RaceRecord]:
        """All races in stimulus order, contested or not, entries in arrival order."""
        records = []
        for stimulus_id in sorted(self._races):
            race = self._races[stimulus_id]
            winner = race.winners[0] if race.winners else None
            entries = sorted(
                (
                    RaceEntry(
                        e.participant, e.reaction_time, e.t_arrival, e.participant == winner,
                        e.t_send, e.colocated, e.min_delay,
                    )
                    for e in race.entries.values()
                ),
                key=lambda e: (e.t_arrival, e.participant),
            )
            records.append(RaceRecord(stimulus_id, race.t_e, entries, race.engine))
        return records
