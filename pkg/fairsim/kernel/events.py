"""Events and execution traces of the simulation kernel."""

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Union

from fairsim.kernel.time import SimTime


@dataclass
class Event:
    """A scheduled simulation action.

    ``seq`` is assigned by the kernel at scheduling time; ``(fire_at, seq)`` is a
    strict total order over every event of a run.
    """
    fire_at: SimTime
    target: str
    action: str
    payload: Any = None
    seq: int = -1

    @property
    def event_id(self) -> int:
        return self.seq

    def sort_key(self) -> tuple:
        return (self.fire_at, self.seq)


@dataclass(frozen=True)
class TraceRecord:
    """One processed event as it appears in the exported trace."""
    time: SimTime
    seq: int
    component: str
    action: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "time": self.time,
            "seq": self.seq,
            "component": self.component,
            "action": self.action,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


@dataclass
class EventTrace:
    """Ordered list of processed events."""
    records: List[TraceRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[TraceRecord]:
        return iter(self.records)

    def append(self, record: TraceRecord) -> None:
        self.records.append(record)

    def extend(self, other: "EventTrace") -> None:
        self.records.extend(other.records)

    def to_ndjson(self) -> str:
        """Newline-delimited JSON, one record per line."""
        return "".join(record.to_json() + "\n" for record in self.records)

    def write(self, path: Union[str, Path]) -> Path:
        """Write the trace as ``trace.ndjson``-style text."""
        path = Path(path)
        path.write_text(self.to_ndjson(), encoding="utf-8")
        return path

    def digest(self) -> str:
        """sha256 over the ndjson rendering."""
        hasher = hashlib.sha256()
        for record in self.records:
            hasher.update(record.to_json().encode("utf-8"))
            hasher.update(b"\n")
        return hasher.hexdigest()

    def is_ordered(self) -> bool:
        """True if records are in strictly increasing ``(time, seq)`` order."""
        previous: Optional[tuple] = None
        for record in self.records:
            key = (record.time, record.seq)
            if previous is not None and key <= previous:
                return False
            previous = key
        return True
