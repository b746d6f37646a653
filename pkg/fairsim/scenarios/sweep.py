"""Parameter sweeps across values and seeds."""

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional, Sequence, Tuple, Union, get_args, get_origin

from pydantic import BaseModel

from fairsim.auditor.report import FairnessReport
from fairsim.scenarios.config import ScenarioConfig, parse_scenario
from fairsim.scenarios.errors import SweepError
from fairsim.scenarios.runner import run_scenario


logger = logging.getLogger(__name__)

Number = Union[int, float]


def _unwrap(annotation: Any) -> Any:
    """``X`` for ``Optional[X]`` and for constrained ``Annotated[X, ...]``."""
    if get_origin(annotation) is Annotated:
        return _unwrap(get_args(annotation)[0])
    args = [a for a in get_args(annotation) if a is not type(None)]
    if get_origin(annotation) is Union and len(args) == 1:
        return args[0]
    return annotation


def _is_numeric(annotation: Any) -> bool:
    annotation = _unwrap(annotation)
    return annotation in (int, float)


def _list_index(items: List[Any], part: str, path: str) -> int:
    if part.isdigit():
        index = int(part)
        if index >= len(items):
            raise SweepError(f"Index {index} out of range in '{path}'")
        return index
    for i, item in enumerate(items):
        if isinstance(item, dict) and item.get("id") == part:
            return i
    raise SweepError(f"No element with id '{part}' in '{path}'")


def _locate(data: Dict[str, Any], path: str) -> Tuple[Dict[str, Any], str, Any]:
    """Container, key and annotation of the numeric field at dotted ``path``."""
    parts = path.split(".")
    node: Any = data
    annotation: Any = ScenarioConfig
    for i, part in enumerate(parts):
        last = i == len(parts) - 1
        if isinstance(node, list):
            if last:
                raise SweepError(f"'{path}' addresses a list element, not a numeric field")
            node = node[_list_index(node, part, path)]
            annotation = _unwrap(get_args(annotation)[0])
            continue
        if not isinstance(node, dict):
            raise SweepError(f"'{path}' descends into a scalar at '{part}'")
        if isinstance(annotation, type) and issubclass(annotation, BaseModel):
            field_info = annotation.model_fields.get(part)
            if field_info is None:
                raise SweepError(f"Unknown field '{part}' in '{path}'")
            child = field_info.annotation
        elif get_origin(annotation) is dict:
            child = get_args(annotation)[1]
        else:
            raise SweepError(f"Cannot address '{part}' in '{path}'")

        if last:
            if not _is_numeric(child) or isinstance(node.get(part), bool):
                raise SweepError(f"'{path}' is not a numeric field")
            return node, part, _unwrap(child)
        if node.get(part) is None:
            raise SweepError(f"'{path}' passes through unset field '{part}'")
        node = node[part]
        annotation = _unwrap(child)
    raise SweepError(f"Empty parameter path '{path}'")


def check_parameter(config: ScenarioConfig, path: str) -> None:
    """Raise SweepError unless ``path`` addresses a numeric field of ``config``."""
    _locate(config.resolved(), path)


def set_parameter(config: ScenarioConfig, path: str, value: Number) -> ScenarioConfig:
    """Copy of ``config`` with the numeric field at dotted ``path`` set to ``value``.

    List elements are addressed by index or by ``id`` (``participants.fast.reaction_time_ns``).

    Raises:
        SweepError: If the path does not address a numeric field
        ScenarioValidationError: If the new value violates the schema
    """
    data = config.resolved()
    node, key, annotation = _locate(data, path)
    if annotation is int and float(value).is_integer():
        value = int(value)
    node[key] = value
    return parse_scenario(data, f"{config.name}[{path}={value}]")


@dataclass
class SweepPoint:
    value: Number
    seed: int
    report: FairnessReport


@dataclass
class SweepTable:
    parameter: str
    points: List[SweepPoint] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def header(self) -> List[str]:
        deltas = sorted({p.delta for point in self.points for p in point.report.epsilon_of_delta})
        pairs = sorted({tuple(s.pair) for point in self.points for s in point.report.victory_stats})
        return (
            [self.parameter, "seed", "races", "l_hat_ns"]
            + [f"epsilon_{d:g}_ns" for d in deltas]
            + ["max_spread_ns", "req1_max_spread_ns", "req2_violations", "req3_violations"]
            + [f"{a}_vs_{b}_{a}_win_rate" for a, b in pairs]
            + ["config_hash"]
        )

    def rows(self) -> List[List[Any]]:
        deltas = sorted({p.delta for point in self.points for p in point.report.epsilon_of_delta})
        pairs = sorted({tuple(s.pair) for point in self.points for s in point.report.victory_stats})
        rows = []
        for point in self.points:
            report = point.report
            row: List[Any] = [point.value, point.seed, report.races, report.l_hat]
            row += [report.epsilon(d) for d in deltas]
            row += [report.max_spread, report.req1_max_spread, report.req2_violations, report.req3_violations]
            for a, b in pairs:
                summary = report.pair(a, b)
                row.append(summary.win_rate(a) if summary else None)
            row.append(report.config_hash)
            rows.append(row)
        return rows

    def write_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(self.header())
            writer.writerows(["" if v is None else v for v in row] for row in self.rows())
        return path


def _run_point(job: Tuple[Dict[str, Any], int, Optional[int]]) -> FairnessReport:
    data, seed, races = job
    config = ScenarioConfig.model_validate(data)
    return run_scenario(config, seed, races, record_trace=False).report


def sweep(
    config: ScenarioConfig,
    path: str,
    values: Sequence[Number],
    seeds: Sequence[int],
    races: Optional[int] = None,
    workers: int = 1,
) -> SweepTable:
    """Run the cross product of ``values`` and ``seeds``.

    Every variant is validated before any run starts. With ``workers > 1`` runs
    execute in separate processes; rows keep (value, seed) order either way.

    Raises:
        SweepError: If ``path`` is not a numeric field
    """
    table = SweepTable(parameter=path)
    check_parameter(config, path)
    if not values:
        return table

    variants = [(value, set_parameter(config, path, value)) for value in values]
    jobs = [(variant.resolved(), seed, races) for _, variant in variants for seed in seeds]
    keys = [(value, seed) for value, _ in variants for seed in seeds]
    logger.info(f"Sweeping {path} over {len(values)} values x {len(seeds)} seeds ({len(jobs)} runs)")

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_point, jobs))
    else:
        reports = [_run_point(job) for job in jobs]

    for (value, seed), report in zip(keys, reports):
        table.points.append(SweepPoint(value, seed, report))
    return table
