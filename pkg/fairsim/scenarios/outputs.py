"""Result files written for a run and read back by ``fairsim report``."""

import csv
import json
import logging
from pathlib import Path
from typing import Dict, List, Union

from fairsim.auditor.metrics import estimate_epsilon_delta
from fairsim.auditor.races import RACES_CSV_HEADER
from fairsim.auditor.report import FairnessReport
from fairsim.scenarios.runner import ScenarioResult


logger = logging.getLogger(__name__)

RACES_FILE = "races.csv"
TRADES_FILE = "trades.csv"
REPORT_FILE = "fairness.json"
RESOLVED_CONFIG_FILE = "resolved_config.json"
TRACE_FILE = "trace.ndjson"
ECDF_FILE = "ecdf.csv"

TRADES_CSV_HEADER = ("time_ns", "taker_id", "maker_id", "price_ticks", "qty")


def write_outputs(
    result: ScenarioResult,
    out_dir: Union[str, Path],
    export_trace: bool = False,
    plot_data: bool = False,
) -> Dict[str, Path]:
    """Write every output file of ``result`` into ``out_dir``.

    Returns:
        Mapping of file kind to written path
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: Dict[str, Path] = {}

    races_path = out / RACES_FILE
    with open(races_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(RACES_CSV_HEADER)
        for record in result.races:
            writer.writerows(record.to_rows())
    written["races"] = races_path

    trades_path = out / TRADES_FILE
    with open(trades_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRADES_CSV_HEADER)
        for _engine, trade in result.trades:
            writer.writerow(trade.to_row())
    written["trades"] = trades_path

    written["report"] = result.report.write(out / REPORT_FILE)

    config_path = out / RESOLVED_CONFIG_FILE
    config_path.write_text(
        json.dumps(result.config.resolved(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    written["resolved_config"] = config_path

    if export_trace:
        written["trace"] = result.trace.write(out / TRACE_FILE)

    if plot_data:
        ecdf_path = out / ECDF_FILE
        contested = [r for r in result.races if r.contested]
        with open(ecdf_path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(("spread_ns", "fraction"))
            if contested:
                for point in estimate_epsilon_delta(contested).ecdf():
                    writer.writerow((point.spread, repr(point.fraction)))
        written["ecdf"] = ecdf_path

    logger.info(f"Wrote {len(written)} files to {out}")
    return written


def read_races(out_dir: Union[str, Path]) -> List[Dict[str, str]]:
    with open(Path(out_dir) / RACES_FILE, "r", newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def read_report(out_dir: Union[str, Path]) -> FairnessReport:
    return FairnessReport.load(Path(out_dir) / REPORT_FILE)
