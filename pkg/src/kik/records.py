"""
Flat scenario records and their CSV / JSON serialization.

CSV output leaves out the wall clock so that the same config and seed give
byte-identical files.
"""
import csv
import io
import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Iterable, List, Optional

import numpy as np

from kik.errors import ConfigError

logger = logging.getLogger(__name__)

CSV = "csv"
JSON = "json"
FORMATS = (CSV, JSON)

CSV_COLUMNS = (
    "scenario", "point", "order", "g_label", "estimate", "ideal", "bias", "variance",
    "bound_adaptive", "bound_taylor", "bound_loose", "extra", "seed", "config_hash",
)


def _plain(value):
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def canonical_json(value) -> str:
    return json.dumps(_plain(value), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class ScenarioResult:
    scenario: str
    point: dict
    order: int
    g_label: str
    estimate: float
    ideal: float
    bias: float
    variance: float = 0.0
    bound_adaptive: Optional[float] = None
    bound_taylor: Optional[float] = None
    bound_loose: Optional[float] = None
    extra: dict = field(default_factory=dict)
    seed: Optional[int] = None
    config_hash: str = ""
    wall_clock: float = 0.0

    @property
    def key(self):
        return self.scenario, canonical_json(self.point), self.order, self.g_label

    def as_dict(self) -> dict:
        return _plain(asdict(self))


def sort_records(records: Iterable[ScenarioResult]) -> List[ScenarioResult]:
    return sorted(records, key=lambda r: r.key)


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    if isinstance(value, (dict, list, tuple)):
        return canonical_json(value)
    return str(value)


def to_csv(records: Iterable[ScenarioResult]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(CSV_COLUMNS)
    for record in sort_records(records):
        writer.writerow([_format_cell(getattr(record, column)) for column in CSV_COLUMNS])
    return buffer.getvalue()


def to_json(records: Iterable[ScenarioResult]) -> str:
    return json.dumps([r.as_dict() for r in sort_records(records)], sort_keys=True, indent=2) + "\n"


def read_csv(text: str) -> List[dict]:
    """Rows of a written CSV as dicts of strings, JSON columns decoded."""
    rows = list(csv.DictReader(io.StringIO(text)))
    for row in rows:
        row["point"] = json.loads(row["point"])
        row["extra"] = json.loads(row["extra"])
    return rows


def dumps(records: Iterable[ScenarioResult], fmt: str = CSV) -> str:
    if fmt == CSV:
        return to_csv(records)
    if fmt == JSON:
        return to_json(records)
    raise ConfigError("unknown output format {!r}, expected one of {}".format(fmt, FORMATS))


def write_results(records: Iterable[ScenarioResult], path: str, fmt: str = CSV, config=None) -> None:
    """Write records to ``path``; with ``config`` also ``<path>.config.json``."""
    records = list(records)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(dumps(records, fmt))
    if config is not None:
        with open(path + ".config.json", "w", encoding="utf-8") as f:
            json.dump({"config": config.as_dict(), "config_hash": config.hash}, f, sort_keys=True, indent=2)
            f.write("\n")
    logger.info("wrote %d records to %s", len(records), path)
