"""
Serialization of result records and audit reports. JSON output is one record per line for single commands and an
array of row records for sweep reports; CSV output has a header row and a fixed column order.
"""

import csv
import io
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from simplex_hoeffding.bounds import BoundResult
from simplex_hoeffding.oracles.audit import ROW_FIELDS, AuditReport
from simplex_hoeffding.oracles.monte_carlo import TailEstimate
from simplex_hoeffding.utils.utils import format_float, to_jsonable


def bound_record(result: Optional[BoundResult], inputs: dict, family: str, direction: str,
                 violation: Optional[str] = None) -> dict:
    """
    Record printed by the bound command. A violated precondition yields precondition_ok = false and null bound fields.
    """
    record = {"command": "bound", "family": family, "direction": direction, "inputs": inputs,
              "precondition_ok": violation is None, "bound": None, "log_bound": None, "exponent_terms": None,
              "kl": None, "divergence_infinite": None}
    if violation is not None:
        record["violation"] = violation
    if result is not None:
        record.update({"bound": result.bound, "log_bound": result.log_bound,
                       "exponent_terms": result.per_coordinate_exponent, "kl": result.kl,
                       "divergence_infinite": result.divergence_infinite})
    return record


def estimate_fields(estimate: TailEstimate) -> dict:
    return {"p_hat": estimate.p_hat, "ci_low": estimate.ci_low, "ci_high": estimate.ci_high,
            "trials": estimate.trials, "hits": estimate.hits, "seed": estimate.seed,
            "confidence": estimate.confidence, "model_id": estimate.model_id, "block_size": estimate.block_size}


def stamp(record: dict, timestamp: bool = True) -> dict:
    """Adds a UTC timestamp, the only field excluded from the determinism guarantee."""
    if timestamp:
        record["timestamp"] = datetime.now(timezone.utc).isoformat()
    return record


def dumps_record(record: dict) -> str:
    return json.dumps(to_jsonable(record))


def _csv_cell(value) -> str:
    value = to_jsonable(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, list):
        return ",".join(_csv_cell(item) for item in value)
    if isinstance(value, dict):
        return json.dumps(value)
    return str(value)


def row_cells(row: dict, fields: Sequence[str]) -> List[str]:
    """Flat text cells of a record, lists joined by commas."""
    return [_csv_cell(row.get(name)) for name in fields]


def rows_to_csv(rows: Iterable[dict], fields: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow(row_cells(row, fields))
    return buffer.getvalue()


def record_to_csv(record: dict) -> str:
    """Single record as a two line CSV, nested inputs flattened as 'inputs.<name>'."""
    flat = {}
    for key, value in record.items():
        if isinstance(value, dict):
            flat.update({f"{key}.{inner}": inner_value for inner, inner_value in value.items()})
        else:
            flat[key] = value
    return rows_to_csv([flat], list(flat))


def write_report(report: AuditReport, out_dir: Path, name: str, fmt: str = "both") -> List[Path]:
    """
    Writes `<name>.json` (array of row records) and / or `<name>.csv` into out_dir.

    Returns
    -------
    list of Path
        Written files.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = report.to_records()
    written = []
    if fmt in ("json", "both"):
        path = out_dir / f"{name}.json"
        path.write_text(json.dumps(to_jsonable(records), indent=1) + "\n", encoding="utf-8")
        written.append(path)
    if fmt in ("csv", "both"):
        path = out_dir / f"{name}.csv"
        path.write_text(rows_to_csv(records, ROW_FIELDS), encoding="utf-8")
        written.append(path)
    return written
