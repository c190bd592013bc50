"""Deterministic CSV and JSON report writers."""

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

from src.config.logging import get_logger

logger = get_logger(__name__)


def _plain(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item"):  # numpy scalars
        return value.item()
    return value


def to_json(data: Any) -> str:
    return json.dumps(_plain(data), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def to_csv(rows: Iterable[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> str:
    rows = [_plain(r) for r in rows]
    if columns is None:
        columns = sorted({k for r in rows for k in r})
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row.get(k)) for k in columns})
    return buffer.getvalue()


def _cell(value: Any) -> Any:
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return "" if value is None else value


def write_text(text: str, out: Optional[Union[str, Path]]) -> Optional[Path]:
    """Write to out, or return None so the caller prints to stdout."""
    if out is None:
        return None
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("report_written", path=str(path), bytes=len(text.encode("utf-8")))
    return path


def render_report(data: Any, fmt: str, rows: Optional[List[Dict[str, Any]]] = None) -> str:
    """JSON of the full report, or CSV of its tabular part."""
    if fmt == "json":
        return to_json(data)
    if fmt == "csv":
        return to_csv(rows if rows is not None else [data])
    raise ValueError(f"Unsupported report format {fmt!r}")
