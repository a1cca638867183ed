"""CSV and JSON output with exact float round-tripping and atomic file writes."""

from __future__ import annotations

import csv
import io
import json
import os
import re
import tempfile
from pathlib import Path
from typing import Any, Iterable, Sequence

__all__ = ["format_csv", "parse_csv", "read_csv", "write_text_atomic", "format_json"]

_INT = re.compile(r"^[+-]?\d+$")


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)  # shortest string that parses back to the same double
    return str(v)


def _value(tok: str):
    if tok == "":
        return None
    if _INT.match(tok):
        return int(tok)
    try:
        return float(tok)
    except ValueError:
        return tok


def format_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def parse_csv(text: str) -> tuple[list[str], list[tuple]]:
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    return columns, [tuple(_value(t) for t in row) for row in reader]


def read_csv(path: str | Path) -> tuple[list[str], list[tuple]]:
    return parse_csv(Path(path).read_text(encoding="utf-8"))


def format_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_text_atomic(path: str | Path, text: str) -> None:
    """Write UTF-8 text with LF endings; the target appears only when complete."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
