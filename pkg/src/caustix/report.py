"""CSV and JSON export with atomic file writes.

Every CSV starts with ``#`` comment lines echoing the tool version and all
run parameters, so a file can be regenerated from its own header.  Floats
are written with 17 significant digits, which round-trips exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from . import __version__


def fmt_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.17g" % v
    return str(v)


def header_lines(params: Mapping) -> list:
    lines = [f"# caustix {__version__}"]
    for key in sorted(params):
        lines.append(f"# {key}={fmt_value(params[key])}")
    return lines


def csv_text(columns: Sequence[str], rows: Iterable[Sequence], params: Mapping) -> str:
    buf = io.StringIO()
    for line in header_lines(params):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt_value(v) for v in row])
    return buf.getvalue()


def read_csv(path: Union[str, Path]) -> tuple:
    """Parse a file written by :func:`csv_text` into ``(params, columns, rows)``."""
    params, data = {}, []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("# ") and "=" in line:
                k, v = line[2:].rstrip("\n").split("=", 1)
                params[k] = v
            elif not line.startswith("#"):
                data.append(line)
    reader = csv.reader(data)
    columns = next(reader)
    rows = [[float(v) for v in row] for row in reader]
    return params, columns, rows


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        # JSON has no infinities; keep them readable rather than invalid
        return v if math.isfinite(v) else fmt_value(v)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def atomic_write(path: Union[str, Path], data: Union[str, bytes]) -> Path:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = data.encode("utf-8") if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        mask = os.umask(0)
        os.umask(mask)
        # mkstemp creates files as 0600; give them the usual permissions
        os.chmod(tmp, 0o666 & ~mask)
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
