"""Deterministic, atomic output files."""
from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np


def format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    x = float(x) + 0.0  # drops the sign of -0.0
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def atomic_write(path, data: str) -> None:
    """Write ``data`` to a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(data)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header: Sequence[str], columns: Sequence[Iterable]) -> None:
    cols = [list(c) for c in columns]
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(format_value(v) for v in row))
    atomic_write(path, "\n".join(lines) + "\n")


def write_report(path, items: Mapping[str, object], title: str) -> None:
    """Flat ``key: value`` text block."""
    lines = [f"# {title}"]
    for key, val in items.items():
        if isinstance(val, (bool, np.bool_)):
            text = "true" if val else "false"
        elif val is None:
            text = "none"
        elif isinstance(val, (float, np.floating)):
            text = format_value(val)
        else:
            text = str(val)
        lines.append(f"{key}: {text}")
    atomic_write(path, "\n".join(lines) + "\n")


def write_json(path, payload) -> None:
    atomic_write(path, json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(x):
    if hasattr(x, "item"):
        return x.item()
    raise TypeError(f"cannot serialize {type(x).__name__}")
