"""Deterministic, atomically written output files."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

SCHEMA_VERSION = 1


def atomic_write_bytes(path, data: bytes) -> None:
    """Write to a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (int,)):
        return str(x)
    try:
        return repr(float(x))
    except (TypeError, ValueError):
        return str(x)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Comma-separated, header row, ``.`` decimal, shortest round-trip floats."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    atomic_write_text(path, csv_text(header, rows))


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def json_text(payload: dict) -> str:
    body = {"schema_version": SCHEMA_VERSION, **payload}
    return json.dumps(body, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_json(path, payload: dict) -> None:
    atomic_write_text(path, json_text(payload))


def gnuplot_script(csv_path, xcol: int, ycols: Sequence[int], title: str) -> str:
    """Gnuplot commands plotting columns of ``csv_path`` (1-based indices)."""
    name = Path(csv_path).name
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title '{title}'",
        "plot " + ", \\\n     ".join(f"'{name}' using {xcol}:{c} with lines" for c in ycols),
        "",
    ]
    return "\n".join(lines)


def write_plot_script(csv_path, xcol: int, ycols: Sequence[int], title: str) -> Path:
    out = Path(csv_path).with_suffix(".gp")
    atomic_write_text(out, gnuplot_script(csv_path, xcol, ycols, title))
    return out
