"""CSV/JSON artifact writers. Files are written to a temp name, then renamed."""

from __future__ import annotations

import csv
import io
import json
import os
import sys
import tempfile


def fmt(value):
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def check_writable(path: str | None) -> None:
    """Raise OSError early if ``path`` cannot be created."""
    if path is None or path == "-":
        return
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise OSError(f"output directory does not exist: {parent}")
    if not os.access(parent, os.W_OK):
        raise OSError(f"output directory is not writable: {parent}")
    if os.path.isdir(path):
        raise OSError(f"output path is a directory: {path}")


def write_text(path: str | None, text: str) -> None:
    """Write ``text`` to ``path`` atomically, or to stdout when path is None or '-'."""
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    parent = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=parent, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header, rows) -> None:
    write_text(path, csv_text(header, rows))


def write_json(path, obj) -> None:
    write_text(path, json_text(obj))
