"""Fringe CSV ingestion, curve CSV/JSON emission and run manifests."""
from __future__ import annotations

import csv
import json
import math
import platform
from pathlib import Path

import numpy as np

from ..analysis.fitting import MIN_ROWS, FringeData
from ..core import DomainError

FRINGE_COLUMNS = ("x_m", "count", "sigma")


def _data_lines(handle):
    """(line number, text) for non-blank, non-comment lines."""
    for n, line in enumerate(handle, 1):
        s = line.strip()
        if s and not s.startswith("#"):
            yield n, line


def load_fringe_csv(path) -> FringeData:
    """Read ``x_m,count,sigma`` rows. Errors cite the data row and file line."""
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise DomainError(f"cannot read fringe data: {exc}") from None
    with handle:
        lines = list(_data_lines(handle))
    if not lines:
        raise DomainError(f"{path}: no header line")
    header = [c.strip() for c in next(csv.reader([lines[0][1]]))]
    missing = [c for c in FRINGE_COLUMNS if c not in header]
    if missing:
        raise DomainError(f"{path}: missing column(s) {', '.join(missing)}; header must name x_m,count,sigma")
    idx = [header.index(c) for c in FRINGE_COLUMNS]
    values = []
    for row_no, (line_no, text) in enumerate(lines[1:], 1):
        cells = next(csv.reader([text]))
        where = f"{path}: row {row_no} (line {line_no})"
        if len(cells) != len(header):
            raise DomainError(f"{where}: expected {len(header)} fields, got {len(cells)}")
        try:
            x, count, sigma = (float(cells[i]) for i in idx)
        except ValueError:
            raise DomainError(f"{where}: non-numeric value in {cells!r}") from None
        if not all(math.isfinite(v) for v in (x, count, sigma)):
            raise DomainError(f"{where}: values must be finite")
        if not sigma > 0:
            raise DomainError(f"{where}: sigma must be > 0, got {sigma!r}")
        if count < 0:
            raise DomainError(f"{where}: count must be >= 0, got {count!r}")
        values.append((x, count, sigma))
    if len(values) < MIN_ROWS:
        raise DomainError(f"{path}: need at least {MIN_ROWS} data rows, got {len(values)}")
    arr = np.array(values)
    return FringeData(arr[:, 0], arr[:, 1], arr[:, 2], source=str(path))


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_curve_csv(path, columns, rows, comments=()) -> Path:
    """One curve per file. Column names carry their units (``r_C_m``, ``lambda_per_s``)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"row has {len(row)} fields, header has {len(columns)}")
            w.writerow([_cell(v) for v in row])
    return path


def write_fringe_csv(path, data: FringeData, comments=()) -> Path:
    return write_curve_csv(path, FRINGE_COLUMNS, data.rows, comments)


def jsonable(v):
    """Plain JSON types; non-finite floats become the strings ``inf``, ``-inf``, ``nan``."""
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return jsonable(v.tolist())
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else repr(f)
    if isinstance(v, complex):
        return [jsonable(v.real), jsonable(v.imag)]
    if v is None or isinstance(v, str):
        return v
    return str(v)


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_curve_json(path, columns, rows, comments=()) -> Path:
    return write_json(path, {"comments": list(comments), "columns": list(columns),
                             "rows": [list(r) for r in rows]})


def versions() -> dict:
    import scipy

    from .. import __version__

    return {"collapse_scope": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def manifest(command, cfg, *, seed=None, rng=None, outputs=(), wall_time=None, extra=None) -> dict:
    """Run manifest. ``wall_time_s`` is the only field that varies between identical runs."""
    from .config import describe

    out = {
        "command": command,
        "config_path": cfg.path,
        "config_sha256": cfg.sha256,
        "inputs": describe(cfg),
        "seed": seed,
        "rng": rng,
        "versions": versions(),
        "outputs": list(outputs),
        "wall_time_s": wall_time,
    }
    if extra:
        out.update(extra)
    return out
