"""CSV, config and run-manifest serialization.

Numbers are written with 9 significant digits, ``.`` as decimal separator,
``\\n`` line endings and UTF-8, with a mandatory header row.
"""

import csv
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .curves import RankedDataset
from .errors import DomainError
from .profit import CostBenefitMatrix

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

CB_COLUMNS = ("cb00", "cb01", "cb10", "cb11")


class ValidationError(DomainError):
    """Malformed user input; ``row`` is the 1-based data row, when known."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v) or math.isinf(v):
            return repr(v)
        return f"{v + 0.0:.9g}"
    return str(v)


def write_csv(path, header, rows):
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return path


def read_csv(path):
    """Header plus rows (as lists of strings) of a CSV file."""
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValidationError(f"{path}: file is empty") from None
        rows = [r for r in reader if r]
    return header, rows


def _parse_binary(raw, column, row):
    try:
        value = float(raw)
    except ValueError:
        raise ValidationError(f"row {row}: column {column!r} is not a number: {raw!r}", row, column) from None
    if value not in (0.0, 1.0):
        raise ValidationError(f"row {row}: column {column!r} must be 0 or 1, got {raw!r}", row, column)
    return int(value)


def _parse_float(raw, column, row):
    try:
        value = float(raw)
    except ValueError:
        raise ValidationError(f"row {row}: column {column!r} is not a number: {raw!r}", row, column) from None
    if not math.isfinite(value):
        raise ValidationError(f"row {row}: column {column!r} must be finite", row, column)
    return value


def read_dataset(path, cb=None):
    """Load a scored dataset (columns ``y``, ``t``, ``score``, optional ``cb00..cb11``).

    ``cb`` (a :class:`CostBenefitMatrix`) overrides any per-row columns;
    without either, rows default to the unitary matrix.
    """
    header, rows = read_csv(path)
    for col in ("y", "t", "score"):
        if col not in header:
            raise ValidationError(f"{path}: missing required column {col!r}", column=col)
    present = [c for c in CB_COLUMNS if c in header]
    if present and len(present) != 4:
        missing = [c for c in CB_COLUMNS if c not in header]
        raise ValidationError(f"{path}: missing cost-benefit column {missing[0]!r}", column=missing[0])
    idx = {name: header.index(name) for name in header}
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    y, t, score, cbs = [], [], [], []
    for i, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise ValidationError(f"row {i}: expected {len(header)} fields, got {len(row)}", i)
        y.append(_parse_binary(row[idx["y"]], "y", i))
        t.append(_parse_binary(row[idx["t"]], "t", i))
        score.append(_parse_float(row[idx["score"]], "score", i))
        if present and cb is None:
            cbs.append([_parse_float(row[idx[c]], c, i) for c in CB_COLUMNS])
    if cb is None:
        cb = np.array(cbs) if present else CostBenefitMatrix.unitary()
    return RankedDataset.from_unsorted(np.array(y), np.array(t), np.array(score), cb)


def load_toml(path):
    with Path(path).open("rb") as fh:
        return tomllib.load(fh)


def load_config(path):
    """Config mapping from a TOML file, or the ``config`` section of a run manifest."""
    if path is None:
        return {}
    path = Path(path)
    if path.suffix == ".json":
        with path.open("r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if "config" not in doc:
            raise ValidationError(f"{path}: manifest has no 'config' section")
        return doc["config"]
    try:
        return load_toml(path)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def file_digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir, command, config, master_seed, outputs):
    """Record what produced ``outputs``; rerunning with this file reproduces them."""
    out_dir = Path(out_dir)
    manifest = {
        "command": command,
        "config": config,
        "master_seed": master_seed,
        "version": __version__,
        "kernel_backend": kernels.BACKEND,
        "outputs": {Path(p).name: file_digest(p) for p in outputs},
    }
    path = out_dir / "manifest.json"
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
