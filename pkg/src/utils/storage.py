"""
Storage Utilities
=================

CSV and manifest writers for run artifacts, and the path CSV reader.

Path files start with one comment line ``# n=<n>, delta=<delta>,
epsilon=<eps>, seed=<seed>`` followed by a ``t,x1,...,xd`` header and one row
per grid time. Floats are written with ``%.17g`` so values round-trip exactly.
"""

import csv
import logging
import re
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import yaml

from ..core.exceptions import ValidationError
from ..simulation.simulator import PathGrid

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
_HEADER = re.compile(r"^#\s*n=(\S+),\s*delta=(\S+),\s*epsilon=(\S+),\s*seed=(\S+)\s*$")


def ensure_dir(path: Union[str, Path]) -> Path:
    """
    Ensure a directory exists, creating it if necessary.

    Args:
        path: Directory path

    Returns:
        Path object
    """
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _format(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    return str(value)


def write_rows(output_path: Union[str, Path], columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> str:
    """Write dict rows under a fixed header."""
    output_path = Path(output_path)
    ensure_dir(output_path.parent)
    with open(output_path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(row[c]) for c in columns])
    logger.debug(f"Wrote {output_path}")
    return str(output_path)


# =============================================================================
# Path Files
# =============================================================================


def write_path_csv(path: PathGrid, output_path: Union[str, Path]) -> str:
    """Write a PathGrid with its metadata header."""
    output_path = Path(output_path)
    ensure_dir(output_path.parent)
    seed = "none" if path.seed is None else str(path.seed)
    columns = ["t"] + [f"x{i + 1}" for i in range(path.d)]
    with open(output_path, "w", newline="") as f:
        f.write(f"# n={path.n}, delta={FLOAT_FORMAT % path.delta}, epsilon={FLOAT_FORMAT % path.epsilon}, seed={seed}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for t, row in zip(path.times, path.values):
            writer.writerow([FLOAT_FORMAT % t] + [FLOAT_FORMAT % v for v in row])
    logger.info(f"Path saved to {output_path} ({path.values.shape[0]} rows)")
    return str(output_path)


def read_path_csv(input_path: Union[str, Path]) -> PathGrid:
    """
    Read a path file written by ``write_path_csv``.

    Raises:
        ValidationError: On a missing or malformed header, a non-numeric cell
            (naming the row) or a grid-length mismatch
    """
    input_path = Path(input_path)
    if not input_path.exists():
        raise ValidationError(f"Path file not found: {input_path}", field="path_csv")

    with open(input_path, "r", newline="") as f:
        lines = f.read().splitlines()
    if not lines:
        raise ValidationError(f"Empty path file: {input_path}", field="path_csv")

    match = _HEADER.match(lines[0])
    if match is None:
        raise ValidationError(
            "First line must be '# n=<n>, delta=<delta>, epsilon=<eps>, seed=<seed>'",
            field="header",
            value=lines[0],
        )
    try:
        n = int(match.group(1))
        delta = float(match.group(2))
        epsilon = float(match.group(3))
        seed = None if match.group(4) == "none" else int(match.group(4))
    except ValueError:
        raise ValidationError("Malformed metadata header", field="header", value=lines[0])

    rows: List[List[float]] = []
    for line_number, row in enumerate(csv.reader(lines[2:]), start=3):
        if not row:
            continue
        try:
            rows.append([float(cell) for cell in row[1:]])
        except ValueError:
            raise ValidationError(
                f"Non-numeric cell in row {line_number} of {input_path}",
                field=f"row {line_number}",
                value=",".join(row),
            )
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValidationError(f"Rows of {input_path} have inconsistent widths", field="path_csv")

    return PathGrid(n=n, delta=delta, epsilon=epsilon, values=np.array(rows), seed=seed)


# =============================================================================
# Experiment Artifacts
# =============================================================================


def write_qq_csv(output_path: Union[str, Path], kind: str, pairs: np.ndarray) -> str:
    """Q-Q pairs as rows ``kind, theoretical, sample``."""
    rows = ({"kind": kind, "theoretical": float(a), "sample": float(b)} for a, b in pairs)
    return write_rows(output_path, ["kind", "theoretical", "sample"], rows)


def save_manifest(manifest: Dict[str, Any], output_path: Union[str, Path]) -> str:
    """
    Save the run manifest as YAML.

    No timestamp is recorded so reruns with equal inputs produce equal files.
    """
    output_path = Path(output_path)
    ensure_dir(output_path.parent)
    with open(output_path, "w") as f:
        yaml.safe_dump(manifest, f, default_flow_style=False, sort_keys=True)
    logger.debug(f"Manifest saved to {output_path}")
    return str(output_path)


def load_manifest(path: Union[str, Path]) -> Optional[Dict[str, Any]]:
    path = Path(path)
    if not path.exists():
        return None
    with open(path, "r") as f:
        return yaml.safe_load(f)
