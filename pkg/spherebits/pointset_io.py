"""
File formats.

PointSet CSV: first line `d,N`, then N rows of d+1 comma-separated floats
written with 17 significant digits. PointSet JSON: {"d", "N", "meta",
"points"}. Reports and bounds are pydantic models dumped as JSON; tables
(traces, verification and scaling rows) go through pandas.
"""

import csv
import json
import logging
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError

from .errors import DataFileError, SphereBitsError
from .models import PointSetMeta
from .onebit import PointSet, sign_matrix
from .sphere_core import NORM_TOLERANCE

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
FLOAT_FORMAT = '%.17g'


# ==================== Writing ====================

def write_text(path: PathLike, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise DataFileError(f"cannot write file: {e.strerror or e}", path=str(path))
    logger.debug(f"Wrote {len(text)} bytes to {path}")


def pointset_to_csv(Z: PointSet) -> str:
    lines = [f"{Z.d},{Z.N}"]
    lines.extend(",".join(FLOAT_FORMAT % v for v in row) for row in Z.points)
    return "\n".join(lines) + "\n"


def pointset_to_json(Z: PointSet) -> str:
    payload = {
        "d": Z.d,
        "N": Z.N,
        "meta": Z.meta.model_dump(mode="json"),
        "points": Z.points.tolist(),
    }
    return json.dumps(payload, indent=2) + "\n"


def write_pointset(Z: PointSet, path: PathLike, fmt: str = "csv") -> None:
    text = pointset_to_json(Z) if fmt == "json" else pointset_to_csv(Z)
    write_text(path, text)


def write_bits_csv(Z: PointSet, X: np.ndarray, path: PathLike) -> None:
    """One row of +1/-1 signs phi_Z(x) per row of X"""
    bits = sign_matrix(Z, X)
    write_text(path, "\n".join(",".join(str(int(b)) for b in row) for row in bits) + "\n")


def write_report(report: BaseModel, path: PathLike) -> None:
    write_text(path, report.model_dump_json(indent=2) + "\n")


def rows_frame(rows: Sequence[BaseModel], columns: List[str]) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in rows], columns=columns)


def frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT)


def write_frame(frame: pd.DataFrame, path: PathLike) -> None:
    write_text(path, frame_to_csv(frame))


# ==================== Reading ====================

def _parse_csv(text: str, path: str) -> PointSet:
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise DataFileError("empty file, expected header 'd,N'", path=path, line=1)
    try:
        d, N = (int(v) for v in rows[0])
    except ValueError:
        raise DataFileError(f"header must be 'd,N', got {','.join(rows[0])!r}", path=path, line=1)
    if d < 1 or N < 1:
        raise DataFileError(f"header needs d >= 1 and N >= 1, got d={d}, N={N}", path=path, line=1)

    body = [(k + 2, row) for k, row in enumerate(rows[1:]) if any(c.strip() for c in row)]
    if len(body) != N:
        line = body[N][0] if len(body) > N else len(rows) + 1
        raise DataFileError(f"header announces {N} points, found {len(body)}", path=path, line=line)

    points = np.empty((N, d + 1))
    for k, (line, row) in enumerate(body):
        if len(row) != d + 1:
            raise DataFileError(f"expected {d + 1} coordinates, got {len(row)}", path=path, line=line)
        try:
            points[k] = [float(c) for c in row]
        except ValueError:
            raise DataFileError(f"non-numeric coordinate in {row!r}", path=path, line=line)
        norm = float(np.linalg.norm(points[k]))
        if not np.isfinite(norm) or abs(norm - 1.0) > NORM_TOLERANCE:
            raise DataFileError(f"point norm {norm:.12g} is not 1 within {NORM_TOLERANCE}",
                                path=path, line=line)
    return PointSet(points=points)


def _parse_json(text: str, path: str) -> PointSet:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DataFileError(f"invalid JSON: {e.msg}", path=path, line=e.lineno)
    try:
        points = np.asarray(data["points"], dtype=float)
        meta = PointSetMeta.model_validate(data.get("meta") or {})
        N = int(data.get("N", len(points)))
        d = int(data["d"]) if "d" in data else None
    except (KeyError, TypeError, ValueError, ValidationError) as e:
        raise DataFileError(f"malformed point set JSON: {e}", path=path)
    if points.ndim != 2 or points.shape[0] != N:
        raise DataFileError("points array does not match the declared N", path=path)
    if d is not None and points.shape[1] != d + 1:
        raise DataFileError(f"declared d={d} needs {d + 1} coordinates per point, got {points.shape[1]}",
                            path=path)
    try:
        return PointSet(points=points, meta=meta)
    except SphereBitsError as e:
        raise DataFileError(e.detail, path=path)


def read_pointset(path: PathLike) -> PointSet:
    """Load a PointSet from CSV or JSON (chosen by extension, or by a leading '{')"""
    path = str(path)
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise DataFileError(f"cannot read file: {e.strerror or e}", path=path)
    if path.endswith(".json") or text.lstrip().startswith("{"):
        Z = _parse_json(text, path)
    else:
        Z = _parse_csv(text, path)
    logger.info(f"Loaded {Z.N} points on S^{Z.d} from {path}")
    return Z


def read_report(path: PathLike, model: type) -> BaseModel:
    try:
        return model.model_validate_json(Path(path).read_text())
    except OSError as e:
        raise DataFileError(f"cannot read file: {e.strerror or e}", path=str(path))
    except ValidationError as e:
        raise DataFileError(f"malformed report: {e}", path=str(path))
