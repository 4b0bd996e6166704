"""
CSV input/output for datasets and sampled curves
"""
from pathlib import Path
from typing import Union
import hashlib
import io
import re

import numpy as np
import pandas as pd

from splinenet.core.dataset import Dataset
from splinenet.error_handling import InputError, ParseError

PathLike = Union[str, Path]

FLOAT_FORMAT = "%.17g"
_PARSER_LINE = re.compile(r"line (\d+)")


def _to_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        return float("nan")


def _read_columns(path: PathLike, columns: tuple) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"File not found: {path}")

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=True)
    except pd.errors.EmptyDataError as e:
        raise ParseError(f"{path} is empty", line=1) from e
    except pd.errors.ParserError as e:
        match = _PARSER_LINE.search(str(e))
        raise ParseError(str(e), line=int(match.group(1)) if match else None) from e

    header = tuple(name.strip() for name in frame.columns)
    if header != columns:
        raise ParseError(f"expected header {','.join(columns)}, got {','.join(header)}", line=1)

    values = frame.apply(lambda col: col.map(_to_float)).astype(float)
    bad = ~np.isfinite(values.to_numpy(dtype=float)).all(axis=1)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raw = ",".join("" if pd.isna(v) else str(v) for v in frame.iloc[row].tolist())
        raise ParseError(f"malformed row '{raw}'", line=row + 2)
    values.columns = list(columns)
    return values


def load_dataset(path: PathLike) -> Dataset:
    """
    Read a dataset CSV with header x,y

    Rows are sorted by x.

    Raises:
        InputError: Missing file, duplicate x or fewer than 2 rows
        ParseError: Malformed header or row (with its 1-based line number)
    """
    frame = _read_columns(path, ("x", "y"))
    return Dataset.from_pairs(frame.to_numpy(dtype=float), sort=True)


def dataset_frame(dataset: Dataset) -> pd.DataFrame:
    return pd.DataFrame({"x": dataset.x, "y": dataset.y})


def dataset_text(dataset: Dataset) -> str:
    """Canonical CSV text of a dataset"""
    buffer = io.StringIO()
    dataset_frame(dataset).to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def write_dataset(path: PathLike, dataset: Dataset) -> Path:
    path = Path(path)
    path.write_text(dataset_text(dataset), encoding="utf-8")
    return path


def dataset_fingerprint(dataset: Dataset) -> str:
    """SHA-256 of the canonical CSV text"""
    return hashlib.sha256(dataset_text(dataset).encode("utf-8")).hexdigest()


def write_curve(path: PathLike, x: np.ndarray, f: np.ndarray) -> Path:
    """Write a sampled function as CSV with columns x,f"""
    path = Path(path)
    frame = pd.DataFrame({"x": np.asarray(x, dtype=float), "f": np.asarray(f, dtype=float)})
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def read_curve(path: PathLike) -> pd.DataFrame:
    return _read_columns(path, ("x", "f"))


def load_samples(path: PathLike) -> np.ndarray:
    """Read x,y samples of a function as an (n, 2) array, file order kept"""
    return _read_columns(path, ("x", "y")).to_numpy(dtype=float)
