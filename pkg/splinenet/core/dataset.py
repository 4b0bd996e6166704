"""
Ideal-sampling datasets
"""
from dataclasses import dataclass
from typing import Iterable, Iterator, Tuple

import numpy as np

from splinenet.error_handling import InputError


def _readonly(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Ordered samples (x_n, y_n) with strictly increasing x

    Attributes:
        x: Sample sites
        y: Sample values
    """
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = _readonly(self.x)
        y = _readonly(self.y)
        if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
            raise InputError("x and y must be 1-D arrays of equal length")
        if x.size < 2:
            raise InputError(f"a dataset needs at least 2 samples, got {x.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InputError("dataset contains non-finite values")
        if np.any(np.diff(x) <= 0.0):
            raise InputError("x must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[float, float]], sort: bool = False) -> "Dataset":
        """
        Build a dataset from (x, y) pairs

        Args:
            pairs: Samples
            sort: Sort by x first; duplicate x are rejected either way
        """
        arr = np.asarray(list(pairs), dtype=float).reshape(-1, 2)
        if sort:
            arr = arr[np.argsort(arr[:, 0], kind="stable")]
            duplicates = np.flatnonzero(np.diff(arr[:, 0]) == 0.0)
            if duplicates.size:
                raise InputError(f"duplicate x value {arr[duplicates[0], 0]!r}")
        return cls(arr[:, 0], arr[:, 1])

    @property
    def size(self) -> int:
        return int(self.x.size)

    @property
    def x_range(self) -> Tuple[float, float]:
        return float(self.x[0]), float(self.x[-1])

    @property
    def span(self) -> float:
        return float(self.x[-1] - self.x[0])

    @property
    def y_range(self) -> float:
        return float(np.ptp(self.y))

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[Tuple[float, float]]:
        return zip(self.x.tolist(), self.y.tolist())
