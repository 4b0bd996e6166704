"""
Overlay plot of fitted curves and data points, saved as SVG
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


@dataclass
class Plot:
    """Accumulates curves and points in data coordinates, draws once on save"""
    title: str = "fitted curves"
    figsize: Tuple[float, float] = (8.0, 5.0)
    curves: List[Tuple[str, np.ndarray, np.ndarray]] = field(default_factory=list)
    points: Optional[Tuple[np.ndarray, np.ndarray]] = None

    def add_curve(self, label: str, x: Sequence[float], y: Sequence[float]) -> None:
        self.curves.append((label, np.asarray(x, dtype=float), np.asarray(y, dtype=float)))

    def set_points(self, x: Sequence[float], y: Sequence[float]) -> None:
        self.points = (np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def y_limits(self) -> Optional[Tuple[float, float]]:
        """Data range padded by its own span, so diverging extrapolations stay off-canvas"""
        if self.points is None:
            return None
        low, high = float(np.min(self.points[1])), float(np.max(self.points[1]))
        pad = high - low if high > low else 1.0
        return low - pad, high + pad

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        fig = plt.figure(figsize=self.figsize)
        ax = fig.gca()
        try:
            for label, x, y in self.curves:
                ax.plot(x, y, linewidth=1.5, label=label)
            if self.points is not None:
                ax.scatter(*self.points, color="black", s=20, zorder=3, label="data")
            limits = self.y_limits()
            if limits is not None:
                ax.set_ylim(*limits)
            ax.set_xlabel("x")
            ax.set_ylabel("f(x)")
            ax.set_title(self.title)
            ax.grid(True, alpha=0.3)
            if self.curves or self.points is not None:
                ax.legend(fontsize=8)
            fig.tight_layout()
            fig.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
        return path
