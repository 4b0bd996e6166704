"""
Plain-text formats for networks and canonical splines

Network:
    gamma alpha beta K
    v w b            (K lines)
    p_0 p_1 ...      (polynomial, ascending)

Spline:
    gamma nknots
    knot coeff       (nknots lines)
    p_0 p_1 ...

Floats are written with 17 significant digits so reading back is exact.
"""
from pathlib import Path
from typing import Iterable, List, Union

import numpy as np

from splinenet.core.activations import PowerActivation
from splinenet.core.model import NetworkParams
from splinenet.error_handling import DomainError, ParseError
from splinenet.splines.canonical import CanonicalSpline

PathLike = Union[str, Path]


def _fmt(values: Iterable[float]) -> str:
    return " ".join(f"{float(v):.17g}" for v in values)


def _lines(text: str) -> List[str]:
    return [line for line in text.splitlines() if line.strip()]


def _floats(line: str, count: int, lineno: int) -> List[float]:
    parts = line.split()
    if count >= 0 and len(parts) != count:
        raise ParseError(f"expected {count} values, got {len(parts)}", line=lineno)
    try:
        return [float(p) for p in parts]
    except ValueError as e:
        raise ParseError(str(e), line=lineno) from e


def _count(token: str, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError as e:
        raise ParseError(f"expected a count, got '{token}'", line=lineno) from e
    if value < 0:
        raise ParseError(f"count must be >= 0, got {value}", line=lineno)
    return value


def dump_params(params: NetworkParams) -> str:
    act = params.activation
    rows = [_fmt([act.gamma, act.alpha, act.beta]) + f" {params.width}"]
    rows += [_fmt(row) for row in zip(params.v, params.w, params.b)]
    rows.append(_fmt(params.poly))
    return "\n".join(rows) + "\n"


def load_params(text: str) -> NetworkParams:
    """
    Parse the network text format

    Raises:
        ParseError: On malformed lines or inconsistent parameters
    """
    lines = _lines(text)
    if not lines:
        raise ParseError("empty network file", line=1)
    header = lines[0].split()
    if len(header) != 4:
        raise ParseError("header must be 'gamma alpha beta K'", line=1)
    gamma, alpha, beta = _floats(" ".join(header[:3]), 3, 1)
    width = _count(header[3], 1)
    if len(lines) != width + 2:
        raise ParseError(f"expected {width} neuron lines and a polynomial line", line=len(lines))

    neurons = np.array([_floats(lines[i], 3, i + 1) for i in range(1, width + 1)]).reshape(width, 3)
    poly = _floats(lines[-1], -1, len(lines))
    try:
        act = PowerActivation(alpha, beta, gamma)
        return NetworkParams(act, neurons[:, 0], neurons[:, 1], neurons[:, 2], poly)
    except DomainError as e:
        raise ParseError(str(e)) from e


def dump_spline(spline: CanonicalSpline) -> str:
    rows = [f"{spline.gamma:.17g} {spline.num_knots}"]
    rows += [_fmt(row) for row in zip(spline.knots, spline.coeffs)]
    rows.append(_fmt(spline.poly))
    return "\n".join(rows) + "\n"


def load_spline(text: str) -> CanonicalSpline:
    lines = _lines(text)
    if not lines:
        raise ParseError("empty spline file", line=1)
    header = lines[0].split()
    if len(header) != 2:
        raise ParseError("header must be 'gamma nknots'", line=1)
    gamma = _floats(header[0], 1, 1)[0]
    count = _count(header[1], 1)
    if len(lines) != count + 2:
        raise ParseError(f"expected {count} knot lines and a polynomial line", line=len(lines))

    atoms = np.array([_floats(lines[i], 2, i + 1) for i in range(1, count + 1)]).reshape(count, 2)
    poly = _floats(lines[-1], -1, len(lines))
    try:
        return CanonicalSpline(gamma, atoms[:, 0], atoms[:, 1], poly)
    except DomainError as e:
        raise ParseError(str(e)) from e


def write_params(path: PathLike, params: NetworkParams) -> Path:
    path = Path(path)
    path.write_text(dump_params(params), encoding="utf-8")
    return path


def read_params(path: PathLike) -> NetworkParams:
    return load_params(Path(path).read_text(encoding="utf-8"))


def write_spline(path: PathLike, spline: CanonicalSpline) -> Path:
    path = Path(path)
    path.write_text(dump_spline(spline), encoding="utf-8")
    return path


def read_spline(path: PathLike) -> CanonicalSpline:
    return load_spline(Path(path).read_text(encoding="utf-8"))
