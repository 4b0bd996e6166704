"""
Fitting methods available to experiments

Each method maps a dataset and its validated section to a MethodResult.
"""
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Type
import logging
import time

import numpy as np
from pydantic import BaseModel

from splinenet.core.dataset import Dataset
from splinenet.core.model import NetworkParams, forward
from splinenet.core.regularizers import matched_oracle_lambda, path_norm, seminorm_of_network
from splinenet.models.schemas import OracleConfig, SplineConfig, TrainConfig
from splinenet.oracle.solver import GridProblem, OracleSolution, oracle_seminorm, solve, to_spline
from splinenet.splines.canonical import CanonicalSpline, eval_spline, spline_seminorm
from splinenet.splines.interpolants import connect_the_dots, natural_cubic
from splinenet.training.trainer import TrainHistory, train

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MethodResult:
    """
    Outcome of one fit

    Attributes:
        method: Registry name
        gamma: Order of the fitted function's spline class
        evaluate: The fitted function
        seminorm: ||D^gamma f||_M
        path_norm: Network path norm (networks only)
        wall_time: Seconds spent fitting
        params: Trained network (networks only)
        history: Training history (networks only)
        spline: Canonical spline (splines and oracles)
        solution: Grid solution (oracles only)
    """
    method: str
    gamma: float
    evaluate: Callable[[np.ndarray], np.ndarray]
    seminorm: float
    path_norm: Optional[float] = None
    wall_time: float = 0.0
    params: Optional[NetworkParams] = None
    history: Optional[TrainHistory] = None
    spline: Optional[CanonicalSpline] = None
    solution: Optional[OracleSolution] = None

    def max_error(self, data: Dataset) -> float:
        return float(np.max(np.abs(self.evaluate(data.x) - data.y)))


def fit_network(name: str, data: Dataset, config: TrainConfig) -> MethodResult:
    start = time.perf_counter()
    params, history = train(config, data)
    elapsed = time.perf_counter() - start
    return MethodResult(
        method=name,
        gamma=config.activation.gamma,
        evaluate=lambda x: np.asarray(forward(params, x)),
        seminorm=seminorm_of_network(params, scale=data.span),
        path_norm=path_norm(params),
        wall_time=elapsed,
        params=params,
        history=history
    )


def fit_linear_spline(name: str, data: Dataset, config: SplineConfig) -> MethodResult:
    start = time.perf_counter()
    spline = connect_the_dots(data)
    return _spline_result(name, spline, time.perf_counter() - start)


def fit_cubic_spline(name: str, data: Dataset, config: SplineConfig) -> MethodResult:
    start = time.perf_counter()
    spline = natural_cubic(data)
    return _spline_result(name, spline, time.perf_counter() - start)


def _spline_result(name: str, spline: CanonicalSpline, elapsed: float) -> MethodResult:
    return MethodResult(
        method=name,
        gamma=spline.gamma,
        evaluate=lambda x: np.asarray(eval_spline(spline, x)),
        seminorm=spline_seminorm(spline),
        wall_time=elapsed,
        spline=spline
    )


def fit_oracle(name: str, data: Dataset, config: OracleConfig) -> MethodResult:
    """Grid solver; with matched=True the weight is converted as for a network"""
    act = config.activation
    lam = matched_oracle_lambda(act, config.lam) if config.matched else config.lam
    start = time.perf_counter()
    problem = GridProblem.on_data(act.gamma, lam, data, config.grid_size)
    solution = solve(problem, config.max_iters, config.tol)
    spline = to_spline(problem, solution)
    elapsed = time.perf_counter() - start
    return MethodResult(
        method=name,
        gamma=act.gamma,
        evaluate=lambda x: np.asarray(eval_spline(spline, x)),
        seminorm=oracle_seminorm(solution),
        wall_time=elapsed,
        spline=spline,
        solution=solution
    )


@dataclass(frozen=True)
class MethodSpec:
    """Registry entry: section schema, defaults applied under user values, fit function"""
    schema: Type[BaseModel]
    fit: Callable[[str, Dataset, Any], MethodResult]
    defaults: Dict[str, Any]
    description: str


CUBIC = "0,1,4"

METHODS: Dict[str, MethodSpec] = {
    # Networks
    "relu_net_reg": MethodSpec(TrainConfig, fit_network, {"activation": "relu"},
                               "ReLU network, weight decay"),
    "relu_net_unreg": MethodSpec(TrainConfig, fit_network, {"activation": "relu", "lambda": 0.0, "reg": "none"},
                                 "ReLU network, no regularization"),
    "cubic_net_reg": MethodSpec(TrainConfig, fit_network, {"activation": CUBIC},
                                "(0,1,4) network, weight decay"),
    "cubic_net_unreg": MethodSpec(TrainConfig, fit_network, {"activation": CUBIC, "lambda": 0.0, "reg": "none"},
                                  "(0,1,4) network, no regularization"),

    # Classical interpolants
    "linear_spline": MethodSpec(SplineConfig, fit_linear_spline, {}, "connect-the-dots interpolant"),
    "cubic_spline": MethodSpec(SplineConfig, fit_cubic_spline, {}, "natural cubic interpolant"),

    # Grid solver
    "oracle": MethodSpec(OracleConfig, fit_oracle, {"activation": "relu"}, "grid solver, gamma = 2"),
    "oracle_cubic": MethodSpec(OracleConfig, fit_oracle, {"activation": CUBIC}, "grid solver, gamma = 4"),
}


def get_available_methods() -> list:
    return list(METHODS.keys())


def _aliased(schema: Type[BaseModel], values: Dict[str, Any]) -> Dict[str, Any]:
    """Rewrite field names to their aliases so defaults and user keys collide"""
    names = {name: info.alias for name, info in schema.model_fields.items() if info.alias}
    return {names.get(key, key): value for key, value in values.items()}


def build_section(name: str, values: Dict[str, Any]) -> BaseModel:
    """
    Validate a method section against its schema on top of the method defaults

    Raises:
        KeyError: Unknown method
        pydantic.ValidationError: Invalid or unknown keys
    """
    spec = METHODS[name]
    merged = {**_aliased(spec.schema, spec.defaults), **_aliased(spec.schema, values)}
    return spec.schema.model_validate(merged)


def run_method(name: str, data: Dataset, section: BaseModel) -> MethodResult:
    logger.info("Fitting %s", name)
    result = METHODS[name].fit(name, data, section)
    logger.info("Fitted %s: seminorm %.6g in %.2fs", name, result.seminorm, result.wall_time)
    return result
