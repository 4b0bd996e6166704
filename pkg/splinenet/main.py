"""
SplineNet command-line entry point

Subcommands: gen, train, spline, oracle, admissibility, experiment.
"""
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence
import argparse
import logging
import sys

import numpy as np
from pydantic import ValidationError

from splinenet.config import configure_logging, settings
from splinenet.core.activations import (
    NAMED_FUNCTIONS,
    check_admissibility,
    check_admissibility_of,
    format_activation,
    parse_activation,
)
from splinenet.core.model import forward
from splinenet.core.regularizers import RegKind, matched_oracle_lambda, path_norm, seminorm_of_network
from splinenet.error_handling import EXIT_INPUT, EXIT_OK, SplineNetError, exit_code_for
from splinenet.experiments.config_file import load_experiment_config
from splinenet.experiments.datasets import generate_dataset
from splinenet.experiments.report import render_report
from splinenet.experiments.runner import run_experiment
from splinenet.models.schemas import TrainConfig
from splinenet.oracle.solver import GridProblem, kkt_violation, oracle_seminorm, solve, to_spline
from splinenet.splines.canonical import eval_spline, spline_seminorm
from splinenet.splines.interpolants import connect_the_dots, natural_cubic
from splinenet.training.trainer import train
from splinenet.utils.io_utils import dataset_text, load_dataset, load_samples, write_curve, write_dataset
from splinenet.utils.serialization import write_params, write_spline

logger = logging.getLogger("splinenet.main")


def _emit(pairs: Dict[str, Any]) -> None:
    for key, value in pairs.items():
        if isinstance(value, float):
            value = f"{value:.10g}"
        print(f"{key}: {value}")


def _echo_flags(args: argparse.Namespace, names: Sequence[str]) -> Dict[str, Any]:
    return {name: getattr(args, name) for name in names if getattr(args, name) is not None}


# ==================== Commands ====================

def cmd_gen(args: argparse.Namespace) -> int:
    dataset = generate_dataset(args.n, args.seed, args.noise)
    if args.output:
        write_dataset(args.output, dataset)
        logger.info("Wrote %d samples to %s", dataset.size, args.output)
    else:
        sys.stdout.write(dataset_text(dataset))
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.data)
    fields = {
        "K": args.K,
        "lambda": args.lam,
        "reg": args.reg,
        "learning_rate": args.learning_rate,
        "epochs": args.epochs,
        "seed": args.seed,
        "activation": args.activation,
        "init_scale": args.init_scale,
        "output_scale": args.output_scale,
        "log_every": args.log_every,
    }
    config = TrainConfig.model_validate({k: v for k, v in fields.items() if v is not None})
    params, history = train(config, dataset)

    if args.output:
        write_params(args.output, params)
    if args.curve:
        grid = np.linspace(*dataset.x_range, settings.sample_points)
        write_curve(args.curve, grid, forward(params, grid))

    residual = forward(params, dataset.x) - dataset.y
    summary = {"command": "train", **config.model_dump(mode="json", by_alias=True)}
    summary.update(
        data_loss=float(history.data_loss[-1]),
        objective=float(history.objective[-1]),
        max_err=float(np.max(np.abs(residual))),
        path_norm=path_norm(params),
        seminorm=seminorm_of_network(params, scale=dataset.span),
    )
    _emit(summary)
    return EXIT_OK


def cmd_spline(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.data)
    spline = connect_the_dots(dataset) if args.kind == "linear" else natural_cubic(dataset)
    if args.output:
        write_spline(args.output, spline)
    if args.curve:
        grid = np.linspace(*dataset.x_range, settings.sample_points)
        write_curve(args.curve, grid, eval_spline(spline, grid))
    _emit({
        "command": "spline",
        "kind": args.kind,
        "gamma": spline.gamma,
        "knots": spline.num_knots,
        "seminorm": spline_seminorm(spline),
    })
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.data)
    act = parse_activation(args.activation)
    lam = args.lam if args.lam is not None else settings.default_lambda
    measure_lam = lam if args.unmatched else matched_oracle_lambda(act, lam)

    problem = GridProblem.on_data(act.gamma, measure_lam, dataset, args.grid_size)
    solution = solve(problem, args.max_iters, args.tol)
    spline = to_spline(problem, solution)
    if args.output:
        write_spline(args.output, spline)

    summary = {"command": "oracle", "activation": format_activation(act)}
    summary.update(_echo_flags(args, ("lam", "grid_size", "max_iters", "tol")))
    summary.update(
        measure_lambda=measure_lam,
        grid_points=int(problem.grid.size),
        seminorm=oracle_seminorm(solution),
        knots=spline.num_knots,
        objective=solution.objective,
        data_residual=solution.data_residual,
        kkt_violation=kkt_violation(problem, solution),
        converged=solution.converged,
        iterations=solution.iterations,
    )
    _emit(summary)
    return EXIT_OK


def cmd_admissibility(args: argparse.Namespace) -> int:
    tolerance = args.tolerance if args.tolerance is not None else settings.admissibility_tolerance
    if args.activation:
        subject = args.activation
        report = check_admissibility_of(parse_activation(args.activation), tolerance)
    elif args.function:
        subject = args.function
        report = check_admissibility_of(NAMED_FUNCTIONS[args.function], tolerance)
    else:
        subject = str(args.samples)
        report = check_admissibility(load_samples(args.samples), tolerance)

    _emit({
        "command": "admissibility",
        "subject": subject,
        "tolerance": tolerance,
        "admissible": report.admissible,
        "fitted": format_activation(report.fitted) if report.fitted else "-",
        "gamma_estimate": report.gamma_estimate,
        "max_residual": report.max_residual,
        "reason": report.rejection_reason or "-",
    })
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    config = load_experiment_config(args.config)
    overrides = {
        key: value
        for key, value in (
            ("seed", args.seed),
            ("n_points", args.n_points),
            ("noise", args.noise),
            ("parallel", False if args.sequential else None),
            ("record_timing", False if args.no_timing else None),
        )
        if value is not None
    }
    if overrides:
        section = config.experiment.model_validate({**config.experiment.model_dump(), **overrides})
        config = config.model_copy(update={"experiment": section})

    report = run_experiment(args.config, args.output_dir, config=config)
    sys.stdout.write(render_report(report))
    return EXIT_OK


# ==================== Parser ====================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splinenet",
        description="Power-activation networks and their optimal splines",
    )
    parser.add_argument("--log-level", default=None, help=f"logging level (default {settings.log_level})")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic dataset")
    gen.add_argument("--n", type=int, default=8, help="number of samples")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--noise", type=float, default=0.0, help="Gaussian noise standard deviation")
    gen.add_argument("--output", type=Path, help="CSV path (default stdout)")
    gen.set_defaults(handler=cmd_gen)

    tr = sub.add_parser("train", help="train a network with AdaGrad")
    tr.add_argument("--data", type=Path, required=True, help="dataset CSV with header x,y")
    tr.add_argument("--activation", help="relu, leaky_relu:A, tpow:G or alpha,beta,gamma")
    tr.add_argument("--K", type=int, help=f"width (default {settings.default_width})")
    tr.add_argument("--lambda", dest="lam", type=float, help=f"regularization weight (default {settings.default_lambda})")
    tr.add_argument("--reg", choices=[k.value for k in RegKind])
    tr.add_argument("--learning-rate", type=float)
    tr.add_argument("--epochs", type=int)
    tr.add_argument("--seed", type=int)
    tr.add_argument("--init-scale", type=float, help=f"range of the inner weights (default {settings.init_scale})")
    tr.add_argument("--output-scale", type=float, help=f"extra factor on the output weight range (default {settings.init_output_scale})")
    tr.add_argument("--log-every", type=int, help="progress CSV period in epochs (0 disables)")
    tr.add_argument("--output", type=Path, help="write trained parameters")
    tr.add_argument("--curve", type=Path, help="write the fit sampled on the data range")
    tr.set_defaults(handler=cmd_train)

    sp = sub.add_parser("spline", help="classical interpolating spline")
    sp.add_argument("--data", type=Path, required=True)
    sp.add_argument("--kind", choices=["linear", "cubic"], default="linear")
    sp.add_argument("--output", type=Path, help="write the canonical spline")
    sp.add_argument("--curve", type=Path)
    sp.set_defaults(handler=cmd_spline)

    orc = sub.add_parser("oracle", help="grid-based convex reference solver")
    orc.add_argument("--data", type=Path, required=True)
    orc.add_argument("--activation", default="relu", help="activation whose order and constant are matched")
    orc.add_argument("--lambda", dest="lam", type=float, help="network-side regularization weight")
    orc.add_argument("--unmatched", action="store_true", help="use --lambda directly as the measure-norm weight")
    orc.add_argument("--grid-size", type=int)
    orc.add_argument("--max-iters", type=int)
    orc.add_argument("--tol", type=float)
    orc.add_argument("--output", type=Path)
    orc.set_defaults(handler=cmd_oracle)

    adm = sub.add_parser("admissibility", help="test whether a function is a power activation")
    source = adm.add_mutually_exclusive_group(required=True)
    source.add_argument("--activation", help="activation spec to sample")
    source.add_argument("--function", choices=sorted(NAMED_FUNCTIONS), help="built-in non-power function")
    source.add_argument("--samples", type=Path, help="CSV of x,y samples")
    adm.add_argument("--tolerance", type=float)
    adm.set_defaults(handler=cmd_admissibility)

    exp = sub.add_parser("experiment", help="run an experiment config")
    exp.add_argument("config", type=Path)
    exp.add_argument("--output-dir", type=Path)
    exp.add_argument("--seed", type=int, help="override experiment.seed")
    exp.add_argument("--n-points", type=int, help="override experiment.n_points")
    exp.add_argument("--noise", type=float, help="override experiment.noise")
    exp.add_argument("--sequential", action="store_true", help="fit methods one after another")
    exp.add_argument("--no-timing", action="store_true", help="omit wall times from the report")
    exp.set_defaults(handler=cmd_experiment)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)

    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except SplineNetError as e:
        logger.error("%s", e)
        return exit_code_for(e)
    except ValidationError as e:
        logger.error("Invalid configuration: %s", e)
        return EXIT_INPUT
    except (OSError, FloatingPointError) as e:
        logger.error("%s", e)
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
