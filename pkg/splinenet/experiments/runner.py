"""
Experiment runner - fits every requested method and writes the artifacts
"""
from pathlib import Path
from typing import Dict, List, Optional, Union
import asyncio
import logging

import numpy as np
from pydantic import BaseModel

from splinenet.core.dataset import Dataset
from splinenet.error_handling import ExperimentError, experiment_step
from splinenet.experiments.config_file import load_experiment_config
from splinenet.experiments.datasets import generate_dataset
from splinenet.experiments.methods import MethodResult, run_method
from splinenet.experiments.report import render_report
from splinenet.models.schemas import ExperimentConfig, ExperimentReport, MethodRecord
from splinenet.utils.io_utils import dataset_fingerprint, load_dataset, write_curve, write_dataset
from splinenet.utils.serialization import write_params, write_spline
from splinenet.utils.plotting import Plot

logger = logging.getLogger(__name__)


class MethodExecutor:
    """
    Runs method fits, concurrently on worker threads when enabled

    Every fit owns its state; results are joined in request order.
    """

    def __init__(self, dataset: Dataset, parallel: bool = True):
        self.dataset = dataset
        self.parallel = parallel

    async def execute_methods(self, sections: Dict[str, BaseModel]) -> List[MethodResult]:
        """
        Fit every method in sections

        Raises:
            ExperimentError: For the first failed method, in request order
        """
        names = list(sections)
        if self.parallel:
            tasks = [asyncio.to_thread(self._execute_single_method, name, sections[name]) for name in names]
            results = await asyncio.gather(*tasks, return_exceptions=True)
        else:
            results = []
            for name in names:
                try:
                    results.append(self._execute_single_method(name, sections[name]))
                except Exception as e:
                    results.append(e)

        for name, result in zip(names, results):
            if isinstance(result, BaseException):
                if isinstance(result, ExperimentError):
                    raise result
                raise ExperimentError(f"fit {name}", result) from result
        return results

    def _execute_single_method(self, name: str, section: BaseModel) -> MethodResult:
        with experiment_step(f"fit {name}"):
            return run_method(name, self.dataset, section)


def resolve_dataset(config: ExperimentConfig, base_dir: Path) -> Dataset:
    """Dataset file from the config (relative to the config file) or the synthetic generator"""
    section = config.experiment
    if section.dataset:
        path = Path(section.dataset)
        if not path.is_absolute():
            path = base_dir / path
        return load_dataset(path)
    return generate_dataset(section.n_points, section.seed, section.noise)


def sample_grid(dataset: Dataset, points: int, margin: float) -> np.ndarray:
    """Uniform grid extending margin * span beyond both ends of the data"""
    low, high = dataset.x_range
    pad = margin * dataset.span
    return np.linspace(low - pad, high + pad, points)


def build_report(
    config: ExperimentConfig,
    dataset: Dataset,
    results: List[MethodResult]
) -> ExperimentReport:
    """Per-method records; network and spline rows get the oracle seminorm of matching order"""
    oracles = {res.gamma: res.seminorm for res in results if res.solution is not None}
    timing = config.experiment.record_timing
    records = [
        MethodRecord(
            method=res.method,
            max_error=res.max_error(dataset),
            path_norm=res.path_norm,
            seminorm=res.seminorm,
            oracle_seminorm=oracles.get(res.gamma),
            wall_time=res.wall_time if timing else None,
        )
        for res in results
    ]
    return ExperimentReport(
        dataset_fingerprint=dataset_fingerprint(dataset),
        n_points=dataset.size,
        config=config.echo(),
        records=records,
    )


def write_artifacts(
    output: Path,
    config: ExperimentConfig,
    dataset: Dataset,
    results: List[MethodResult],
    report: ExperimentReport
) -> None:
    section = config.experiment
    grid = sample_grid(dataset, section.sample_points, section.sample_margin)
    plot = Plot()

    with experiment_step("write dataset"):
        write_dataset(output / "data.csv", dataset)

    for res in results:
        with experiment_step(f"write {res.method}"):
            values = res.evaluate(grid)
            write_curve(output / f"{res.method}.csv", grid, values)
            if res.params is not None:
                write_params(output / f"{res.method}.params", res.params)
            if res.spline is not None:
                write_spline(output / f"{res.method}.spline", res.spline)
            plot.add_curve(res.method, grid, values)

    with experiment_step("write report"):
        (output / "report.txt").write_text(render_report(report), encoding="utf-8")
        (output / "report.json").write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")

    if section.plot:
        with experiment_step("write plot"):
            plot.set_points(dataset.x, dataset.y)
            plot.save(output / "plot.svg")


async def run_experiment_async(
    config_path: Union[str, Path],
    output_dir: Optional[Union[str, Path]] = None,
    config: Optional[ExperimentConfig] = None
) -> ExperimentReport:
    """
    Run an experiment file end to end

    Args:
        config_path: Experiment config
        output_dir: Overrides the config's output_dir
        config: Already parsed config (skips reading config_path)

    Raises:
        ExperimentError: Naming the step that failed
    """
    config_path = Path(config_path)
    if config is None:
        with experiment_step("load config"):
            config = load_experiment_config(config_path)

    with experiment_step("load dataset"):
        dataset = resolve_dataset(config, config_path.parent)

    output = Path(output_dir if output_dir is not None else config.experiment.output_dir)
    with experiment_step("prepare output"):
        output.mkdir(parents=True, exist_ok=True)

    logger.info("Running %d methods on %d samples", len(config.methods), dataset.size)
    executor = MethodExecutor(dataset, parallel=config.experiment.parallel)
    results = await executor.execute_methods(config.methods)

    with experiment_step("build report"):
        report = build_report(config, dataset, results)
    write_artifacts(output, config, dataset, results, report)
    logger.info("Experiment written to %s", output)
    return report


def run_experiment(
    config_path: Union[str, Path],
    output_dir: Optional[Union[str, Path]] = None,
    config: Optional[ExperimentConfig] = None
) -> ExperimentReport:
    return asyncio.run(run_experiment_async(config_path, output_dir, config))
