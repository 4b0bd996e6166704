"""
Pydantic schemas for run configuration and reports
"""
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

from splinenet.config import settings
from splinenet.core.activations import PowerActivation, format_activation, parse_activation
from splinenet.core.regularizers import RegKind


def _coerce_activation(value: Any) -> Any:
    if isinstance(value, str):
        return parse_activation(value)
    if isinstance(value, (tuple, list)) and len(value) == 3:
        return PowerActivation(*value)
    return value


class TrainConfig(BaseModel):
    """Training configuration (one network fit)"""

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        populate_by_name=True,
        arbitrary_types_allowed=True
    )

    width: int = Field(default_factory=lambda: settings.default_width, gt=0, alias="K")
    lam: float = Field(default_factory=lambda: settings.default_lambda, ge=0.0, alias="lambda")
    reg: RegKind = RegKind.WEIGHT_DECAY
    learning_rate: float = Field(default_factory=lambda: settings.learning_rate, gt=0.0)
    epochs: int = Field(default_factory=lambda: settings.epochs, gt=0)
    full_batch: bool = True
    seed: int = Field(default=0, ge=0)
    activation: PowerActivation = Field(default_factory=lambda: PowerActivation(0.0, 1.0, 2.0))
    init_scale: float = Field(default_factory=lambda: settings.init_scale, gt=0.0)
    output_scale: float = Field(default_factory=lambda: settings.init_output_scale, gt=0.0)
    epsilon: float = Field(default_factory=lambda: settings.adagrad_epsilon, gt=0.0)
    log_every: int = Field(default_factory=lambda: settings.log_every, ge=0)

    @field_validator("activation", mode="before")
    @classmethod
    def parse_activation_spec(cls, value: Any) -> Any:
        return _coerce_activation(value)

    @field_validator("full_batch")
    @classmethod
    def require_full_batch(cls, value: bool) -> bool:
        if not value:
            raise ValueError("only full-batch training is supported")
        return value

    @field_serializer("activation")
    def serialize_activation(self, act: PowerActivation) -> str:
        return format_activation(act)


class OracleConfig(BaseModel):
    """Grid solver configuration"""

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        populate_by_name=True,
        arbitrary_types_allowed=True
    )

    activation: PowerActivation = Field(default_factory=lambda: PowerActivation(0.0, 1.0, 2.0))
    lam: float = Field(default_factory=lambda: settings.default_lambda, gt=0.0, alias="lambda")
    matched: bool = True
    grid_size: Optional[int] = Field(default=None, gt=0)
    max_iters: int = Field(default_factory=lambda: settings.oracle_max_iters, gt=0)
    tol: float = Field(default_factory=lambda: settings.oracle_tol, gt=0.0)

    @field_validator("activation", mode="before")
    @classmethod
    def parse_activation_spec(cls, value: Any) -> Any:
        return _coerce_activation(value)

    @field_serializer("activation")
    def serialize_activation(self, act: PowerActivation) -> str:
        return format_activation(act)


class SplineConfig(BaseModel):
    """Classical interpolants take no options"""

    model_config = ConfigDict(frozen=True, extra="forbid")


class ExperimentSection(BaseModel):
    """The [experiment] section"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dataset: Optional[str] = None
    n_points: int = Field(default=8, ge=2)
    seed: int = Field(default=0, ge=0)
    noise: float = Field(default=0.0, ge=0.0)
    output_dir: str = "results"
    plot: bool = True
    sample_points: int = Field(default_factory=lambda: settings.sample_points, ge=2)
    sample_margin: float = Field(default_factory=lambda: settings.sample_margin, ge=0.0)
    parallel: bool = True
    record_timing: bool = True


class ExperimentConfig(BaseModel):
    """A parsed experiment file: global section plus one section per method"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    experiment: ExperimentSection = Field(default_factory=ExperimentSection)
    methods: Dict[str, BaseModel] = Field(default_factory=dict)

    def echo(self) -> List[str]:
        """`section.key = value` lines for every resolved setting"""
        lines = []
        for key, value in self.experiment.model_dump(mode="json").items():
            lines.append(f"experiment.{key} = {value}")
        for name, section in self.methods.items():
            for key, value in section.model_dump(mode="json", by_alias=True).items():
                lines.append(f"{name}.{key} = {value}")
        return lines


class MethodRecord(BaseModel):
    """One row of the experiment report"""
    method: str
    max_error: float
    path_norm: Optional[float] = None
    seminorm: float
    oracle_seminorm: Optional[float] = None
    wall_time: Optional[float] = None


class ExperimentReport(BaseModel):
    """Seminorm comparison across methods"""
    dataset_fingerprint: str
    n_points: int
    config: List[str]
    records: List[MethodRecord] = []

    def record(self, method: str) -> MethodRecord:
        for rec in self.records:
            if rec.method == method:
                return rec
        raise KeyError(method)
