"""
Experiment config parser

Format:
    # comment
    [experiment]
    n_points = 8
    seed = 3

    [relu_net_reg]
    K = 200
    lambda = 1e-5

One section per requested method; `[experiment]` holds global settings.
Unknown sections and keys are errors.
"""
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union
import logging

from pydantic import ValidationError

from splinenet.error_handling import ConfigError, InputError, ParseError, SplineNetError
from splinenet.experiments.methods import METHODS, build_section, get_available_methods
from splinenet.models.schemas import ExperimentConfig, ExperimentSection

logger = logging.getLogger(__name__)

GLOBAL_SECTION = "experiment"


class ConfigParser:
    """
    Parses experiment files into validated ExperimentConfig objects
    """

    def __init__(self):
        self.available_sections = [GLOBAL_SECTION] + get_available_methods()

    def parse_text(self, text: str) -> ExperimentConfig:
        sections, lines = self._split_sections(text)
        return self._validate(sections, lines)

    def parse_file(self, path: Union[str, Path]) -> ExperimentConfig:
        path = Path(path)
        if not path.is_file():
            raise InputError(f"Config file not found: {path}")
        return self.parse_text(path.read_text(encoding="utf-8"))

    def _split_sections(self, text: str) -> Tuple[Dict[str, Dict[str, str]], Dict[str, int]]:
        """Raw key/value strings per section, plus the line of each section header"""
        sections: Dict[str, Dict[str, str]] = {}
        header_lines: Dict[str, int] = {}
        current: Optional[str] = None

        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue

            if line.startswith("["):
                if not line.endswith("]"):
                    raise ParseError(f"unterminated section header '{line}'", line=lineno)
                name = line[1:-1].strip()
                if name not in self.available_sections:
                    raise ConfigError(
                        f"line {lineno}: unknown section [{name}]; "
                        f"available: {', '.join(self.available_sections)}"
                    )
                if name in sections:
                    raise ParseError(f"duplicate section [{name}]", line=lineno)
                sections[name] = {}
                header_lines[name] = lineno
                current = name
                continue

            if "=" not in line:
                raise ParseError(f"expected 'key = value', got '{line}'", line=lineno)
            if current is None:
                raise ParseError("key outside of any section", line=lineno)

            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ParseError("empty key", line=lineno)
            if key in sections[current]:
                raise ParseError(f"duplicate key '{key}' in [{current}]", line=lineno)
            sections[current][key] = value.strip("\"'")

        return sections, header_lines

    def _validate(self, sections: Dict[str, Dict[str, str]], lines: Dict[str, int]) -> ExperimentConfig:
        try:
            experiment = ExperimentSection.model_validate(sections.pop(GLOBAL_SECTION, {}))
        except (ValidationError, SplineNetError) as e:
            raise ConfigError(f"[{GLOBAL_SECTION}]: {_describe(e)}") from e

        names: List[str] = list(sections) or list(METHODS)
        methods = {}
        for name in names:
            try:
                methods[name] = build_section(name, sections.get(name, {}))
            except (ValidationError, SplineNetError) as e:
                where = f"line {lines[name]}: " if name in lines else ""
                raise ConfigError(f"{where}[{name}]: {_describe(e)}") from e

        logger.debug("Parsed experiment config with methods %s", ", ".join(methods))
        return ExperimentConfig(experiment=experiment, methods=methods)


def _describe(exc: Exception) -> str:
    if isinstance(exc, ValidationError):
        return "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'value'}: {err['msg']}" for err in exc.errors()
        )
    return str(exc)


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    return ConfigParser().parse_file(path)


def parse_experiment_config(text: str) -> ExperimentConfig:
    return ConfigParser().parse_text(text)
