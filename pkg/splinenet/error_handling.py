"""
Error types and exit-code mapping for SplineNet
"""
from contextlib import contextmanager
from typing import Iterator, Optional
import logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2


class SplineNetError(Exception):
    """Base exception for splinenet errors"""
    exit_code = EXIT_INPUT


class InputError(SplineNetError):
    """Malformed or inconsistent user input"""
    exit_code = EXIT_INPUT


class ParseError(InputError):
    """A text input could not be parsed"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(InputError):
    """Invalid experiment or training configuration"""
    pass


class DomainError(SplineNetError, ValueError):
    """A mathematical precondition does not hold (w = 0, t <= 0, alpha = beta, ...)"""
    exit_code = EXIT_INPUT


class UnsupportedError(SplineNetError):
    """Valid request outside the supported cases (e.g. reflecting a fractional activation)"""
    exit_code = EXIT_INPUT


class NumericalError(SplineNetError):
    """Numerical failure during training or solving"""
    exit_code = EXIT_NUMERICAL


class TrainingError(NumericalError):
    """Training diverged"""

    def __init__(self, message: str, epoch: Optional[int] = None):
        self.epoch = epoch
        if epoch is not None:
            message = f"epoch {epoch}: {message}"
        super().__init__(message)


class SolverError(NumericalError):
    """The oracle solver could not produce a usable iterate"""
    pass


class ExperimentError(SplineNetError):
    """A step of an experiment failed"""

    def __init__(self, step: str, cause: BaseException):
        self.step = step
        self.cause = cause
        self.exit_code = exit_code_for(cause)
        super().__init__(f"step '{step}' failed: {cause}")


def exit_code_for(exc: BaseException) -> int:
    """Process exit code for an exception raised by a command"""
    if isinstance(exc, SplineNetError):
        return exc.exit_code
    if isinstance(exc, (FloatingPointError, ArithmeticError)):
        return EXIT_NUMERICAL
    return EXIT_INPUT


@contextmanager
def experiment_step(name: str) -> Iterator[None]:
    """
    Run a block as a named experiment step

    Any exception escaping the block is re-raised as ExperimentError carrying
    the step name; nested steps keep the innermost name.
    """
    try:
        yield
    except ExperimentError:
        raise
    except Exception as e:
        logger.error("Experiment step %s failed: %s", name, e)
        raise ExperimentError(name, e) from e
