"""Run logs and the call-tracing decorator used by the syzlab facade."""

import functools
import logging
import time
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, TypeVar, Union

import numpy as np

from ._version import __version__

F = TypeVar("F", bound=Callable[..., Any])

LOGGER_NAME = "syzlab"
FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
CONSOLE_FORMAT = "%(levelname)s - %(message)s"

_logger: Optional[logging.Logger] = None


def setup_logging(
    log_dir: Optional[Union[str, Path]] = None,
    level: int = logging.INFO,
    console_level: int = logging.WARNING,
) -> logging.Logger:
    """
    Configure the ``syzlab`` logger.

    Args:
        log_dir: Directory receiving ``logs/syzlab_<stamp>.log``; console only when omitted
        level: Level of the logger and of the run log
        console_level: Level of the console handler (warnings and errors by default)

    Returns:
        The configured logger
    """
    global _logger

    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(level)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    console = logging.StreamHandler()
    console.setLevel(console_level)
    console.setFormatter(logging.Formatter(CONSOLE_FORMAT))
    logger.addHandler(console)

    run_log: Optional[Path] = None
    if log_dir is not None:
        folder = Path(log_dir) / "logs"
        folder.mkdir(parents=True, exist_ok=True)
        run_log = folder / f"syzlab_{datetime.now():%Y%m%d_%H%M%S}.log"
        to_file = logging.FileHandler(run_log, encoding="utf-8")
        to_file.setLevel(level)
        to_file.setFormatter(logging.Formatter(FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
        logger.addHandler(to_file)

    _logger = logger
    rule = "=" * 80
    logger.info(rule)
    logger.info(f"syzlab {__version__} run started")
    if run_log is not None:
        logger.info(f"Run log: {run_log.resolve()}")
    logger.info(rule)
    return logger


def get_logger() -> logging.Logger:
    """The ``syzlab`` logger, set up on first use."""
    if _logger is None:
        return setup_logging()
    return _logger


def _describe(value: Any, limit: int = 120) -> str:
    if isinstance(value, np.ndarray):
        return f"array{value.shape}"
    text = value if isinstance(value, str) and " " in value else repr(value)
    return text if len(text) <= limit else text[: limit - 3] + "..."


def _arguments(args: tuple, kwargs: dict) -> str:
    # bound facade methods carry their settings; skip self
    if args and hasattr(args[0], "settings"):
        args = args[1:]
    parts = [_describe(a) for a in args] + [f"{k}={_describe(v)}" for k, v in kwargs.items()]
    return ", ".join(parts)


def log_action(
    action_name: Optional[str] = None,
    log_args: bool = True,
    log_result: bool = False,
) -> Callable[[F], F]:
    """
    Trace a computation: ``→`` on entry, ``✓`` with the elapsed time, ``✗`` on failure.

    Args:
        action_name: Label in the log (default: the function name in title case)
        log_args: Include the call arguments in the entry line
        log_result: Include the return value in the completion line

    Example:
        @log_action("Betti Table")
        def betti(self, model, pmax, qmax):
            ...
    """

    def decorator(func: F) -> F:
        label = action_name or func.__name__.replace("_", " ").title()

        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            logger = get_logger()
            shown = _arguments(args, kwargs) if log_args else ""
            logger.info(f"→ {label}({shown})" if shown else f"→ {label}")

            started = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as exc:
                logger.error(
                    f"✗ {label} failed after {time.perf_counter() - started:.2f}s - "
                    f"{type(exc).__name__}: {exc}"
                )
                raise
            elapsed = time.perf_counter() - started
            suffix = f" - Result: {_describe(result)}" if log_result and result is not None else ""
            logger.info(f"✓ {label} completed in {elapsed:.2f}s{suffix}")
            return result

        return wrapper  # type: ignore[return-value]

    return decorator


def log_verdicts(action_name: str, verdicts: Mapping[str, bool], shown: int = 5) -> None:
    """Summarise a suite's verdicts; the first ``shown`` failures go out as warnings."""
    logger = get_logger()
    failed = [name for name, ok in verdicts.items() if not ok]
    logger.info(f"  {action_name}: {len(verdicts) - len(failed)}/{len(verdicts)} checks passed")
    for name in failed[:shown]:
        logger.warning(f"    failed: {name}")
    if len(failed) > shown:
        logger.warning(f"    ... and {len(failed) - shown} more")
