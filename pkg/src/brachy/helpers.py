import logging
from functools import lru_cache
from multiprocessing import cpu_count
from pathlib import Path
from typing import Optional, Union

from negmas.helpers import create_loggers

__all__ = ["get_logger", "set_log_file", "set_screen_level", "jobs", "default_log_path"]

_screen_level = logging.WARNING
_log_file: Optional[str] = None


def default_log_path() -> Path:
    """Default location for all logs"""
    return Path.home() / "brachy" / "logs"


@lru_cache(maxsize=None)
def _logger(name: str, screen_level: int, file_name: Optional[str]) -> logging.Logger:
    return create_loggers(
        file_name=file_name,
        module_name=name,
        screen_level=screen_level,
        file_level=logging.DEBUG,
        app_wide_log_file=False,
    )


def get_logger(name: str) -> logging.Logger:
    """Returns the workbench logger for the given module (e.g. `brachysearch`)"""
    return _logger(f"brachy.{name}", _screen_level, _log_file)


def set_screen_level(level: int) -> None:
    global _screen_level
    _screen_level = level


def set_log_file(path: Optional[Union[str, Path]]) -> None:
    global _log_file
    _log_file = None if path is None else str(path)


def jobs(n_jobs: Union[float, int]) -> int:
    """Number of workers: zero or less means all cores, a fraction means that fraction of the cores"""
    if n_jobs <= 0:
        return cpu_count()
    if n_jobs == 1 and isinstance(n_jobs, int):
        return 1
    if isinstance(n_jobs, int):
        return n_jobs
    return max(1, int(0.5 + n_jobs * cpu_count()))
