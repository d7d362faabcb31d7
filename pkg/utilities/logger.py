"""
Logging for the Perturbed Network Identification toolkit.

The application logger is configured once from config/logging.json. Each
run that writes outputs also gets its own ``run.log`` next to its report,
attached for the duration of the run with :func:`run_log`.
"""
import logging
import logging.config
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, Union

from .config_loader import config

APP_LOGGER_NAME = 'perturbed_netid'
RUN_LOG_NAME = 'run.log'

_FALLBACK_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def _configured_log_files(logging_config: dict) -> list:
    handlers = logging_config.get('handlers', {})
    return [Path(h['filename']) for h in handlers.values() if 'filename' in h]


def _basic_config(reason: Optional[Exception] = None) -> None:
    logging.basicConfig(
        level=getattr(logging, config.log_level.upper(), logging.INFO),
        format=_FALLBACK_FORMAT,
        handlers=[logging.StreamHandler(), logging.FileHandler(config.log_file)],
    )
    if reason is not None:
        logging.warning(f"Failed to load logging config, using basic config: {reason}")


def setup_global_logger() -> logging.Logger:
    """Configure logging from config/logging.json, falling back to a console plus file setup."""
    config.log_file.parent.mkdir(parents=True, exist_ok=True)
    logging_config = config.logging_config
    if not logging_config:
        _basic_config()
        return logging.getLogger(APP_LOGGER_NAME)

    for path in _configured_log_files(logging_config):
        path.parent.mkdir(parents=True, exist_ok=True)
    try:
        logging.config.dictConfig(logging_config)
    except (ValueError, TypeError, AttributeError, ImportError, OSError) as e:
        _basic_config(e)
    return logging.getLogger(APP_LOGGER_NAME)


logger = setup_global_logger()


def get_logger(name: str = None) -> logging.Logger:
    """Child of the application logger, or the application logger itself."""
    if name:
        return logging.getLogger(f'{APP_LOGGER_NAME}.{name}')
    return logger


def _run_formatter() -> logging.Formatter:
    formatters = config.logging_config.get('formatters', {})
    detailed = formatters.get('detailed', {})
    return logging.Formatter(detailed.get('format', _FALLBACK_FORMAT), detailed.get('datefmt'))


@contextmanager
def run_log(out_dir: Optional[Union[str, Path]], level: int = logging.DEBUG) -> Iterator[Optional[Path]]:
    """Mirror the application logger into ``<out_dir>/run.log`` while the block runs.

    ``None`` disables the file; the block still runs and receives ``None``.
    """
    if out_dir is None:
        yield None
        return
    path = Path(out_dir) / RUN_LOG_NAME
    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path, mode='w', encoding='utf-8')
    handler.setLevel(level)
    handler.setFormatter(_run_formatter())
    logger.addHandler(handler)
    try:
        yield path
    finally:
        logger.removeHandler(handler)
        handler.close()


__all__ = ['logger', 'get_logger', 'run_log', 'APP_LOGGER_NAME', 'RUN_LOG_NAME']
