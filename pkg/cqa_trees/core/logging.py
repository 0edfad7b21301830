"""Structured logging for the CQA toolkit.

Every record carries a ``{'message': ..., 'context': {...}}`` payload. The
console gets a compact colored line, the log files one JSON object per
record, both stamped with the run id of the current context.
"""

import json
import logging
import logging.handlers
import os
import sys
import tempfile
import uuid
from contextvars import ContextVar
from datetime import datetime
from functools import wraps
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

PACKAGE_LOGGER = 'cqa_trees'

# One CLI invocation or one top-level library call
run_id: ContextVar[str] = ContextVar('run_id', default='')

RESET = '\033[0m'
STYLES = {
    'time': '\033[94m',
    'logger': '\033[92m',
    'message': '\033[97m',
    'key': '\033[95m',
    'exception': '\033[31m',
    'DEBUG': '\033[96m',
    'INFO': '\033[92m',
    'WARNING': '\033[93m',
    'ERROR': '\033[31m\033[1m',
    'CRITICAL': '\033[41m\033[37m\033[1m',
}

# (file name, minimum level); None is the configured main file
FILE_HANDLERS: Tuple[Tuple[Optional[str], int], ...] = (
    (None, logging.INFO),
    ('error.log', logging.ERROR),
    ('debug.log', logging.DEBUG),
)
MAX_LOG_BYTES = 10 * 1024 * 1024
LOG_BACKUPS = 5


def get_app_log_dir() -> Path:
    """Per-user log directory under the system temp dir."""
    log_dir = Path(tempfile.gettempdir()) / PACKAGE_LOGGER / 'logs'
    log_dir.mkdir(parents=True, exist_ok=True)
    return log_dir


def _payload(record: logging.LogRecord) -> Dict[str, Any]:
    if isinstance(record.msg, dict):
        return record.msg
    return {'message': record.getMessage()}


def short_logger_name(name: str) -> str:
    """cqa_trees.services.engine -> c.s.engine"""
    *packages, leaf = name.split('.')
    return '.'.join([p[0] for p in packages if p] + [leaf])


class JsonFormatter(logging.Formatter):
    """One JSON object per record, for the log files."""

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            'timestamp': datetime.fromtimestamp(record.created).isoformat(timespec='milliseconds'),
            'level': record.levelname,
            'logger': record.name,
        }
        if current := run_id.get():
            entry['run_id'] = current
        entry.update(_payload(record))
        if record.exc_info:
            entry['exception'] = self.formatException(record.exc_info)
        return json.dumps(entry, default=str)


class PrettyFormatter(logging.Formatter):
    """Single-line console records followed by indented ``key=value`` context.

    Colors are dropped when ``NO_COLOR`` is set or stderr is not a terminal.
    """

    def __init__(self):
        super().__init__()
        self.use_colors = 'NO_COLOR' not in os.environ and sys.stderr.isatty()

    def paint(self, text: str, style: str) -> str:
        if not self.use_colors or style not in STYLES:
            return text
        return f"{STYLES[style]}{text}{RESET}"

    def format(self, record: logging.LogRecord) -> str:
        payload = _payload(record)
        head = " ".join([
            self.paint(datetime.fromtimestamp(record.created).strftime('%H:%M:%S'), 'time'),
            self.paint(f"[{record.levelname:>7}]", record.levelname),
            self.paint(short_logger_name(record.name), 'logger'),
            self.paint(str(payload.get('message', '')), 'message'),
        ])
        lines = [head]
        for key, value in (payload.get('context') or {}).items():
            rendered = json.dumps(value, default=str) if isinstance(value, (dict, list)) else str(value)
            lines.append(f"  {self.paint(key, 'key')}={rendered}")
        if record.exc_info:
            lines.append(self.paint(self.formatException(record.exc_info), 'exception'))
        return "\n".join(lines)


class StructuredLogger:
    """Thin wrapper passing keyword arguments as record context."""

    def __init__(self, name: str):
        self.name = name
        self.logger = logging.getLogger(name)

    def is_enabled_for(self, level: int) -> bool:
        return self.logger.isEnabledFor(level)

    def log(self, level: int, message: str, **context):
        if not self.logger.isEnabledFor(level):
            return
        payload: Dict[str, Any] = {'message': message}
        if context:
            payload['context'] = context
        self.logger.log(level, payload)

    def debug(self, message: str, **context):
        self.log(logging.DEBUG, message, **context)

    def info(self, message: str, **context):
        self.log(logging.INFO, message, **context)

    def warning(self, message: str, **context):
        self.log(logging.WARNING, message, **context)

    def error(self, message: str, **context):
        self.log(logging.ERROR, message, **context)

    def critical(self, message: str, **context):
        self.log(logging.CRITICAL, message, **context)


class LogManager:
    """Process-wide handler setup for the ``cqa_trees`` logger tree."""

    _debug_enabled: Optional[bool] = None
    _initialized = False
    _log_file: Optional[Path] = None

    LEVEL_MAP = {
        'debug': logging.DEBUG,
        'info': logging.INFO,
        'warning': logging.WARNING,
        'error': logging.ERROR,
        'critical': logging.CRITICAL,
    }

    @classmethod
    def level_value(cls, level: Union[str, int]) -> int:
        if isinstance(level, int):
            return level
        try:
            return cls.LEVEL_MAP[level.lower()]
        except KeyError:
            raise ValueError(f"Invalid log level: {level}") from None

    @classmethod
    def is_debug_enabled(cls) -> bool:
        """Whether CQA_DEBUG_LOGGING (true/1/yes/on) or set_debug_logging asked for debug output."""
        if cls._debug_enabled is None:
            cls._debug_enabled = os.getenv('CQA_DEBUG_LOGGING', '').lower() in ('true', '1', 'yes', 'on')
        return cls._debug_enabled

    @classmethod
    def set_debug_logging(cls, enabled: bool):
        cls._debug_enabled = enabled
        cls.set_log_level('debug' if enabled else 'info')

    @classmethod
    def set_log_level(cls, level: Union[str, int]):
        """Apply ``level`` to the package logger and its console handler."""
        value = cls.level_value(level)
        package_logger = logging.getLogger(PACKAGE_LOGGER)
        package_logger.setLevel(value)
        for handler in package_logger.handlers:
            if not isinstance(handler, logging.FileHandler):
                handler.setLevel(value)

    @classmethod
    def configure_logging(
        cls,
        level: str = 'warning',
        logs_dir: Optional[Path] = None,
        log_file: str = 'cqa_trees.log',
    ):
        """Install the console and rotating JSON file handlers.

        Later calls only change the level, unless they name another main
        log file.

        Args:
            level: Console level (debug, info, warning, error, critical)
            logs_dir: Directory for log files, the temp log dir by default
            log_file: Name of the main log file
        """
        if cls.is_debug_enabled():
            level = 'debug'
        target = (logs_dir or get_app_log_dir()) / log_file
        if cls._initialized and target == cls._log_file:
            cls.set_log_level(level)
            return

        value = cls.level_value(level)
        package_logger = logging.getLogger(PACKAGE_LOGGER)
        package_logger.propagate = False
        for handler in list(package_logger.handlers):
            package_logger.removeHandler(handler)
            handler.close()

        console = logging.StreamHandler()
        console.setFormatter(PrettyFormatter())
        package_logger.addHandler(console)

        formatter = JsonFormatter()
        for name, file_level in FILE_HANDLERS:
            handler = logging.handlers.RotatingFileHandler(
                target.with_name(name or log_file),
                maxBytes=MAX_LOG_BYTES,
                backupCount=LOG_BACKUPS,
                delay=True,
            )
            handler.setFormatter(formatter)
            handler.setLevel(file_level)
            package_logger.addHandler(handler)

        cls.set_log_level(value)
        cls._log_file = target
        cls._initialized = True


def get_logger(name: str) -> StructuredLogger:
    """Structured logger for ``name``, configuring defaults on first use."""
    if not LogManager._initialized:
        LogManager.configure_logging()
    return StructuredLogger(name)


def set_run_id(value: Optional[str] = None) -> str:
    """Set the run id for the current context and return it."""
    value = value or uuid.uuid4().hex[:12]
    run_id.set(value)
    return value


def with_logging(func):
    """Log calls, results and failures of a service entry point at debug level.

    Failures are logged at error level and re-raised. A call made outside
    any run gets a fresh run id.
    """
    logger = get_logger(func.__module__)

    @wraps(func)
    def wrapper(*args, **kwargs):
        if not run_id.get():
            set_run_id()
        traced = logger.is_enabled_for(logging.DEBUG)
        if traced:
            logger.debug(f"Calling {func.__name__}", args=[str(a) for a in args],
                         kwargs={k: str(v) for k, v in kwargs.items()})
        try:
            result = func(*args, **kwargs)
        except Exception as e:
            logger.error(f"Error in {func.__name__}", error=str(e), error_type=type(e).__name__)
            raise
        if traced:
            logger.debug(f"Completed {func.__name__}", result=str(result))
        return result

    return wrapper
