"""Utility functions and helpers."""

import hashlib
import json
import time
from pathlib import Path
from typing import Any, Iterable, Optional, Tuple

from .exceptions import ValidationError
from .logging import get_logger

logger = get_logger('cqa_trees.utils')

def find_project_root() -> Path:
    """Find the project root directory by looking for .env, config.yml or setup.py.

    Returns:
        Path to project root directory
    """
    current = Path.cwd()
    while current != current.parent:
        for marker in ('.env', 'config.yml', 'setup.py'):
            if (current / marker).exists():
                logger.debug(f"Found {marker} in: {current}")
                return current
        current = current.parent

    logger.debug(f"No project root found, returning cwd: {Path.cwd()}")
    return Path.cwd()

def digest(*args, **kwargs) -> str:
    """Stable sha256 hex digest of JSON-serializable arguments.

    Args:
        *args: Positional values to include
        **kwargs: Keyword values to include

    Returns:
        Hex digest string
    """
    key_str = json.dumps({'args': args, 'kwargs': kwargs}, sort_keys=True, default=str)
    return hashlib.sha256(key_str.encode()).hexdigest()

def read_text_argument(value: str) -> str:
    """Return the contents of ``value`` if it names a file, else ``value`` itself."""
    candidate = Path(value)
    try:
        if candidate.is_file():
            return candidate.read_text(encoding='utf-8')
    except OSError:
        pass
    return value

def validate_required(value: Any, name: str):
    """Validate required field is not None or empty.

    Raises:
        ValidationError: If validation fails
    """
    if value is None or (isinstance(value, (str, list, dict, tuple)) and not value):
        raise ValidationError(f"{name} is required")

def validate_enum(value: Any, name: str, valid_values: Iterable[Any]):
    """Validate value is one of allowed values.

    Raises:
        ValidationError: If validation fails
    """
    valid = tuple(valid_values)
    if value not in valid:
        raise ValidationError(
            f"Invalid {name}. Must be one of: {', '.join(str(v) for v in valid)}"
        )

def is_subset_chain(sets: Iterable[frozenset]) -> Optional[Tuple[frozenset, frozenset]]:
    """Check that ``sets`` are pairwise comparable under inclusion.

    Returns:
        None if they form a chain, otherwise one incomparable pair
    """
    ordered = sorted(sets, key=len)
    for smaller, larger in zip(ordered, ordered[1:]):
        if not smaller <= larger:
            return smaller, larger
    return None

class Timer:
    """Context manager for timing code execution."""

    def __init__(self, name: str, level: str = 'debug'):
        """Initialize timer.

        Args:
            name: Name for logging
            level: Level of the completion record
        """
        self.name = name
        self.level = level
        self.start_time: Optional[float] = None
        self.elapsed: float = 0.0
        self.logger = get_logger('cqa_trees.timer')

    def __enter__(self):
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, *args):
        self.elapsed = time.perf_counter() - (self.start_time or 0.0)
        getattr(self.logger, self.level)(
            f"{self.name} completed",
            elapsed_seconds=round(self.elapsed, 6)
        )
