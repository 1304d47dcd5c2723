"""Settings files and logging setup for the command-line tools.

A settings file supplies default values for command-line flags. Two
formats are accepted:

- YAML (``.yaml`` / ``.yml``): a mapping of flag names to values, with
  ``${VAR}`` and ``${VAR:-default}`` expanded from the environment before
  parsing. An optional ``logging`` section (level, format, file)
  configures the root logger.
- Plain text: one ``key=value`` per line, ``#`` starts a comment.

Keys are flag names without the leading dashes; ``max-iters`` and
``max_iters`` are equivalent.
"""

import logging
import os
import re
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

logger = logging.getLogger(__name__)

DEFAULT_LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

_ENV_PATTERN = re.compile(r"\$\{([^}:]+)(?::-([^}]*))?\}")


def expand_env_vars(content: str) -> str:
    """Replace ``${VAR}`` / ``${VAR:-default}`` with environment values."""

    def replacer(match):
        return os.environ.get(match.group(1), match.group(2) or "")

    return _ENV_PATTERN.sub(replacer, content)


def _normalize_key(key: str) -> str:
    return str(key).strip().lstrip("-").replace("-", "_")


def _parse_key_value(content: str, path: Path) -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for number, raw in enumerate(content.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"{path}:{number}: expected key=value, got '{raw.strip()}'")
        values[_normalize_key(key)] = value.strip()
    return values


def load_settings(config_path: str) -> Dict[str, Any]:
    """Load a settings file into a flat dict keyed by normalized flag names.

    The ``logging`` section of a YAML file is returned unchanged under the
    ``logging`` key.

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: On malformed content
    """
    path = Path(config_path)
    if not path.exists():
        raise FileNotFoundError(f"Settings file not found: {config_path}")

    content = path.read_text()
    if path.suffix.lower() in (".yaml", ".yml"):
        try:
            data = yaml.safe_load(expand_env_vars(content)) or {}
        except yaml.YAMLError as e:
            raise ValueError(f"{path}: invalid YAML: {e}")
        if not isinstance(data, dict):
            raise ValueError(f"{path}: expected a mapping at the top level")
        log_config = data.pop("logging", None)
        values = {_normalize_key(k): v for k, v in data.items()}
        if log_config is not None:
            values["logging"] = log_config
    else:
        values = _parse_key_value(content, path)

    logger.debug(f"Loaded {len(values)} setting(s) from {path}")
    return values


def setup_logging(log_config: Optional[Dict[str, Any]] = None, verbose: bool = False) -> None:
    """Configure the root logger.

    Args:
        log_config: Optional mapping with ``level``, ``format`` and ``file``
        verbose: Force DEBUG level
    """
    log_config = log_config or {}
    level = logging.DEBUG if verbose else getattr(logging, str(log_config.get("level", "INFO")).upper())
    log_format = log_config.get("format", DEFAULT_LOG_FORMAT)

    logging.basicConfig(level=level, format=log_format)
    logging.getLogger().setLevel(level)

    if log_file := log_config.get("file"):
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(log_path)
        handler.setFormatter(logging.Formatter(log_format))
        logging.getLogger().addHandler(handler)
