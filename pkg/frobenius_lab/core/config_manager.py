import json
import logging
import os
from dataclasses import dataclass, fields, replace

from frobenius_lab.core.errors import InvalidParameter


@dataclass(frozen=True)
class Limits:
    """Caps that keep exhaustive constructions bounded.

    Attributes:
        max_enumeration_size (int): Largest lattice size ``enumerate_lattices`` accepts.
        sweep_max_size (int): Largest size the theorem sweep accepts.
        hom_cap (int): Maximum number of maps in a hom-lattice or tensor lattice.
        search_cap (int): Largest carrier for the unitless Frobenius search.
        rel_cap (int): Largest universe for the Rel witness search.
        totally_below_cap (int): Largest lattice for the subset scan of the totally below relation.
        boolean_max_rank (int): Largest ``k`` accepted by ``boolean(k)``.
        permutation_cap (int): Maximum relabelings tried by ``canonical_code``.
        max_lattice_size (int): Largest lattice ``chain`` and ``product`` build.
    """
    max_enumeration_size: int = 7
    sweep_max_size: int = 6
    hom_cap: int = 100_000
    search_cap: int = 24
    rel_cap: int = 8
    totally_below_cap: int = 20
    boolean_max_rank: int = 6
    permutation_cap: int = 1_000_000
    max_lattice_size: int = 256

    def override(self, **values):
        """Returns a copy with the non-None ``values`` replaced."""
        return replace(self, **{k: v for k, v in values.items() if v is not None})


DEFAULT_LIMITS = Limits()


def read_app_config(config_path=None):
    """Reads the app config, or returns an empty one when the file is absent.

    Raises:
        InvalidParameter: When the file holds anything but a JSON object.
    """
    if config_path is None:
        config_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), '../../app_config.json')
    if not os.path.exists(config_path):
        return {}
    with open(config_path, 'r') as f:
        config = json.load(f)
    if not isinstance(config, dict):
        raise InvalidParameter(f"App config must be a JSON object, got {type(config).__name__}")
    return config


def get_log_level_from_config(config):
    """Unknown level names fall back to INFO; numeric levels must be standard ones."""
    level = config.get('log_level', 'INFO')
    if isinstance(level, int) and not isinstance(level, bool):
        if level not in (logging.DEBUG, logging.INFO, logging.WARNING, logging.ERROR, logging.CRITICAL):
            raise InvalidParameter(f"log_level {level} is not a standard logging level")
        return level
    if not isinstance(level, str):
        raise InvalidParameter(f"log_level must be a level name, got {level!r}")
    return getattr(logging, level.upper(), logging.INFO)


def get_log_dir_from_config(config):
    log_dir = config.get('log_dir')
    if log_dir is not None and not isinstance(log_dir, str):
        raise InvalidParameter(f"log_dir must be a path or null, got {log_dir!r}")
    return log_dir


def get_cache_capacity_from_config(config, default=64):
    capacity = config.get('cache_capacity', default)
    if not isinstance(capacity, int) or isinstance(capacity, bool) or capacity < 0:
        raise InvalidParameter(f"cache_capacity must be a non-negative integer, got {capacity!r}")
    return capacity


def get_limits_from_config(config):
    """Builds :class:`Limits` from the ``limits`` section of the app config.

    Raises:
        InvalidParameter: On unknown keys or non-positive values.
    """
    section = config.get('limits') or {}
    if not isinstance(section, dict):
        raise InvalidParameter(f"limits must be an object, got {section!r}")
    known = {f.name for f in fields(Limits)}
    unknown = sorted(set(section) - known)
    if unknown:
        raise InvalidParameter(f"Unknown limits in config: {unknown}")
    for key, value in section.items():
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise InvalidParameter(f"Limit {key} must be a positive integer, got {value!r}")
    return replace(DEFAULT_LIMITS, **section)


def get_workers_from_config(config):
    workers = config.get('workers', 1)
    if not isinstance(workers, int) or isinstance(workers, bool) or workers < 1:
        raise InvalidParameter(f"workers must be a positive integer, got {workers!r}")
    return workers
