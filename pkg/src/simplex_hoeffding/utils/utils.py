"""
Implements utility functions to parse command line vectors, read the environment configuration and turn results into
plain JSON/CSV friendly values.
"""

import math
import os
from enum import Enum
from typing import Any, Optional

import numpy as np

ENUM_BUDGET_ENV = "SIMPLEX_HOEFFDING_ENUM_BUDGET"
DEFAULT_ENUMERATION_BUDGET = 20_000_000


def get_enumeration_budget(budget: Optional[int] = None) -> int:
    """
    Resolve the lattice enumeration budget. An explicit budget wins over the environment variable, which wins over
    DEFAULT_ENUMERATION_BUDGET.
    """
    if budget is not None:
        return int(budget)
    env_value = os.environ.get(ENUM_BUDGET_ENV)
    if env_value:
        try:
            return int(float(env_value))
        except ValueError:
            raise ValueError(f"{ENUM_BUDGET_ENV} must be an integer, got {env_value!r}") from None
    return DEFAULT_ENUMERATION_BUDGET


def parse_vector(text: str, dtype: type = float) -> np.ndarray:
    """Parse a comma separated list of decimals, e.g. '0.3,0.3'.

    Parameters
    ----------
    text : str
        Comma separated values. Whitespace around entries is ignored.
    dtype : type
        float or int.

    Returns
    -------
    np.ndarray
        One dimensional array.
    """
    entries = [entry.strip() for entry in str(text).split(",")]
    if not entries or any(entry == "" for entry in entries):
        raise ValueError(f"Cannot parse vector from {text!r}")
    if dtype is int:
        values = []
        for entry in entries:
            value = float(entry)
            if not value.is_integer():
                raise ValueError(f"Expected an integer, got {entry!r}")
            values.append(int(value))
        return np.array(values, dtype=np.int64)
    return np.array([float(entry) for entry in entries], dtype=np.float64)


def format_float(value: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(float(value), ".17g")


def to_jsonable(obj: Any) -> Any:
    """
    Recursively converts numpy values, enums and tuples into JSON types. Non-finite floats become None since JSON has
    no representation for them.
    """
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(value) for value in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj
