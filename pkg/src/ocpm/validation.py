"""Input validation helpers for the estimator layer."""

from __future__ import annotations

import os
from pathlib import Path

from .exceptions import InvalidConfig
from .ocel import OCEventLog, parse_ocel_json


def check_log(X) -> OCEventLog:
    """Coerce ``X`` to an :class:`OCEventLog`.

    Accepts a log, an OCEL JSON document (bytes, or text starting with
    ``{``) or a path to an OCEL JSON file.
    """
    if isinstance(X, OCEventLog):
        return X
    if isinstance(X, (bytes, bytearray)):
        return parse_ocel_json(bytes(X))
    if isinstance(X, str) and X.lstrip().startswith("{"):
        return parse_ocel_json(X)
    if isinstance(X, (str, os.PathLike)):
        path = Path(X)
        if not path.is_file():
            raise FileNotFoundError(f"no OCEL file at {path}")
        return parse_ocel_json(path.read_bytes())
    raise TypeError(f"expected an OCEventLog, OCEL JSON or a path, got {type(X).__name__}")


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise InvalidConfig(f"{name} must be a positive integer, got {value!r}")
    return value
