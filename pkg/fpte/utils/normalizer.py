import math
import re

import numpy as np


def format_float(value):
    """Shortest round-tripping text for a finite float."""
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {value!r}")
    return repr(value)


def format_cell(value):
    """Text for one table cell; floats use repr, everything else str."""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def normalize_key(text):
    """Config keys: lower case, runs of spaces or dashes become underscores"""
    if not text:
        return ""
    return re.sub(r"[\s\-]+", "_", text.strip().lower())
