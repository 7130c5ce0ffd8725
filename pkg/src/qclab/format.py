"""
Rendering utilities for qclab reports.

Reports are rendered as YAML with sorted keys and fixed scalar formatting so
that the same input always produces byte-identical output:

- rationals as "p/q" (the denominator is always written)
- floats with 17 significant digits and a decimal point
- infinities as "inf"
- enums by value

The module also keeps a small safe template formatter used for the
human-readable explanations attached to verdicts.
"""

import dataclasses
import logging
import math
import re
from enum import Enum
from fractions import Fraction
from typing import Any, Dict

import numpy as np
import yaml
from pydantic import BaseModel

logger = logging.getLogger("qclab.format")


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def format_float(value: float) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = format(value, ".17g")
    if "." in text:
        return text
    if "e" in text:
        mantissa, exponent = text.split("e", 1)
        return f"{mantissa}.0e{exponent}"
    return f"{text}.0"


def to_plain(obj: Any) -> Any:
    """Convert a report object into plain YAML-safe data."""
    if isinstance(obj, BaseModel):
        return to_plain(obj.model_dump())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Enum):
        return to_plain(obj.value)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [to_plain(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (frozenset, set)):
        return [to_plain(x) for x in sorted(obj)]
    if isinstance(obj, (list, tuple)):
        return [to_plain(x) for x in obj]
    logger.warning(f"Rendering unknown type {type(obj).__name__} as text")
    return str(obj)


class ReportDumper(yaml.SafeDumper):
    pass


def _represent_float(dumper: yaml.SafeDumper, value: float):
    text = format_float(value)
    if text in ("inf", "-inf", "nan"):
        return dumper.represent_scalar("tag:yaml.org,2002:str", text)
    return dumper.represent_scalar("tag:yaml.org,2002:float", text)


ReportDumper.add_representer(float, _represent_float)


def render_report(report: Any) -> str:
    """Serialize a report deterministically."""
    return yaml.dump(
        to_plain(report),
        Dumper=ReportDumper,
        sort_keys=True,
        default_flow_style=False,
        allow_unicode=True,
    )


def fill(template: str, context: Dict[str, Any], default: str = "?") -> str:
    """
    Fill ``{placeholders}`` in a template from a context dictionary.

    Missing keys are replaced by ``default`` and logged instead of raising,
    so an explanation is always produced.
    """
    if not template:
        return template

    result = template
    for placeholder in re.findall(r'\{([^{}]*)\}', template):
        key = placeholder.split(':', 1)[0]
        if key in context:
            value = context[key]
            if isinstance(value, Enum):
                value = value.value
            value_str = value if isinstance(value, str) else str(value)
        else:
            logger.warning(f"Missing key '{key}' while filling template")
            value_str = default
        result = result.replace(f"{{{placeholder}}}", value_str)

    return result
