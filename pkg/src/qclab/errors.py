"""
Exceptions raised by qclab.

Every error carries a stable ``code`` (used in machine-readable CLI error
objects) and an ``exit_status`` used by the CLI.
"""

from typing import Any, Dict, Optional


class QclabError(Exception):
    """Base exception for all qclab errors."""

    code = "qclab_error"
    exit_status = 2

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = dict(details or {})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "type": type(self).__name__,
            "code": self.code,
            "message": self.message,
            "details": self.details,
        }


# Lie algebra input and structure

class MalformedSpec(QclabError):
    code = "malformed_spec"


class JacobiViolation(QclabError):
    code = "jacobi_violation"


class AntisymmetryViolation(QclabError):
    code = "antisymmetry_violation"


class DimensionMismatch(QclabError):
    code = "dimension_mismatch"


class NotNilpotent(QclabError):
    code = "not_nilpotent"


class NotBracketGenerating(QclabError):
    code = "not_bracket_generating"


class Unsupported(QclabError):
    code = "unsupported"


class ZeroVector(QclabError):
    code = "zero_vector"


class InvalidGroupSpec(QclabError):
    code = "invalid_group_spec"


class InvalidFixture(QclabError):
    code = "invalid_fixture"


# Graph laboratory

class InvalidGraph(QclabError):
    code = "invalid_graph"


class InvalidMetric(QclabError):
    code = "invalid_metric"


class InvalidCapacitor(QclabError):
    code = "invalid_capacitor"


class EmptyCloud(QclabError):
    code = "empty_cloud"


class DisconnectedNet(QclabError):
    code = "disconnected_net"


class TooLargeForExact(QclabError):
    code = "too_large_for_exact"


class BadExponent(QclabError):
    code = "bad_exponent"


class BadRadii(QclabError):
    code = "bad_radii"


class OverlappingSets(QclabError):
    code = "overlapping_sets"


class NoInfinityBoundary(QclabError):
    code = "no_infinity_boundary"


class WindowTooShort(QclabError):
    code = "window_too_short"


class EmptySample(QclabError):
    code = "empty_sample"


class SolverDiverged(QclabError):
    code = "solver_diverged"
    exit_status = 3


# Command line

class ConfigError(QclabError):
    code = "config_error"
