"""
Error hierarchy

Every error carries the process exit code the CLI reports for it and a
`detail` mapping that ends up in the structured log record.
"""
from typing import Any, Dict, List, Optional, Sequence

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VERIFICATION = 3


class TachyonError(Exception):
    """Base class for all package errors"""

    exit_code: int = EXIT_USAGE

    def __init__(self, message: str, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}

    def __str__(self) -> str:
        return self.message


# ============= Physics / numerics =============
class DomainError(TachyonError, ValueError):
    """Argument outside the domain of a physical formula (non-real result)"""


class NonEvaluableError(TachyonError):
    """Evaluation failed at every rung of the precision ladder"""


class TangencyError(TachyonError):
    """A null-cone root is degenerate (tangent) at the working precision"""


class AmbiguousRootCount(TangencyError):
    """β lies within the tangency threshold of a singular velocity"""

    def __init__(self, beta: str, candidates: Sequence[int]):
        super().__init__(
            f"Root count at beta={beta} is ambiguous: {candidates[0]} or {candidates[1]}",
            {"beta": beta, "candidates": list(candidates)},
        )
        self.candidates = tuple(candidates)


class CerenkovSingularityError(TachyonError):
    """|K| fell below the floor; the field diverges at finite distance"""

    def __init__(self, k_factor: str, magnitude: str):
        super().__init__(
            f"Cerenkov singularity: |K|={k_factor}, field magnitude ~{magnitude}",
            {"k_factor": k_factor, "magnitude": magnitude},
        )


class OracleInvalidError(TachyonError):
    """The finite-difference stencil jumped to a different retardation root"""


class NoBoundOrbitError(TachyonError):
    """Z(β) ≤ 0: the self-force is not attractive, no helical orbit exists"""

    def __init__(self, beta: str, z_value: str):
        super().__init__(
            f"No bound orbit at beta={beta}: Z={z_value} is not attractive",
            {"beta": beta, "z_value": z_value},
        )


class TurningPointError(TachyonError):
    """Momentum at or below m0·c has no tachyonic speed"""


class IllPosedError(TachyonError):
    """Initial conditions admit no real incident motion"""


# ============= Surface =============
class ConfigurationError(TachyonError):
    """Invalid flags or configuration file content"""


class OutputError(TachyonError):
    """A result or config file could not be read or written"""

    exit_code = EXIT_IO


class VerificationFailed(TachyonError):
    """One or more acceptance checks failed"""

    exit_code = EXIT_VERIFICATION

    def __init__(self, failures: List[str]):
        super().__init__(
            f"{len(failures)} verification check(s) failed: {', '.join(failures)}",
            {"failures": failures},
        )
        self.failures = failures
