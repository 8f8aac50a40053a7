"""
Error types shared by the library modules and the command-line front-end.

Every error carries an ``exit_code`` and a human readable ``detail`` so the
front-end can map failures onto process exit statuses without inspecting
messages.
"""
from typing import Optional


class CanrpError(Exception):
    """Base class for all expected failures."""

    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "detail": self.detail, "exit_code": self.exit_code}


class InputError(CanrpError):
    """Malformed input: bad JSON, invalid structure, kind or size mismatch."""

    exit_code = 1


class VerificationFailure(CanrpError):
    """A counterexample was found.

    ``result`` and ``stats`` hold the full report of the failed check so the
    front-end can still emit it.
    """

    exit_code = 2

    def __init__(self, detail: str, result: Optional[dict] = None, stats: Optional[dict] = None, status: str = "fails"):
        super().__init__(detail)
        self.result = result if result is not None else {}
        self.stats = stats if stats is not None else {}
        self.status = status

    def to_dict(self) -> dict:
        data = super().to_dict()
        data["status"] = self.status
        return data


class BudgetExceededError(CanrpError):
    """A coloring, search or size cap was hit before the answer was known."""

    exit_code = 3

    def __init__(self, detail: str, reached: int = 0, limit: int = 0):
        super().__init__(detail)
        self.reached = reached
        self.limit = limit

    def to_dict(self) -> dict:
        data = super().to_dict()
        data.update({"reached": self.reached, "limit": self.limit})
        return data


class InternalInconsistencyError(CanrpError):
    """A postcondition guaranteed by a construction did not hold."""

    exit_code = 2


class ClosureError(InternalInconsistencyError):
    """The Pos closure of a cocone is not a valid Pos cocone."""


class ClassOverlapError(InternalInconsistencyError):
    """Transferred color classes intersect."""

    def __init__(self, detail: str, first: int = -1, second: int = -1):
        super().__init__(detail)
        self.first = first
        self.second = second
