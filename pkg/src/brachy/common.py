"""Common data-structures, limits and errors used throughout the workbench"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from negmas.helpers import humanize_time
from negmas.helpers.inout import dump

CONSTRUCTION_CAP = 4096
"""Largest order a ringzoo construction may produce"""
JACOBSON_DUAL_CAP = 64
"""Largest order for which the Jacobson radical is also computed through maximal left ideals"""
DEFAULT_NODE_BUDGET = 2_000_000
"""Default number of search nodes before a search gives up"""
DEFAULT_DECISION_CAP = 200_000
"""Default size of the dominated candidate set explored when deciding brachynomials"""
DEFAULT_CLOSURE_CAP = 4096
"""Default order cap for generated matrix subrings"""
SYMBOLIC_ORDER_CAP = 4
"""Largest matrix order for symbolic work"""

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

__all__ = [
    "CONSTRUCTION_CAP",
    "JACOBSON_DUAL_CAP",
    "DEFAULT_NODE_BUDGET",
    "DEFAULT_DECISION_CAP",
    "DEFAULT_CLOSURE_CAP",
    "SYMBOLIC_ORDER_CAP",
    "EXIT_PASS",
    "EXIT_CHECK_FAILED",
    "EXIT_USAGE",
    "EXIT_RESOURCE",
    "BrachyError",
    "UsageError",
    "ParseError",
    "NotARingError",
    "ResourceLimitError",
    "ReplayError",
    "ReportItem",
    "RunReport",
]


class BrachyError(Exception):
    """Base of all errors raised by the workbench"""


class UsageError(BrachyError, ValueError):
    """The caller passed something the operation cannot accept"""


class ParseError(UsageError):
    """A syntax error in one of the textual languages (polynomials, S-terms, formulas, zoo expressions)"""

    def __init__(self, message: str, text: str = "", position: int = 0):
        self.text = text
        self.position = position
        if text:
            message = f"{message} at position {position}\n  {text}\n  {' ' * position}^"
        super().__init__(message)


class NotARingError(UsageError):
    """An operation proved for rings only was given a structure that is not a ring"""


class ResourceLimitError(BrachyError):
    """A configured cap or budget was exceeded.

    Args:
        what: What was being computed
        cap: The limit that was hit
        partial: Anything computed before giving up (statistics, partial results)
    """

    def __init__(self, what: str, cap: Union[int, float], partial: Any = None):
        self.what = what
        self.cap = cap
        self.partial = partial
        super().__init__(f"{what}: limit of {cap} exceeded")


class ReplayError(BrachyError):
    """A certificate did not re-derive its conclusion from its premises"""


@dataclass
class ReportItem:
    name: str
    """Name of the checked item"""
    passed: bool
    """Did the check pass?"""
    detail: Dict[str, Any] = field(default_factory=dict)
    """Deterministic key/value details printed under the item"""

    @property
    def status(self) -> str:
        return "pass" if self.passed else "FAIL"


@dataclass
class RunReport:
    """The outcome of one command: items, counters and (non-deterministic) statistics"""

    command: str
    """The command line echo"""
    items: List[ReportItem] = field(default_factory=list)
    """Per-item status"""
    counters: Dict[str, int] = field(default_factory=dict)
    """Deterministic counters"""
    stats: Dict[str, Any] = field(default_factory=dict)
    """Search statistics and timings. The only section allowed to differ between identical runs"""
    exit_code: Optional[int] = None
    """Exit code. If not set explicitly, it is derived from the items"""

    def add(self, name: str, passed: bool, **detail) -> ReportItem:
        item = ReportItem(name=name, passed=bool(passed), detail=detail)
        self.items.append(item)
        return item

    def count(self, key: str, n: int = 1) -> None:
        self.counters[key] = self.counters.get(key, 0) + n

    @property
    def passed(self) -> bool:
        return all(_.passed for _ in self.items)

    @property
    def code(self) -> int:
        if self.exit_code is not None:
            return self.exit_code
        return EXIT_PASS if self.passed else EXIT_CHECK_FAILED

    def lines(self) -> List[str]:
        """Renders the report as line oriented key/value text"""
        out = [f"command: {self.command}"]
        for item in self.items:
            out.append(f"{item.name}: {item.status}")
            for k, v in item.detail.items():
                out.append(f"  {k}: {v}")
        for k in sorted(self.counters.keys()):
            out.append(f"{k}: {self.counters[k]}")
        out.append(f"exit_code: {self.code}")
        if self.stats:
            out.append("[stats]")
            for k, v in self.stats.items():
                if k == "wall_time":
                    v = humanize_time(v)
                out.append(f"{k}: {v}")
        return out

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            command=self.command,
            items=[
                dict(name=_.name, status=_.status, detail={k: str(v) for k, v in _.detail.items()})
                for _ in self.items
            ],
            counters=dict(self.counters),
            stats={k: str(v) if not isinstance(v, (int, float)) else v for k, v in self.stats.items()},
            exit_code=self.code,
        )

    def save(self, path: Union[str, Path]) -> None:
        """Saves a machine readable copy (json or yaml depending on the extension)"""
        dump(self.to_dict(), Path(path))

    def __str__(self):
        return "\n".join(self.lines())
