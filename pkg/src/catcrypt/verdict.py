from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Verdict:
    """Outcome of a decision procedure; ``witness`` is set exactly when it fails."""

    holds: bool
    witness: dict[str, Any] | None = field(default=None)

    def __bool__(self):
        return self.holds

    @classmethod
    def ok(cls):
        return cls(True, None)

    @classmethod
    def fail(cls, **witness):
        return cls(False, witness)
