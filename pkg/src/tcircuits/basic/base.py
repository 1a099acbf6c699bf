from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..signals import Execution, Signal
from ..strategy import AdversaryStrategy
from ..timebase import ZERO, Interval, Time


class ConfigurationError(ValueError):
    """A module kind or parameter set is not recognised."""


class InterfaceError(ValueError):
    """Two modules that must share ports do not."""


@dataclass(frozen=True)
class Verdict:
    feasible: bool
    reason: str = ""
    witness: Time | None = None
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.feasible

    @classmethod
    def ok(cls, **detail) -> "Verdict":
        return cls(True, detail=detail)

    @classmethod
    def fail(cls, reason: str, witness: Time | None = None, **detail) -> "Verdict":
        return cls(False, reason, witness, detail)


class ModuleSpec:
    """Input/output specification of a module.

    ``check`` decides whether the execution is correct during ``interval``.
    Signals in the execution may extend beyond the interval; modules whose
    output depends on recent input history may look back into that context.
    Generatable modules also implement ``generate``.
    """

    kind = "module"
    name = "module"
    inputs: tuple = ()
    outputs: tuple = ()
    generatable = True
    stateful = False

    def check(self, execution: Execution, interval: Interval) -> Verdict:
        raise NotImplementedError

    def generate(
        self,
        inputs: Mapping[str, Signal],
        strategy: AdversaryStrategy,
        interval: Interval,
        init=None,
        key: str = "",
    ) -> dict:
        raise NotImplementedError(f"{self.name} has no output generator")

    def min_lag(self, strategy: AdversaryStrategy | None = None) -> Time:
        """Guaranteed positive response time of the outputs to the inputs."""
        return ZERO

    def params(self) -> dict:
        return {}

    def onset_offsets(self) -> tuple:
        """Lengths ``c`` such that suffix feasibility may switch at ``e - c`` for an
        event time ``e`` (phase lengths, settling delays); empty if only at events."""
        return ()

    def __repr__(self):
        ps = ", ".join(f"{k}={v}" for k, v in self.params().items())
        return f"{type(self).__name__}({ps})"


def check_ports(spec: ModuleSpec, execution: Execution):
    missing = [p for p in (*spec.inputs, *spec.outputs) if p not in execution]
    if missing:
        raise InterfaceError(f"{spec.name}: execution lacks ports {missing}")
