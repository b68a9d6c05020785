"""Per-component energy and exergy bookkeeping."""
from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class Ledger:
    """Labelled input and output entries, in joules."""

    inputs: list[tuple[str, float]] = field(default_factory=list)
    outputs: list[tuple[str, float]] = field(default_factory=list)

    def add_in(self, label: str, value: float) -> None:
        self._check(label, value)
        self.inputs.append((label, float(value)))

    def add_out(self, label: str, value: float) -> None:
        self._check(label, value)
        self.outputs.append((label, float(value)))

    @staticmethod
    def _check(label, value):
        if not math.isfinite(value):
            raise ValueError(f"non-finite ledger entry {label!r}: {value}")

    @property
    def total_in(self) -> float:
        return math.fsum(v for _, v in self.inputs)

    @property
    def total_out(self) -> float:
        return math.fsum(v for _, v in self.outputs)

    def get(self, label: str) -> float:
        """Sum of all entries (either side) carrying *label*; 0 if absent."""
        return math.fsum(v for k, v in self.inputs + self.outputs if k == label)

    def __bool__(self):
        return bool(self.inputs or self.outputs)


@dataclass
class ComponentReport:
    component: str
    energy: Ledger = field(default_factory=Ledger)
    exergy: Ledger = field(default_factory=Ledger)
    aux: dict = field(default_factory=dict)

    @property
    def energy_loss(self) -> float:
        return self.energy.total_in - self.energy.total_out

    @property
    def exergy_destruction(self) -> float:
        return self.exergy.total_in - self.exergy.total_out
