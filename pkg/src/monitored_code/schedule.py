"""Measurement schedules: the ordered list of time-evolved measured Paulis.

Text format, earliest measurement first::

    # optional comments
    n=3
    +XXI
    -ZZX

Every op line carries an explicit ``+`` or ``-``.  :func:`dumps` writes the
canonical form (header, then one op per line, no comments), and
``dumps(loads(text)) == text`` for any canonical text.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .pauli_core import DimensionError, PauliString


class ScheduleParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class MeasurementSchedule:
    n: int
    ops: tuple[PauliString, ...] = ()

    def __post_init__(self):
        ops = tuple(self.ops)
        if self.n < 1:
            raise ValueError("schedule needs at least one qubit")
        for j, p in enumerate(ops):
            if p.n != self.n:
                raise DimensionError(f"op {j} acts on {p.n} qubits, schedule has {self.n}")
            if p.is_identity:
                raise ValueError(f"op {j} is the identity")
            if not p.is_hermitian:
                raise ValueError(f"op {j} is not Hermitian")
        object.__setattr__(self, "ops", ops)

    @classmethod
    def from_strings(cls, ops: Iterable[str], n: int | None = None) -> MeasurementSchedule:
        paulis = [PauliString.from_str(s) for s in ops]
        if n is None:
            if not paulis:
                raise ValueError("cannot infer n from an empty list")
            n = paulis[0].n
        return cls(n, tuple(paulis))

    @property
    def tau(self) -> int:
        return len(self.ops)

    def __len__(self) -> int:
        return len(self.ops)

    def __getitem__(self, j):
        return self.ops[j]

    def __iter__(self):
        return iter(self.ops)

    def prepend(self, ops: Sequence[PauliString]) -> MeasurementSchedule:
        return MeasurementSchedule(self.n, tuple(ops) + self.ops)

    def suffix(self, count: int) -> MeasurementSchedule:
        return MeasurementSchedule(self.n, self.ops[len(self.ops) - count:] if count else ())


def dumps(schedule: MeasurementSchedule) -> str:
    lines = [f"n={schedule.n}"]
    lines += [str(p) for p in schedule.ops]
    return "\n".join(lines) + "\n"


def loads(text: str) -> MeasurementSchedule:
    n = None
    ops = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            if not line.startswith("n="):
                raise ScheduleParseError("expected header 'n=<int>'", lineno)
            try:
                n = int(line[2:])
            except ValueError:
                raise ScheduleParseError(f"bad qubit count {line[2:]!r}", lineno) from None
            if n < 1:
                raise ScheduleParseError("qubit count must be positive", lineno)
            continue
        if line[0] not in "+-":
            raise ScheduleParseError(f"op {line!r} lacks a sign prefix", lineno)
        body = line[1:]
        if len(body) != n or any(c not in "IXYZ" for c in body):
            raise ScheduleParseError(f"op {line!r} is not a {n}-letter IXYZ string", lineno)
        p = PauliString.from_str(line)
        if p.is_identity:
            raise ScheduleParseError("identity op is not allowed", lineno)
        ops.append(p)
    if n is None:
        raise ScheduleParseError("missing header 'n=<int>'")
    return MeasurementSchedule(n, tuple(ops))


def read_schedule(path: str | Path) -> MeasurementSchedule:
    return loads(Path(path).read_text())


def write_schedule(schedule: MeasurementSchedule, path: str | Path) -> None:
    Path(path).write_text(dumps(schedule))
