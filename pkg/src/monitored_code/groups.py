"""Stabilizer and logical groups of a schedule, built by generator recursion.

Both groups obey the same update when P_t is measured: keep the elements
that commute with P_t and add P_t.  At the level of generators, the
commuting part of a group is found by picking the first generator that
anticommutes with P_t and multiplying it into every other anticommuting
generator; the products commute with P_t, and together with the untouched
generators they span an index-2 subgroup, which is exactly the commuting
part.  The pivot itself is dropped.

Groups here are unsigned; outcome-dependent signs come from the tableau.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .pauli_core import (
    Gf2RowSpace,
    PauliString,
    bits_of,
    embed,
    kernel_basis,
    symplectic_product,
)
from .schedule import MeasurementSchedule
from .tableau import StabilizerTableau


class NotAStabilizer(ValueError):
    pass


def _swap_halves(v: int, n: int) -> int:
    full = (1 << n) - 1
    return ((v & full) << n) | (v >> n)


@dataclass(frozen=True)
class PauliGroupGens:
    n: int
    gens: tuple[int, ...]  # symplectic vectors x | z << n
    echelon: Gf2RowSpace = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        if self.echelon is None:
            object.__setattr__(self, "echelon", Gf2RowSpace(2 * self.n, self.gens))

    @classmethod
    def from_paulis(cls, n: int, paulis: Iterable[PauliString]) -> PauliGroupGens:
        space = Gf2RowSpace(2 * n)
        gens = tuple(p.symplectic for p in paulis if space.insert(p.symplectic))
        return cls(n, gens, space)

    def paulis(self) -> list[PauliString]:
        return [PauliString.from_symplectic(self.n, v) for v in self.gens]

    @property
    def rank(self) -> int:
        return len(self.gens)

    def contains(self, p: PauliString) -> bool:
        return self.echelon.contains(p.symplectic)

    __contains__ = contains

    def same_group(self, other: PauliGroupGens) -> bool:
        return (self.n == other.n and self.rank == other.rank
                and all(other.echelon.contains(v) for v in self.gens))

    def elements(self) -> Iterator[PauliString]:
        for v in self.echelon.elements():
            yield PauliString.from_symplectic(self.n, v)

    def is_abelian(self) -> bool:
        g = self.gens
        return all(symplectic_product(g[i], g[j], self.n) == 0
                   for i in range(len(g)) for j in range(i))

    def __str__(self) -> str:
        return "<" + ", ".join(p.letters() for p in self.paulis()) + ">"


def _update(gens: list[int], p: int, n: int) -> list[int]:
    gens = list(gens)
    anti = [i for i, g in enumerate(gens) if symplectic_product(g, p, n)]
    if anti:
        pivot = gens[anti[0]]
        for i in anti[1:]:
            gens[i] ^= pivot
        del gens[anti[0]]
    if not Gf2RowSpace(2 * n, gens).contains(p):
        gens.append(p)
    return gens


def _full_group(n: int) -> list[int]:
    return [1 << q for q in range(n)] + [1 << (n + q) for q in range(n)]


def commutant_vectors(gens: Iterable[int], n: int) -> list[int]:
    return kernel_basis((_swap_halves(g, n) for g in gens), 2 * n)


def stabilizer_history(schedule: MeasurementSchedule) -> list[PauliGroupGens]:
    """Stab after each measurement: entry t-1 is the group after P_t."""
    n = schedule.n
    gens: list[int] = []
    out = []
    for p in schedule.ops:
        gens = _update(gens, p.symplectic, n)
        out.append(PauliGroupGens(n, tuple(gens)))
    return out


def logical_history(schedule: MeasurementSchedule) -> list[PauliGroupGens]:
    """Logic after each measurement, seeded by the commutant of P_1."""
    n = schedule.n
    out = []
    gens: list[int] = []
    for t, p in enumerate(schedule.ops):
        if t == 0:
            gens = commutant_vectors([p.symplectic], n)
        else:
            gens = _update(gens, p.symplectic, n)
        out.append(PauliGroupGens(n, tuple(gens)))
    return out


def build_stabilizer(schedule: MeasurementSchedule) -> PauliGroupGens:
    hist = stabilizer_history(schedule)
    return hist[-1] if hist else PauliGroupGens(schedule.n, ())


def build_logical(schedule: MeasurementSchedule) -> PauliGroupGens:
    hist = logical_history(schedule)
    return hist[-1] if hist else PauliGroupGens(schedule.n, tuple(_full_group(schedule.n)))


def commutant(group: PauliGroupGens) -> PauliGroupGens:
    return PauliGroupGens(group.n, tuple(commutant_vectors(group.gens, group.n)))


def contains(group: PauliGroupGens, p: PauliString) -> bool:
    return group.contains(p)


def logical_qubit_count(schedule: MeasurementSchedule) -> int:
    diff = build_logical(schedule).rank - build_stabilizer(schedule).rank
    assert diff % 2 == 0
    return diff // 2


def signed_eigenvalue(p: PauliString, stabilizer: PauliGroupGens, tableau: StabilizerTableau,
                      positions=None) -> int:
    """Eigenvalue of the post-measurement state under the stabilizer ``p``."""
    if not stabilizer.contains(p):
        raise NotAStabilizer(f"{p.letters()} is not in {stabilizer}")
    q = p.unsigned()
    if positions is not None or tableau.n != p.n:
        q = embed(q, tableau.n, positions if positions is not None else range(p.n))
    value = tableau.expectation(q)
    if value == 0:
        raise NotAStabilizer(f"{p.letters()} has no definite value in the tableau")
    return value


def logical_pairs(schedule: MeasurementSchedule) -> list[tuple[PauliString, PauliString]]:
    """Best-effort conjugate pairs (X_bar, Z_bar) spanning the logicals modulo stabilizers."""
    n = schedule.n
    rest = list(build_logical(schedule).gens)
    pairs = []
    while rest:
        a = rest.pop(0)
        partner = next((i for i, b in enumerate(rest) if symplectic_product(a, b, n)), None)
        if partner is None:
            continue
        b = rest.pop(partner)
        new = []
        for c in rest:
            ca, cb = symplectic_product(c, a, n), symplectic_product(c, b, n)
            if ca:
                c ^= b
            if cb:
                c ^= a
            new.append(c)
        rest = new
        pairs.append((PauliString.from_symplectic(n, a), PauliString.from_symplectic(n, b)))
    return pairs
