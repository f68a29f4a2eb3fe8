"""Stabilizer simulation of possibly-mixed states by a signed generator list.

The generators are stored column-major: for each qubit ``j`` the integers
``xcols[j]`` and ``zcols[j]`` hold bit ``r`` of generator ``r``.  A Clifford
gate then costs a handful of big-integer operations regardless of how many
generators there are, which is what makes brickwork circuits cheap.

There are no destabilizers.  Deterministic measurement outcomes are found by
solving for the measured Pauli in the generator span on demand.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .pauli_core import (
    Gf2RowSpace,
    PauliString,
    SignVector,
    SubsystemMask,
    bits_of,
    embed,
    multiply,
)
from .schedule import MeasurementSchedule


class ImpossibleOutcome(RuntimeError):
    """A forced outcome contradicts a deterministic measurement."""


def _transpose(cols: Sequence[int], nrows: int) -> list[int]:
    """Turn column bitmasks into row bitmasks (row bit k = column k)."""
    if nrows == 0:
        return []
    if not cols:
        return [0] * nrows
    nbytes = (nrows + 7) // 8
    buf = b"".join(c.to_bytes(nbytes, "little") for c in cols)
    arr = np.frombuffer(buf, dtype=np.uint8).reshape(len(cols), nbytes)
    bits = np.unpackbits(arr, axis=1, bitorder="little")[:, :nrows]
    packed = np.packbits(np.ascontiguousarray(bits.T), axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _qubit_list(qubits) -> list[int]:
    if isinstance(qubits, SubsystemMask):
        return list(qubits.members)
    return list(qubits)


class PauliTable:
    """A list of signed Hermitian Paulis stored column-major.

    Gates act by conjugation on every row at once.  Rows need not commute;
    :class:`StabilizerTableau` adds that requirement.
    """

    def __init__(self, n: int):
        self.n = n
        self.xcols = [0] * n
        self.zcols = [0] * n
        self.signs = 0
        self.nrows = 0

    def copy(self):
        new = object.__new__(type(self))
        new.__dict__.update(self.__dict__)
        new.xcols = list(self.xcols)
        new.zcols = list(self.zcols)
        return new

    def _touch(self):
        pass

    # rows --------------------------------------------------------------------
    def append(self, p: PauliString) -> int:
        if p.n != self.n:
            raise ValueError(f"{p.n}-qubit Pauli on {self.n}-qubit table")
        if not p.is_hermitian:
            raise ValueError("only Hermitian Paulis can be stored")
        bit = 1 << self.nrows
        for j in bits_of(p.x):
            self.xcols[j] |= bit
        for j in bits_of(p.z):
            self.zcols[j] |= bit
        if p.phase == 2:
            self.signs |= bit
        self.nrows += 1
        self._touch()
        return self.nrows - 1

    def row(self, i: int) -> PauliString:
        x = z = 0
        for j in range(self.n):
            x |= ((self.xcols[j] >> i) & 1) << j
            z |= ((self.zcols[j] >> i) & 1) << j
        return PauliString(self.n, x, z, 2 * ((self.signs >> i) & 1))

    def symplectic_rows(self) -> list[int]:
        """Row i as ``x | z << n``, signs dropped."""
        return _transpose(self.xcols + self.zcols, self.nrows)

    def rows(self) -> list[PauliString]:
        full = (1 << self.n) - 1
        return [PauliString(self.n, v & full, v >> self.n, 2 * ((self.signs >> i) & 1))
                for i, v in enumerate(self.symplectic_rows())]

    def anticommute_mask(self, p: PauliString) -> int:
        mask = 0
        for j in bits_of(p.z):
            mask ^= self.xcols[j]
        for j in bits_of(p.x):
            mask ^= self.zcols[j]
        return mask

    # gates -------------------------------------------------------------------
    def h(self, a: int):
        xa, za = self.xcols[a], self.zcols[a]
        self.signs ^= xa & za
        self.xcols[a], self.zcols[a] = za, xa
        self._touch()

    def s(self, a: int):
        xa = self.xcols[a]
        self.signs ^= xa & self.zcols[a]
        self.zcols[a] ^= xa
        self._touch()

    def sdg(self, a: int):
        xa = self.xcols[a]
        self.signs ^= xa & ~self.zcols[a]
        self.zcols[a] ^= xa
        self._touch()

    def cnot(self, a: int, b: int):
        if a == b:
            raise ValueError("CNOT needs two distinct qubits")
        xa, za, xb, zb = self.xcols[a], self.zcols[a], self.xcols[b], self.zcols[b]
        self.signs ^= xa & zb & ~(xb ^ za)
        self.xcols[b] = xb ^ xa
        self.zcols[a] = za ^ zb
        self._touch()

    def cz(self, a: int, b: int):
        self.h(b)
        self.cnot(a, b)
        self.h(b)

    def swap(self, a: int, b: int):
        self.xcols[a], self.xcols[b] = self.xcols[b], self.xcols[a]
        self.zcols[a], self.zcols[b] = self.zcols[b], self.zcols[a]
        self._touch()

    def apply_pauli(self, p: PauliString):
        """Conjugate by a Pauli: rows that anticommute with it flip sign."""
        self.signs ^= self.anticommute_mask(p)
        self._touch()

    def apply_gate(self, name: str, *qubits: int):
        for q in qubits:
            if not 0 <= q < self.n:
                raise IndexError(f"qubit {q} outside 0..{self.n - 1}")
        name = name.upper()
        if name in ("X", "Y", "Z"):
            self.apply_pauli(PauliString.single(self.n, qubits[0], name))
        elif name == "H":
            self.h(*qubits)
        elif name == "S":
            self.s(*qubits)
        elif name == "SDG":
            self.sdg(*qubits)
        elif name in ("CNOT", "CX"):
            self.cnot(*qubits)
        elif name == "CZ":
            self.cz(*qubits)
        elif name == "SWAP":
            self.swap(*qubits)
        elif name == "I":
            pass
        else:
            raise ValueError(f"unknown gate {name!r}")

    def apply_circuit(self, gates: Iterable[tuple]):
        for g in gates:
            self.apply_gate(g[0], *g[1:])

    def apply_clifford(self, gate: str, targets: Sequence[int]):
        self.apply_gate(gate, *targets)

    def apply_two_qubit_clifford(self, index: int, a: int, b: int):
        for name, *qs in clifford_word(index):
            self.apply_gate(name, *(a if q == 0 else b for q in qs))

    def random_two_qubit_clifford(self, rng: np.random.Generator, a: int, b: int) -> int:
        index = int(rng.integers(TWO_QUBIT_CLIFFORD_ORDER))
        self.apply_two_qubit_clifford(index, a, b)
        return index

    def random_clifford_layer(self, rng: np.random.Generator, pairs: Iterable[tuple[int, int]]) -> list[int]:
        return [self.random_two_qubit_clifford(rng, a, b) for a, b in pairs]

    # row products ------------------------------------------------------------
    def _multiply_into(self, h: int, mask: int):
        """Replace every row r in ``mask`` by row_h * row_r (rows must commute)."""
        lo = hi = 0
        hbit = 1 << h
        xcols, zcols = self.xcols, self.zcols
        for j in range(self.n):
            hx = xcols[j] & hbit
            hz = zcols[j] & hbit
            if not (hx or hz):
                continue
            rx = xcols[j] & mask
            rz = zcols[j] & mask
            if hx and not hz:
                plus, minus = rx & rz, rz & ~rx
            elif hx:
                plus, minus = rz & ~rx, rx & ~rz
            else:
                plus, minus = rx & ~rz, rx & rz
            carry = lo & plus
            lo ^= plus
            hi ^= carry
            borrow = minus & ~lo
            lo ^= minus
            hi ^= borrow
            if hx:
                xcols[j] ^= mask
            if hz:
                zcols[j] ^= mask
        if lo & mask:
            raise AssertionError("multiplied anticommuting rows")
        self.signs ^= hi & mask
        if self.signs & hbit:
            self.signs ^= mask
        self._touch()

    def _set_row(self, i: int, p: PauliString):
        bit = 1 << i
        clear = ~bit
        for j in range(self.n):
            xv = bit if (p.x >> j) & 1 else 0
            zv = bit if (p.z >> j) & 1 else 0
            self.xcols[j] = (self.xcols[j] & clear) | xv
            self.zcols[j] = (self.zcols[j] & clear) | zv
        self.signs = (self.signs & clear) | (bit if p.phase == 2 else 0)
        self._touch()


@dataclass
class MeasurementRecord:
    outcomes: SignVector
    log2_prob: int


class StabilizerTableau(PauliTable):
    """Signed, independent, commuting generators of a stabilizer state.

    ``log2_prob`` accumulates the log-probability of every random outcome
    drawn so far, so a run's Born probability is ``2**log2_prob`` exactly.
    """

    def __init__(self, n: int, seed=None, rng: np.random.Generator | None = None,
                 chooser: Callable[[], int] | None = None):
        super().__init__(n)
        self.seed = seed
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.chooser = chooser
        self.log2_prob = 0
        self._cache = None

    def _touch(self):
        self._cache = None

    # constructors ------------------------------------------------------------
    @classmethod
    def from_generators(cls, n: int, gens: Iterable[PauliString], **kw) -> StabilizerTableau:
        tab = cls(n, **kw)
        for g in gens:
            tab.append(g)
        return tab

    @classmethod
    def maximally_mixed(cls, n: int, **kw) -> StabilizerTableau:
        return cls(n, **kw)

    @classmethod
    def with_reference(cls, n: int, **kw) -> StabilizerTableau:
        """System 0..n-1 paired with reference n..2n-1 in |EPR> states."""
        return cls.from_generators(2 * n, bell_generators(2 * n, range(n), range(n, 2 * n)), **kw)

    @classmethod
    def epr_pairs(cls, k: int, **kw) -> StabilizerTableau:
        """Qubit j paired with qubit k + j."""
        return cls.from_generators(2 * k, bell_generators(2 * k, range(k), range(k, 2 * k)), **kw)

    @classmethod
    def computational(cls, n: int, bits: Sequence[int], **kw) -> StabilizerTableau:
        gens = [PauliString.single(n, j, "Z").with_sign(-1 if b else 1) for j, b in enumerate(bits)]
        return cls.from_generators(n, gens, **kw)

    # queries -----------------------------------------------------------------
    def _space(self):
        if self._cache is None:
            rows = self.rows()
            space = Gf2RowSpace(2 * self.n, (r.symplectic for r in rows), track=True)
            self._cache = (rows, space)
        return self._cache

    def generators(self) -> list[PauliString]:
        return list(self._space()[0])

    def _group_element(self, p: PauliString) -> PauliString | None:
        """The signed group element with the letters of ``p``, if any."""
        rows, space = self._space()
        combo = space.solve(p.symplectic)
        if combo is None:
            return None
        out = PauliString.identity(self.n)
        for k in bits_of(combo):
            out = multiply(out, rows[k])
        return out

    def expectation(self, p: PauliString) -> int:
        """+1 or -1 if +-p is a stabilizer, else 0."""
        if not p.is_hermitian:
            raise ValueError("expectation of a non-Hermitian Pauli")
        if p.is_identity:
            return p.sign
        if self.anticommute_mask(p):
            return 0
        g = self._group_element(p)
        if g is None:
            return 0
        return 1 if g.phase == p.phase else -1

    def subsystem_entropy(self, qubits) -> int:
        qs = _qubit_list(qubits)
        keep = 0
        for j in range(self.n):
            if j not in qs:
                keep |= (1 << j) | (1 << (j + self.n))
        rows = self._space()[0]
        r = Gf2RowSpace(2 * self.n, (g.symplectic & keep for g in rows)).rank
        return len(set(qs)) - (self.nrows - r)

    def purity(self, qubits) -> int:
        """log2 Tr(rho_A^2); the spectrum is flat so this is minus the entropy."""
        return -self.subsystem_entropy(qubits)

    def local_generators(self, qubits) -> list[PauliString]:
        """Signed generators of the stabilizer subgroup supported on ``qubits``."""
        qs = set(_qubit_list(qubits))
        keep = 0
        for j in range(self.n):
            if j not in qs:
                keep |= (1 << j) | (1 << (j + self.n))
        rows = self._space()[0]
        space = Gf2RowSpace(2 * self.n, (g.symplectic & keep for g in rows), track=True)
        out = []
        for combo in space.relations:
            g = PauliString.identity(self.n)
            for k in bits_of(combo):
                g = multiply(g, rows[k])
            out.append(g)
        return out

    # measurement -------------------------------------------------------------
    def _draw(self) -> int:
        if self.chooser is not None:
            return self.chooser()
        return 1 if self.rng.random() < 0.5 else -1

    def measure(self, p: PauliString, forced: int | None = None) -> int:
        """Projectively measure the Hermitian Pauli ``p``; returns +1 or -1."""
        if p.n != self.n:
            raise ValueError(f"{p.n}-qubit Pauli on {self.n}-qubit tableau")
        if not p.is_hermitian or p.is_identity:
            raise ValueError("measured Pauli must be Hermitian and not the identity")
        anti = self.anticommute_mask(p)
        if anti:
            outcome = forced if forced is not None else self._draw()
            pivot = (anti & -anti).bit_length() - 1
            others = anti ^ (1 << pivot)
            if others:
                self._multiply_into(pivot, others)
            self._set_row(pivot, p if outcome > 0 else -p)
            self.log2_prob -= 1
            return outcome
        g = self._group_element(p)
        if g is not None:
            value = 1 if g.phase == p.phase else -1
            if forced is not None and forced != value:
                raise ImpossibleOutcome(f"{p} is deterministically {value:+d}")
            return value
        outcome = forced if forced is not None else self._draw()
        self.append(p if outcome > 0 else -p)
        self.log2_prob -= 1
        return outcome

    def run_schedule(self, schedule: MeasurementSchedule, outcomes=None,
                     positions: Sequence[int] | None = None, offset: int = 0) -> MeasurementRecord:
        """Measure P_1..P_tau in order on the register ``positions``."""
        if positions is None:
            positions = range(offset, offset + schedule.n)
        positions = list(positions)
        if outcomes is not None and not isinstance(outcomes, SignVector):
            outcomes = SignVector.from_spins(outcomes)
        start = self.log2_prob
        bits = 0
        for j, p in enumerate(schedule.ops):
            forced = outcomes[j] if outcomes is not None else None
            m = self.measure(embed(p, self.n, positions), forced)
            if m < 0:
                bits |= 1 << j
        return MeasurementRecord(SignVector(schedule.tau, bits), self.log2_prob - start)


def bell_generators(n: int, left: Iterable[int], right: Iterable[int]) -> list[PauliString]:
    """X_a X_b and Z_a Z_b for each pair, in pair order, X first."""
    gens = []
    for a, b in zip(left, right):
        bits = (1 << a) | (1 << b)
        gens.append(PauliString(n, bits, 0))
        gens.append(PauliString(n, 0, bits))
    return gens


def new_maximally_mixed(n: int, **kw) -> StabilizerTableau:
    return StabilizerTableau.maximally_mixed(n, **kw)


def new_with_reference(n: int, **kw) -> StabilizerTableau:
    return StabilizerTableau.with_reference(n, **kw)


def new_epr_pairs(k: int, **kw) -> StabilizerTableau:
    return StabilizerTableau.epr_pairs(k, **kw)


def new_computational(n: int, bits: Sequence[int], **kw) -> StabilizerTableau:
    return StabilizerTableau.computational(n, bits, **kw)


def conjugate_paulis(paulis: Sequence[PauliString], gates: Iterable[tuple], n: int) -> list[PauliString]:
    """U P U^dagger for each P, with U the gate list applied in order."""
    table = PauliTable(n)
    for p in paulis:
        table.append(p)
    table.apply_circuit(gates)
    return table.rows()


def inverse_circuit(gates: Sequence[tuple]) -> list[tuple]:
    swap = {"S": "SDG", "SDG": "S"}
    return [(swap.get(g[0].upper(), g[0]),) + tuple(g[1:]) for g in reversed(gates)]


# uniform two-qubit Cliffords --------------------------------------------------

TWO_QUBIT_CLIFFORD_ORDER = 11520


@lru_cache(maxsize=1)
def _two_qubit_clifford_words() -> tuple[tuple, ...]:
    """One gate word per element of the two-qubit Clifford group (mod phase).

    Breadth-first search over the images of X0, Z0, X1, Z1 under products of
    H, S and CNOT.  Every element appears exactly once, so drawing an index
    uniformly draws a Clifford uniformly.
    """
    start = PauliTable(2)
    for p in ("XI", "ZI", "IX", "IZ"):
        start.append(PauliString.from_str(p))
    moves = [("H", 0), ("H", 1), ("S", 0), ("S", 1), ("CNOT", 0, 1)]

    def key(t):
        return (tuple(t.xcols), tuple(t.zcols), t.signs)

    seen = {key(start): ()}
    queue = deque([(start, ())])
    while queue:
        table, word = queue.popleft()
        for mv in moves:
            nxt = table.copy()
            nxt.apply_gate(*mv)
            k = key(nxt)
            if k not in seen:
                seen[k] = word + (mv,)
                queue.append((nxt, word + (mv,)))
    words = tuple(seen[k] for k in sorted(seen))
    assert len(words) == TWO_QUBIT_CLIFFORD_ORDER
    return words


def clifford_word(index: int) -> tuple:
    return _two_qubit_clifford_words()[index]


def random_two_qubit_clifford(tableau: PauliTable, rng: np.random.Generator, a: int, b: int) -> int:
    return tableau.random_two_qubit_clifford(rng, a, b)


# exhaustive outcome enumeration ----------------------------------------------

class _Replay:
    def __init__(self, prefix: tuple[int, ...]):
        self.prefix = prefix
        self.taken: list[int] = []

    def __call__(self) -> int:
        k = len(self.taken)
        v = self.prefix[k] if k < len(self.prefix) else 1
        self.taken.append(v)
        return v


def enumerate_branches(run: Callable[[Callable[[], int]], object]) -> Iterator[tuple[int, object]]:
    """Run ``run(chooser)`` once per branch of its random outcomes.

    ``chooser`` must supply every random outcome.  Yields ``(log2_weight,
    result)``; the weights of all branches sum to one.
    """
    stack = [()]
    while stack:
        prefix = stack.pop()
        ch = _Replay(prefix)
        result = run(ch)
        for k in range(len(prefix), len(ch.taken)):
            stack.append(tuple(ch.taken[:k]) + (-1,))
        yield -len(ch.taken), result
