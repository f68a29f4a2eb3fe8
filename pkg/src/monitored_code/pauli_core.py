"""Symplectic Pauli algebra and GF(2) linear algebra on packed bit vectors.

Bit vectors are Python integers: bit ``j`` is component ``j``.  Integers are
stored as machine words internally, so XOR/AND/popcount on them are word-wise
operations with no per-bit Python loop.

A ``PauliString`` is ``i**phase * s_0 (x) s_1 (x) ...`` where ``s_j`` is
I, X, Z or Y for bit pairs (x_j, z_j) = (0,0), (1,0), (0,1), (1,1).  Hermitian
operators therefore carry phase 0 (sign +1) or 2 (sign -1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class DimensionError(ValueError):
    """Operands live on different numbers of qubits or have different widths."""


_CHARS = "IXZY"  # indexed by x + 2z


def _popcount(v: int) -> int:
    return v.bit_count()


def _low_bit(v: int) -> int:
    return (v & -v).bit_length() - 1


def bits_of(v: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``v`` in increasing order."""
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


@dataclass(frozen=True)
class PauliString:
    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full or self.x < 0 or self.z < 0:
            raise DimensionError(f"bit vectors exceed {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # construction ---------------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(n, 0, 0)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> PauliString:
        """Single-site X, Y or Z on ``qubit`` (Y is Hermitian, phase 0)."""
        if not 0 <= qubit < n:
            raise IndexError(qubit)
        b = 1 << qubit
        x = b if kind in "XY" else 0
        z = b if kind in "ZY" else 0
        return cls(n, x, z)

    @classmethod
    def from_str(cls, text: str) -> PauliString:
        """Parse ``'+XZI'``, ``'-YY'``, ``'+iXZ'`` or an unsigned ``'XZ'``.

        The leftmost letter is qubit 0.
        """
        s = text.strip()
        phase = 0
        if s.startswith(("+", "-")):
            phase = 2 if s[0] == "-" else 0
            s = s[1:]
        if s.startswith("i"):
            phase += 1
            s = s[1:]
        x = z = 0
        for j, ch in enumerate(s):
            k = _CHARS.find(ch.upper())
            if k < 0:
                raise ValueError(f"bad Pauli letter {ch!r} in {text!r}")
            x |= (k & 1) << j
            z |= (k >> 1) << j
        return cls(len(s), x, z, phase)

    @classmethod
    def from_symplectic(cls, n: int, v: int, phase: int = 0) -> PauliString:
        """Inverse of :attr:`symplectic`: low n bits are x, high n bits are z."""
        full = (1 << n) - 1
        return cls(n, v & full, (v >> n) & full, phase)

    # views ----------------------------------------------------------------
    @property
    def symplectic(self) -> int:
        return self.x | (self.z << self.n)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        if not self.is_hermitian:
            raise ValueError("non-Hermitian Pauli has no real sign")
        return -1 if self.phase == 2 else 1

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def letters(self) -> str:
        return "".join(_CHARS[((self.x >> j) & 1) | (((self.z >> j) & 1) << 1)]
                       for j in range(self.n))

    def __str__(self) -> str:
        prefix = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase]
        return prefix + self.letters()

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    # algebra --------------------------------------------------------------
    def unsigned(self) -> PauliString:
        return PauliString(self.n, self.x, self.z, 0)

    def with_sign(self, sign: int) -> PauliString:
        return PauliString(self.n, self.x, self.z, 0 if sign > 0 else 2)

    def __neg__(self) -> PauliString:
        return PauliString(self.n, self.x, self.z, self.phase + 2)

    def conjugate(self) -> PauliString:
        """Complex conjugate: Y picks up a minus sign, i goes to -i."""
        ny = _popcount(self.x & self.z)
        return PauliString(self.n, self.x, self.z, -self.phase + 2 * ny)

    def __mul__(self, other: PauliString) -> PauliString:
        return multiply(self, other)


def _product_phase(x1: int, z1: int, x2: int, z2: int) -> int:
    # Per-site phase of s(x1,z1) s(x2,z2): +1 for XY, YZ, ZX and -1 for the reverse.
    ax, ay, az = x1 & ~z1, x1 & z1, z1 & ~x1
    bx, by, bz = x2 & ~z2, x2 & z2, z2 & ~x2
    plus = (ax & by) | (ay & bz) | (az & bx)
    minus = (ax & bz) | (ay & bx) | (az & by)
    return _popcount(plus) - _popcount(minus)


def multiply(p: PauliString, q: PauliString) -> PauliString:
    if p.n != q.n:
        raise DimensionError(f"{p.n} vs {q.n} qubits")
    ph = p.phase + q.phase + _product_phase(p.x, p.z, q.x, q.z)
    return PauliString(p.n, p.x ^ q.x, p.z ^ q.z, ph)


def product(paulis: Iterable[PauliString], n: int) -> PauliString:
    out = PauliString.identity(n)
    for p in paulis:
        out = multiply(out, p)
    return out


def symplectic_product(u: int, v: int, n: int) -> int:
    """0 if the Paulis with symplectic vectors u, v commute, else 1."""
    full = (1 << n) - 1
    return _popcount(((u & full) & (v >> n)) ^ ((u >> n) & (v & full))) & 1


def commutes(p: PauliString, q: PauliString) -> int:
    """+1 if ``p`` and ``q`` commute, -1 if they anticommute."""
    if p.n != q.n:
        raise DimensionError(f"{p.n} vs {q.n} qubits")
    return -1 if _popcount((p.x & q.z) ^ (p.z & q.x)) & 1 else 1


def anticommutes(p: PauliString, q: PauliString) -> bool:
    return commutes(p, q) < 0


# subsystems ----------------------------------------------------------------

@dataclass(frozen=True)
class SubsystemMask:
    n: int
    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(set(self.members)))
        if len(members) != len(self.members):
            raise ValueError("repeated qubit in subsystem")
        if members and (members[0] < 0 or members[-1] >= self.n):
            raise IndexError(f"subsystem {members} outside 0..{self.n - 1}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, n: int, members: Iterable[int]) -> SubsystemMask:
        return cls(n, tuple(members))

    @classmethod
    def interval(cls, n: int, start: int, length: int, periodic: bool = False) -> SubsystemMask:
        if periodic:
            return cls(n, tuple((start + k) % n for k in range(length)))
        return cls(n, tuple(range(start, start + length)))

    @property
    def bits(self) -> int:
        out = 0
        for j in self.members:
            out |= 1 << j
        return out

    def complement(self) -> SubsystemMask:
        inside = set(self.members)
        return SubsystemMask(self.n, tuple(j for j in range(self.n) if j not in inside))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def restrict(p: PauliString, mask: SubsystemMask) -> PauliString:
    """Keep the letters of ``p`` at the members of ``mask`` (phase kept)."""
    if p.n != mask.n:
        raise DimensionError(f"{p.n} vs {mask.n} qubits")
    x = z = 0
    for k, j in enumerate(mask.members):
        x |= ((p.x >> j) & 1) << k
        z |= ((p.z >> j) & 1) << k
    return PauliString(len(mask), x, z, p.phase)


def is_supported_on(p: PauliString, mask: SubsystemMask) -> bool:
    if p.n != mask.n:
        raise DimensionError(f"{p.n} vs {mask.n} qubits")
    return (p.x | p.z) & ~mask.bits == 0


def embed(p: PauliString, n_total: int, positions: Sequence[int]) -> PauliString:
    """Place the k-qubit ``p`` onto ``positions`` of an ``n_total``-qubit register."""
    if len(positions) != p.n:
        raise DimensionError(f"{p.n} letters for {len(positions)} positions")
    x = z = 0
    for k, j in enumerate(positions):
        x |= ((p.x >> k) & 1) << j
        z |= ((p.z >> k) & 1) << j
    return PauliString(n_total, x, z, p.phase)


# sign vectors --------------------------------------------------------------

@dataclass(frozen=True)
class SignVector:
    """A vector of +-1 entries stored as bits b = (1 - m) / 2."""

    length: int
    bits: int = 0

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.length:
            raise DimensionError(f"bits do not fit in length {self.length}")

    @classmethod
    def from_spins(cls, spins: Sequence[int]) -> SignVector:
        bits = 0
        for j, m in enumerate(spins):
            if m not in (1, -1):
                raise ValueError(f"spin must be +-1, got {m}")
            if m < 0:
                bits |= 1 << j
        return cls(len(spins), bits)

    def spins(self) -> tuple[int, ...]:
        return tuple(-1 if (self.bits >> j) & 1 else 1 for j in range(self.length))

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return -1 if (self.bits >> j) & 1 else 1

    def __mul__(self, other: SignVector) -> SignVector:
        if self.length != other.length:
            raise DimensionError(f"{self.length} vs {other.length}")
        return SignVector(self.length, self.bits ^ other.bits)

    @property
    def is_trivial(self) -> bool:
        return self.bits == 0

    def __str__(self) -> str:
        return "(" + ",".join(str(m) for m in self.spins()) + ")"


# GF(2) linear algebra --------------------------------------------------------

class Gf2RowSpace:
    """Incrementally built row space in echelon form.

    Every stored row has a distinct pivot, its lowest set bit, and no stored
    row contains another row's pivot below its own.  With ``track=True`` each
    row also remembers which inserted vectors it is a combination of, which
    is what :meth:`solve` returns.
    """

    def __init__(self, width: int, rows: Iterable[int] = (), track: bool = False):
        self.width = width
        self.track = track
        self._rows: dict[int, int] = {}
        self._combos: dict[int, int] = {}
        self._pivmask = 0
        self._inserted = 0
        self.relations: list[int] = []  # combos of inserted vectors summing to zero
        for r in rows:
            self.insert(r)

    def _check(self, v: int):
        if v < 0 or v >> self.width:
            raise DimensionError(f"vector wider than {self.width} bits")

    def _reduce(self, v: int, combo: int = 0) -> tuple[int, int]:
        rows, combos, track = self._rows, self._combos, self.track
        t = v & self._pivmask
        while t:
            p = _low_bit(t)
            v ^= rows[p]
            if track:
                combo ^= combos[p]
            t = v & self._pivmask
        return v, combo

    def reduce(self, v: int) -> int:
        """Residual of ``v`` with every pivot bit cleared."""
        self._check(v)
        return self._reduce(v)[0]

    def insert(self, v: int) -> bool:
        """Add ``v``; return True if it enlarged the space."""
        self._check(v)
        combo = 1 << self._inserted if self.track else 0
        self._inserted += 1
        v, combo = self._reduce(v, combo)
        if v == 0:
            if self.track:
                self.relations.append(combo)
            return False
        p = _low_bit(v)
        self._rows[p] = v
        self._combos[p] = combo
        self._pivmask |= 1 << p
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    __contains__ = contains

    def solve(self, v: int) -> int | None:
        """Bitmask of inserted vectors whose XOR is ``v``, or None."""
        if not self.track:
            raise ValueError("space was built without tracking")
        self._check(v)
        r, combo = self._reduce(v, 0)
        return combo if r == 0 else None

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self._rows)

    @property
    def rows(self) -> list[int]:
        return [self._rows[p] for p in sorted(self._rows)]

    def reduced_rows(self) -> list[int]:
        """Rows of the reduced echelon form (each pivot appears in one row only)."""
        out = {}
        for p in sorted(self._rows, reverse=True):
            r = self._rows[p]
            t = r & self._pivmask & ~(1 << p)
            while t:
                q = _low_bit(t)
                r ^= out[q]
                t = r & self._pivmask & ~(1 << p)
            out[p] = r
        return [out[p] for p in sorted(out)]

    def copy(self) -> Gf2RowSpace:
        new = Gf2RowSpace(self.width, track=self.track)
        new._rows = dict(self._rows)
        new._combos = dict(self._combos)
        new._pivmask = self._pivmask
        new._inserted = self._inserted
        new.relations = list(self.relations)
        return new

    def elements(self) -> Iterator[int]:
        """All 2**rank members (only sensible for small rank)."""
        basis = self.rows
        for c in range(1 << len(basis)):
            v = 0
            for k in bits_of(c):
                v ^= basis[k]
            yield v


def membership(v: SignVector | int, space: Gf2RowSpace) -> bool:
    bits = v.bits if isinstance(v, SignVector) else v
    if isinstance(v, SignVector) and v.length != space.width:
        raise DimensionError(f"{v.length} vs {space.width}")
    return space.contains(bits)


def rank(rows: Iterable[int], width: int) -> int:
    return Gf2RowSpace(width, rows).rank


def solve(rows: Sequence[int], v: int, width: int) -> int | None:
    """Coefficient bitmask c with XOR_{k in c} rows[k] == v, or None."""
    return Gf2RowSpace(width, rows, track=True).solve(v)


def kernel_basis(rows: Iterable[int], width: int) -> list[int]:
    """Basis of {v : popcount(v & r) even for every row r}."""
    space = Gf2RowSpace(width, rows)
    reduced = space.reduced_rows()
    pivots = space.pivots
    pivset = set(pivots)
    basis = []
    for f in range(width):
        if f in pivset:
            continue
        v = 1 << f
        for p, r in zip(pivots, reduced):
            if (r >> f) & 1:
                v |= 1 << p
        basis.append(v)
    return basis


def least_in_coset(v: int, space: Gf2RowSpace) -> int:
    """Lexicographically least element of v + span, component 0 most significant."""
    pivmask = space._pivmask
    reduced = dict(zip(space.pivots, space.reduced_rows()))
    t = v & pivmask
    while t:
        p = _low_bit(t)
        v ^= reduced[p]
        t = v & pivmask
    return v
