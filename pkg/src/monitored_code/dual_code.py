"""The classical code dual to a measurement schedule.

For measured Paulis P_1..P_tau the codeword of a Pauli P is its commutation
pattern with every P_j, and the error vector of P_i is the commutation
pattern of P_i with the operators measured before it (later components are
trivial).  Sign vectors are bit vectors with bit j set when component j is
-1, so bit j of a codeword is the symplectic product with P_j.

Entropies of the post-measurement state all follow from how many Paulis on a
region have codewords inside the error span.  Those counts are computed by
rank, never by enumerating Paulis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

from .pauli_core import (
    DimensionError,
    Gf2RowSpace,
    PauliString,
    SignVector,
    SubsystemMask,
    bits_of,
    least_in_coset,
    multiply,
    product,
)
from .schedule import MeasurementSchedule


class DecodeError(RuntimeError):
    """The sum vector lies outside the span the protocol can ever produce."""


def _as_mask(n: int, region) -> SubsystemMask:
    if isinstance(region, SubsystemMask):
        if region.n != n:
            raise DimensionError(f"mask on {region.n} qubits, code on {n}")
        return region
    return SubsystemMask.of(n, region)


class DualCode:
    """Codeword generators plus forward and reverse error spans.

    ``generator_rows[q]`` is the codeword of X_q and ``generator_rows[n + q]``
    the codeword of Z_q, so the codeword of any Pauli is an XOR of rows.
    """

    extended = False

    def __init__(self, schedule: MeasurementSchedule):
        self.schedule = schedule
        self.n = schedule.n
        self.tau = schedule.tau
        n, ops = self.n, schedule.ops
        xrows = [0] * n
        zrows = [0] * n
        for j, p in enumerate(ops):
            bit = 1 << j
            for q in bits_of(p.z):
                xrows[q] |= bit
            for q in bits_of(p.x):
                zrows[q] |= bit
        self.generator_rows = xrows + zrows
        # codeword of P_i, then its past and future parts
        self._op_codewords = [self._raw_codeword(p) for p in ops]
        self.error_rows = [c & ((1 << i) - 1) for i, c in enumerate(self._op_codewords)]
        self.reverse_rows = [c & ~((1 << i) - 1) for i, c in enumerate(self._op_codewords)]
        self.error_space = Gf2RowSpace(self.width, self._error_vectors())
        self._reduced = [self.error_space.reduce(r) for r in self._all_generator_rows()]

    # layout hooks overridden by the extended code
    @property
    def width(self) -> int:
        return self.tau

    def _error_vectors(self) -> list[int]:
        return self.error_rows

    def _all_generator_rows(self) -> list[int]:
        return self.generator_rows

    def _raw_codeword(self, p: PauliString) -> int:
        v = 0
        for q in bits_of(p.x):
            v ^= self.generator_rows[q]
        for q in bits_of(p.z):
            v ^= self.generator_rows[self.n + q]
        return v

    # vectors ------------------------------------------------------------------
    def codeword_bits(self, p: PauliString) -> int:
        if p.n != self.n:
            raise DimensionError(f"{p.n}-qubit Pauli, {self.n}-qubit code")
        rows = self._all_generator_rows()
        v = 0
        for q in bits_of(p.x):
            v ^= rows[q]
        for q in bits_of(p.z):
            v ^= rows[self.n + q]
        return v

    def codeword(self, p: PauliString) -> SignVector:
        return SignVector(self.width, self.codeword_bits(p))

    def error_vector(self, i: int) -> SignVector:
        """Error vector of P_i, with i counted from 1."""
        if not 1 <= i <= self.tau:
            raise IndexError(f"op index {i} outside 1..{self.tau}")
        return SignVector(self.width, self._error_vectors()[i - 1])

    def reverse_error_vector(self, i: int) -> SignVector:
        if not 1 <= i <= self.tau:
            raise IndexError(f"op index {i} outside 1..{self.tau}")
        return SignVector(self.tau, self.reverse_rows[i - 1])

    @cached_property
    def reverse_error_space(self) -> Gf2RowSpace:
        return Gf2RowSpace(self.tau, self.reverse_rows, track=True)

    # null operators ------------------------------------------------------------
    def _region_rows(self, mask: SubsystemMask) -> list[int]:
        """Indices of the generator rows for X_q then Z_q, q in mask."""
        return [q for q in mask.members] + [self.n + q for q in mask.members]

    def log2_null_count(self, region) -> int:
        """log2 of the number of Paulis on ``region`` whose codeword is in the error span."""
        mask = _as_mask(self.n, region)
        idx = self._region_rows(mask)
        r = Gf2RowSpace(self.width, (self._reduced[k] for k in idx)).rank
        return len(idx) - r

    def prefix_null_counts(self, order=None) -> list[int]:
        """Null counts of the growing regions order[:1], order[:2], ... in one pass."""
        order = list(range(self.n)) if order is None else list(order)
        space = Gf2RowSpace(self.width)
        out = []
        for k, q in enumerate(order, start=1):
            space.insert(self._reduced[q])
            space.insert(self._reduced[self.n + q])
            out.append(2 * k - space.rank)
        return out

    def is_null(self, p: PauliString) -> bool:
        return self.error_space.contains(self.codeword_bits(p))

    def recoverable(self, region) -> bool:
        return self.log2_null_count(region) == 0

    def conditional_entropy(self, region) -> int:
        mask = _as_mask(self.n, region)
        return self.log2_null_count(mask) - len(mask)

    def total_error_space(self, region) -> Gf2RowSpace:
        """Error span enlarged by the codewords of every Pauli on ``region``."""
        mask = _as_mask(self.n, region)
        space = self.error_space.copy()
        rows = self._all_generator_rows()
        for k in self._region_rows(mask):
            space.insert(rows[k])
        return space

    # decoders ----------------------------------------------------------------------
    def decode(self, s: SignVector, region) -> PauliString:
        """A Pauli P_A on ``region`` with s * C(P_A) in the error span.

        Among all solutions the one whose bit string (x bits of the region
        in order, then z bits) is lexicographically least is returned.
        """
        mask = _as_mask(self.n, region)
        if s.length != self.width:
            raise DimensionError(f"sum vector of length {s.length}, code width {self.width}")
        idx = self._region_rows(mask)
        space = Gf2RowSpace(self.width, (self._reduced[k] for k in idx), track=True)
        combo = space.solve(self.error_space.reduce(s.bits))
        if combo is None:
            raise DecodeError(f"{s} is outside the total error span")
        kernel = Gf2RowSpace(len(idx), space.relations)
        c = least_in_coset(combo, kernel)
        k = len(mask)
        return PauliString(k, c & ((1 << k) - 1), c >> k)

    def decode_reverse(self, s: SignVector) -> tuple[tuple[int, ...], PauliString]:
        """Indices (counted from 0) whose reverse error vectors multiply to s, and their product."""
        if s.length != self.tau:
            raise DimensionError(f"sum vector of length {s.length}, schedule length {self.tau}")
        combo = self.reverse_error_space.solve(s.bits)
        if combo is None:
            raise DecodeError(f"{s} is outside the reverse error span")
        lam = tuple(bits_of(combo))
        return lam, product((self.schedule.ops[j] for j in lam), self.n)


class ExtendedDualCode(DualCode):
    """Dual code of the schedule preceded by Bell measurements with a reference.

    Components 2q and 2q + 1 record commutation with X_q X_q' and Z_q Z_q'
    (q' the reference partner of q); the schedule follows from 2n on.  The
    Bell operators commute with each other, so their error vectors vanish.
    """

    extended = True

    @property
    def width(self) -> int:
        return 2 * self.n + self.tau

    def _bell_part(self, p: PauliString) -> int:
        v = 0
        for q in bits_of(p.z):
            v |= 1 << (2 * q)
        for q in bits_of(p.x):
            v |= 1 << (2 * q + 1)
        return v

    def _error_vectors(self) -> list[int]:
        shift = 2 * self.n
        return [self._bell_part(p) | (e << shift) for p, e in zip(self.schedule.ops, self.error_rows)]

    def _all_generator_rows(self) -> list[int]:
        shift = 2 * self.n
        n = self.n
        xs = [(1 << (2 * q + 1)) | (self.generator_rows[q] << shift) for q in range(n)]
        zs = [(1 << (2 * q)) | (self.generator_rows[n + q] << shift) for q in range(n)]
        return xs + zs

    def reverse_error_vector(self, i: int) -> SignVector:
        raise NotImplementedError("reverse vectors are defined on the plain code only")


def build(schedule: MeasurementSchedule) -> DualCode:
    return DualCode(schedule)


def build_extended(schedule: MeasurementSchedule) -> ExtendedDualCode:
    return ExtendedDualCode(schedule)


# module-level conveniences mirroring the methods

def codeword(p: PauliString, code: DualCode) -> SignVector:
    return code.codeword(p)


def error_vector(i: int, code: DualCode) -> SignVector:
    return code.error_vector(i)


def reverse_error_vector(i: int, code: DualCode) -> SignVector:
    return code.reverse_error_vector(i)


def log2_null_count(region, code: DualCode) -> int:
    return code.log2_null_count(region)


def recoverable(region, code: DualCode) -> bool:
    return code.recoverable(region)


def conditional_entropy(region, code: DualCode) -> int:
    return code.conditional_entropy(region)


def decode(s: SignVector, region, code: DualCode) -> PauliString:
    return code.decode(s, region)


def decode_reverse(s: SignVector, code: DualCode):
    return code.decode_reverse(s)


# entropies ---------------------------------------------------------------------

@dataclass(frozen=True)
class EntropyReport:
    S_A: int
    S_B: int
    S_R: int
    S_AB: int
    S_A_given_B: int
    S_AB_given_R: int
    I_AB: int
    I_AR: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


class EntropyCalculator:
    """Both codes of one schedule, built once and queried per region."""

    def __init__(self, schedule: MeasurementSchedule):
        self.schedule = schedule
        self.n = schedule.n
        self.code = DualCode(schedule)
        self.ext = ExtendedDualCode(schedule)

    @cached_property
    def log2_null_total(self) -> int:
        return self.code.log2_null_count(range(self.n))

    @cached_property
    def log2_null_total_ext(self) -> int:
        return self.ext.log2_null_count(range(self.n))

    def report(self, region) -> EntropyReport:
        n = self.n
        a = _as_mask(n, region)
        b = a.complement()
        na, nb = len(a), len(b)
        la, lb = self.code.log2_null_count(a), self.code.log2_null_count(b)
        lae, lbe = self.ext.log2_null_count(a), self.ext.log2_null_count(b)
        li, lie = self.log2_null_total, self.log2_null_total_ext
        s_a, s_b, s_r = na - lae, nb - lbe, n - lie
        return EntropyReport(
            S_A=s_a,
            S_B=s_b,
            S_R=s_r,
            S_AB=li - n,
            S_A_given_B=la - na,
            S_AB_given_R=n - li,
            I_AB=li - la - lb,
            I_AR=s_a + s_r - s_b,
        )

    def cleaning(self, region) -> CleaningReport:
        n = self.n
        a = _as_mask(n, region)
        b = a.complement()
        la, lb = self.code.log2_null_count(a), self.code.log2_null_count(b)
        lae, lbe = self.ext.log2_null_count(a), self.ext.log2_null_count(b)
        li, lie = self.log2_null_total, self.log2_null_total_ext
        g, ga, gb = li - lie, la - lae, lb - lbe
        checks = (
            ga + gb == g,
            li + lie == 2 * n,
            la == 2 * len(a) - lie + lbe,
            lb == 2 * len(b) - lie + lae,
        )
        return CleaningReport(g=g, g_A=ga, g_B=gb, identities_hold=all(checks))

    def logical_count(self, region) -> int:
        """g_A: independent logical operators supported on ``region``."""
        return self.code.log2_null_count(region) - self.ext.log2_null_count(region)

    def contiguous_distance(self, periodic: bool = False) -> float | int:
        if self.log2_null_total == self.log2_null_total_ext:
            return math.inf
        n = self.n
        starts = range(n) if periodic else None
        for length in range(1, n + 1):
            for start in (starts if periodic else range(n - length + 1)):
                if self.logical_count(SubsystemMask.interval(n, start, length, periodic)) > 0:
                    return length
        return math.inf


@dataclass(frozen=True)
class CleaningReport:
    g: int
    g_A: int
    g_B: int
    identities_hold: bool


def entropy_suite(region, schedule: MeasurementSchedule) -> EntropyReport:
    return EntropyCalculator(schedule).report(region)


def cleaning_report(region, schedule: MeasurementSchedule) -> CleaningReport:
    return EntropyCalculator(schedule).cleaning(region)


def code_distance_contiguous(schedule: MeasurementSchedule, periodic: bool = False):
    """Shortest contiguous interval carrying a logical operator; ``math.inf`` if none."""
    return EntropyCalculator(schedule).contiguous_distance(periodic)
