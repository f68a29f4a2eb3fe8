"""Entanglement distillation from monitored Clifford dynamics.

Three protocols, all run on the exact tableau simulator:

* A-B distillation: undo the measurement record on a fresh copy of A and
  correct with a Pauli found by the dual-code decoder, leaving A maximally
  entangled with a new register A_bar whenever A is recoverable.
* system-reference distillation: measure the complex-conjugated schedule on
  the reference and correct with a product of measured operators, leaving
  the Choi state of the stabilizer code.
* the single-qubit reference variant, where one reference qubit is encoded
  into n system qubits and then monitored.

Fidelities are Born probabilities of projecting onto the target state, so
they are exact powers of two (or zero).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .dual_code import DecodeError, DualCode, ExtendedDualCode, _as_mask
from .groups import build_logical, build_stabilizer
from .pauli_core import (
    PauliString,
    SignVector,
    SubsystemMask,
    bits_of,
    commutes,
    embed,
    multiply,
)
from .schedule import MeasurementSchedule
from .tableau import (
    ImpossibleOutcome,
    StabilizerTableau,
    bell_generators,
    conjugate_paulis,
    enumerate_branches,
    inverse_circuit,
)


@dataclass(frozen=True)
class RegisterLayout:
    """Named, disjoint blocks of a flat qubit index space."""

    blocks: tuple[tuple[str, int, int], ...]  # (name, offset, width)

    @classmethod
    def stack(cls, *named_widths: tuple[str, int]) -> RegisterLayout:
        blocks, offset = [], 0
        for name, width in named_widths:
            blocks.append((name, offset, width))
            offset += width
        return cls(tuple(blocks))

    @property
    def total(self) -> int:
        return sum(w for _, _, w in self.blocks)

    def qubits(self, name: str) -> list[int]:
        for nm, off, w in self.blocks:
            if nm == name:
                return list(range(off, off + w))
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(nm == name for nm, _, _ in self.blocks)


def fidelity_log2(tableau: StabilizerTableau, pairs: Sequence[tuple[int, int]],
                  twist: PauliString | None = None) -> int | None:
    """log2 of the overlap with |EPR> on every pair, or None if it vanishes.

    With ``twist`` (a Pauli on the left qubits of the pairs) the target is the
    twisted state (twist (x) I)|EPR>.  Computed as the Born probability of
    projecting onto the target's stabilizer generators.
    """
    probe = tableau.copy()
    probe.chooser = None
    probe.log2_prob = 0
    gens = bell_generators(tableau.n, [a for a, _ in pairs], [b for _, b in pairs])
    for g in gens:
        sign = 1
        if twist is not None:
            sign = commutes(embed(twist, tableau.n, [a for a, _ in pairs]), g)
        try:
            probe.measure(g, forced=sign)
        except ImpossibleOutcome:
            return None
    return probe.log2_prob


def _fraction(log2: int | None) -> Fraction:
    return Fraction(0) if log2 is None else Fraction(1, 2 ** (-log2))


@dataclass
class DistillationResult:
    m: SignVector
    m_bar: SignVector
    s: SignVector
    feedback: PauliString
    epr_fidelity: Fraction
    fidelity_log2: int | None
    seed: object = None
    log2_prob: int = 0
    tableau: StabilizerTableau | None = field(default=None, repr=False)
    pairs: tuple = ()

    def as_record(self) -> dict:
        return {
            "m": list(self.m.spins()),
            "m_bar": list(self.m_bar.spins()),
            "s": list(self.s.spins()),
            "feedback": str(self.feedback),
            "fidelity_log2": self.fidelity_log2,
            "seed": self.seed,
        }


def _rng(rng, seed):
    if rng is None:
        return np.random.default_rng(seed)
    return rng


def distill_AB(schedule: MeasurementSchedule, region, rng: np.random.Generator | None = None,
               include_reference: bool = False, seed=None, depth: int | None = None,
               chooser: Callable[[], int] | None = None, code: DualCode | None = None) -> DistillationResult:
    """Distill EPR pairs between the region A and a new register A_bar.

    Layout ``[R | S | A_new | A_bar]`` (R only with ``include_reference``).
    ``depth`` reverses only the last ``depth`` measurements and decodes with
    the code of that suffix; by default the whole schedule is reversed.
    """
    n = schedule.n
    a = _as_mask(n, region)
    k = len(a)
    parts = ([("R", n)] if include_reference else []) + [("S", n), ("A_new", k), ("A_bar", k)]
    layout = RegisterLayout.stack(*parts)
    S, A_new, A_bar = layout.qubits("S"), layout.qubits("A_new"), layout.qubits("A_bar")
    gens = bell_generators(layout.total, A_new, A_bar)
    if include_reference:
        gens += bell_generators(layout.total, S, layout.qubits("R"))
    tab = StabilizerTableau.from_generators(layout.total, gens, rng=_rng(rng, seed), chooser=chooser)

    m_rec = tab.run_schedule(schedule, positions=S)
    reversed_count = schedule.tau if depth is None else min(depth, schedule.tau)
    first = schedule.tau - reversed_count
    homed = list(S)
    for i, q in enumerate(a.members):
        homed[q] = A_new[i]
    mbar_bits = 0
    for j in range(schedule.tau - 1, first - 1, -1):
        if tab.measure(embed(schedule.ops[j], tab.n, homed)) < 0:
            mbar_bits |= 1 << j
    m = m_rec.outcomes
    m_bar = SignVector(schedule.tau, mbar_bits)
    s = m * m_bar

    if depth is None or reversed_count == schedule.tau:
        code = code if code is not None else DualCode(schedule)
        s_used = s
    else:
        code = DualCode(schedule.suffix(reversed_count))
        s_used = SignVector(reversed_count, s.bits >> first)
    feedback = code.decode(s_used, a)
    tab.apply_pauli(embed(feedback, tab.n, A_bar))
    pairs = tuple((S[q], A_bar[i]) for i, q in enumerate(a.members))
    flog = fidelity_log2(tab, pairs)
    return DistillationResult(m, m_bar, s, feedback, _fraction(flog), flog, seed,
                              tab.log2_prob, tab, pairs)


def sum_vector_prediction(schedule: MeasurementSchedule, region) -> dict[int, Fraction]:
    """Uniform distribution of the sum vector over the total error span."""
    space = DualCode(schedule).total_error_space(region)
    w = Fraction(1, 2 ** space.rank)
    return {v: w for v in space.elements()}


def sum_vector_histogram(schedule: MeasurementSchedule, region) -> dict[int, Fraction]:
    """Exact probability of every sum vector s (keyed by its bits), by enumerating outcomes."""
    n = schedule.n
    a = _as_mask(n, region)
    k = len(a)
    hist: dict[int, Fraction] = defaultdict(Fraction)

    def run(chooser):
        layout = RegisterLayout.stack(("S", n), ("A_new", k), ("A_bar", k))
        S, A_new, A_bar = layout.qubits("S"), layout.qubits("A_new"), layout.qubits("A_bar")
        tab = StabilizerTableau.from_generators(layout.total, bell_generators(layout.total, A_new, A_bar),
                                                chooser=chooser)
        rec = tab.run_schedule(schedule, positions=S)
        homed = list(S)
        for i, q in enumerate(a.members):
            homed[q] = A_new[i]
        bits = 0
        for j in range(schedule.tau - 1, -1, -1):
            if tab.measure(embed(schedule.ops[j], tab.n, homed)) < 0:
                bits |= 1 << j
        return rec.outcomes.bits ^ bits

    for log2w, s in enumerate_branches(run):
        hist[s] += Fraction(1, 2 ** (-log2w))
    return dict(hist)


def choi_basis(k: int) -> list[PauliString]:
    """All 4**k Paulis on k qubits, in symplectic-integer order."""
    return [PauliString.from_symplectic(k, v) for v in range(4 ** k)]


def choi_weights(tableau: StabilizerTableau, pairs: Sequence[tuple[int, int]]) -> dict[str, Fraction]:
    """Overlap of the paired state with every twisted EPR state |P_A>."""
    out = {}
    for p in choi_basis(len(pairs)):
        out[p.letters()] = _fraction(fidelity_log2(tableau, pairs, twist=p))
    return out


def distill_AB_average(schedule: MeasurementSchedule, region, mode="exhaustive",
                       include_reference: bool = False, seed=None) -> dict[str, Fraction | float]:
    """Outcome-averaged weights of the output on the twisted EPR basis.

    ``mode="exhaustive"`` enumerates every outcome branch with its exact
    probability; an integer ``mode`` averages that many sampled runs.
    """
    code = DualCode(schedule)
    a = _as_mask(schedule.n, region)
    totals: dict[str, Fraction] = defaultdict(Fraction)
    if mode == "exhaustive":
        def run(chooser):
            res = distill_AB(schedule, a, include_reference=include_reference, chooser=chooser, code=code)
            return choi_weights(res.tableau, res.pairs)

        for log2w, weights in enumerate_branches(run):
            w = Fraction(1, 2 ** (-log2w))
            for key, val in weights.items():
                totals[key] += w * val
        return dict(totals)
    runs = int(mode)
    rng = np.random.default_rng(seed)
    acc: dict[str, float] = defaultdict(float)
    for _ in range(runs):
        res = distill_AB(schedule, a, rng=rng, include_reference=include_reference, code=code)
        for key, val in choi_weights(res.tableau, res.pairs).items():
            acc[key] += float(val) / runs
    return dict(acc)


def averaged_output_prediction(schedule: MeasurementSchedule, region) -> dict[str, Fraction]:
    """Uniform mixture of |P_A> over the Paulis P_A whose codewords are null."""
    code = DualCode(schedule)
    a = _as_mask(schedule.n, region)
    null = [p for p in choi_basis(len(a)) if code.is_null(embed(p, schedule.n, a.members))]
    w = Fraction(1, len(null))
    out = {p.letters(): Fraction(0) for p in choi_basis(len(a))}
    for p in null:
        out[p.letters()] = w
    return out


def no_feedback_mass(schedule: MeasurementSchedule, region) -> Fraction:
    """Exact probability that the decoder returns the identity."""
    a = _as_mask(schedule.n, region)
    code = DualCode(schedule)
    total = Fraction(0)
    for s, w in sum_vector_histogram(schedule, a).items():
        if code.decode(SignVector(schedule.tau, s), a).is_identity:
            total += w
    return total


# system-reference distillation --------------------------------------------------

@dataclass
class ChoiResult:
    m: SignVector
    m_bar: SignVector
    s: SignVector
    indices: tuple[int, ...]
    feedback: PauliString
    logical_correlations: bool
    partner_correlations_vanish: bool
    seed: object = None
    tableau: StabilizerTableau | None = field(default=None, repr=False)

    def as_record(self) -> dict:
        return {
            "m": list(self.m.spins()),
            "m_bar": list(self.m_bar.spins()),
            "s": list(self.s.spins()),
            "feedback": str(self.feedback),
            "fidelity_log2": 0 if self.logical_correlations else None,
            "seed": self.seed,
        }


def mirrored(p: PauliString, n: int) -> PauliString:
    """p on the system (qubits 0..n-1) times p* on the reference (n..2n-1)."""
    left = embed(p.unsigned(), 2 * n, range(n))
    right = embed(p.unsigned().conjugate(), 2 * n, range(n, 2 * n))
    return multiply(left, right)


def distill_system_reference(schedule: MeasurementSchedule, rng: np.random.Generator | None = None,
                             seed=None, chooser: Callable[[], int] | None = None,
                             code: DualCode | None = None) -> ChoiResult:
    """Distill the Choi state of the measured code between system and reference.

    Layout ``[S | R]``.  The schedule is measured on S (outcomes m), then its
    complex conjugate on R in the same order (outcomes m_bar).  The sum
    vector is a product of reverse error vectors; the corresponding product
    of measured operators, conjugated, is applied to R.
    """
    n = schedule.n
    S, R = list(range(n)), list(range(n, 2 * n))
    tab = StabilizerTableau.with_reference(n, rng=_rng(rng, seed), chooser=chooser)
    m = tab.run_schedule(schedule, positions=S).outcomes
    bits = 0
    for j, p in enumerate(schedule.ops):
        if tab.measure(embed(p.conjugate(), tab.n, R)) < 0:
            bits |= 1 << j
    m_bar = SignVector(schedule.tau, bits)
    s = m * m_bar
    code = code if code is not None else DualCode(schedule)
    lam, p_lam = code.decode_reverse(s)
    tab.apply_pauli(embed(p_lam.conjugate(), tab.n, R))

    logical_ok = all(tab.expectation(mirrored(g, n)) == 1 for g in build_logical(schedule).paulis())
    partners_ok = True
    for g in build_stabilizer(schedule).paulis():
        q = next(bits_of(g.support))
        partner = PauliString.single(n, q, "Z" if (g.x >> q) & 1 else "X")
        partners_ok &= tab.expectation(mirrored(partner, n)) == 0
    return ChoiResult(m, m_bar, s, lam, p_lam, logical_ok, partners_ok, seed, tab)


def averaged_expectations(runs, qubits: Sequence[int]) -> dict[str, Fraction]:
    """Exact Pauli expectations on ``qubits`` of an outcome-weighted mixture.

    ``runs`` yields (log2_weight, tableau) pairs.  Only stabilizer elements
    supported on ``qubits`` have nonzero expectation in each branch.
    """
    qs = list(qubits)
    out: dict[str, Fraction] = defaultdict(Fraction)
    for log2w, tab in runs:
        w = Fraction(1, 2 ** (-log2w))
        gens = tab.local_generators(qs)
        for c in range(1 << len(gens)):
            g = PauliString.identity(tab.n)
            for k in bits_of(c):
                g = multiply(g, gens[k])
            letters = "".join(g.letters()[q] for q in qs)
            out[letters] += w * g.sign
    return {k: v for k, v in out.items() if v != 0}


def choi_mixture_expectations(paulis: Sequence[PauliString]) -> dict[str, Fraction]:
    """Pauli expectations of the uniform mixture of |P> over a group of Paulis.

    The state lives on 2k qubits, the left half paired with the right half.
    Q (x) Q* has expectation 1 when Q commutes with every P, and every other
    Pauli has expectation 0.
    """
    k = paulis[0].n if paulis else 0
    out = {}
    for v in range(4 ** k):
        q = PauliString.from_symplectic(k, v)
        if all(commutes(q, p) > 0 for p in paulis):
            full = multiply(embed(q, 2 * k, range(k)), embed(q.conjugate(), 2 * k, range(k, 2 * k)))
            out[full.letters()] = Fraction(full.sign)
    return out


# single reference qubit encoded into the system ---------------------------------

@dataclass
class ReferenceQubitResult:
    m: SignVector
    m_bar: SignVector
    s: SignVector
    feedback: PauliString
    epr_fidelity: Fraction
    fidelity_log2: int | None
    decoded: bool
    seed: object = None

    def as_record(self) -> dict:
        return {
            "m": list(self.m.spins()),
            "m_bar": list(self.m_bar.spins()),
            "s": list(self.s.spins()),
            "feedback": str(self.feedback),
            "fidelity_log2": self.fidelity_log2,
            "seed": self.seed,
        }


def reference_qubit_schedule(schedule: MeasurementSchedule, encoding: Sequence[tuple]) -> MeasurementSchedule:
    """(n+1)-qubit schedule: Bell ops with the reference, ancilla Z's, then the record.

    The last system qubit is the encoded one, the reference is qubit n, and
    every prefix op is pushed through the encoding circuit.
    """
    n = schedule.n
    last = n - 1
    pre = [PauliString.single(n, last, "X"), PauliString.single(n, last, "Z")]
    pre += [PauliString.single(n, q, "Z") for q in range(n - 1)]
    pre = conjugate_paulis(pre, encoding, n)
    ops = []
    for i, p in enumerate(pre):
        q = embed(p, n + 1, range(n))
        if i < 2:
            q = multiply(q, PauliString.single(n + 1, n, "XZ"[i]))
        ops.append(q)
    ops += [embed(p, n + 1, range(n)) for p in schedule.ops]
    return MeasurementSchedule(n + 1, tuple(ops))


def distill_gullans_huse(n: int, schedule: MeasurementSchedule, encoding: Sequence[tuple] = (),
                         rng: np.random.Generator | None = None, seed=None,
                         chooser: Callable[[], int] | None = None) -> ReferenceQubitResult:
    """Recover a reference qubit's entanglement after it was encoded and monitored.

    Qubits 0..n-1 are the system and qubit n the reference R.  The last system
    qubit starts maximally entangled with R, the others in |0>, then
    ``encoding`` (a gate list on the system) runs and ``schedule`` (expressed
    in the frame after encoding) is measured.  The record is undone, the
    ancilla checks are re-measured, the encoding is inverted, and the
    decoded single-qubit correction is applied to the last system qubit,
    which then plays the partner of R.  The final Bell measurements are
    never performed, so their sum-vector entries are +1.
    """
    if schedule.n != n:
        raise ValueError(f"schedule on {schedule.n} qubits, expected {n}")
    last, ref = n - 1, n
    gens = [PauliString.single(n + 1, q, "Z") for q in range(n - 1)]
    gens += bell_generators(n + 1, [last], [ref])
    tab = StabilizerTableau.from_generators(n + 1, gens, rng=_rng(rng, seed), chooser=chooser)
    tab.apply_circuit(encoding)
    m = tab.run_schedule(schedule, positions=range(n)).outcomes

    mbar_bits = 0
    for j in range(schedule.tau - 1, -1, -1):
        if tab.measure(embed(schedule.ops[j], n + 1, range(n))) < 0:
            mbar_bits |= 1 << j
    checks = conjugate_paulis([PauliString.single(n, q, "Z") for q in range(n - 1)], encoding, n)
    z_bits = 0
    for q in range(n - 2, -1, -1):
        if tab.measure(embed(checks[q], n + 1, range(n))) < 0:
            z_bits |= 1 << q
    tab.apply_circuit(inverse_circuit(list(encoding)))

    m_bar = SignVector(schedule.tau, mbar_bits)
    s_sched = m * m_bar
    width = 2 + (n - 1) + schedule.tau
    s_full = SignVector(width, (z_bits << 2) | (s_sched.bits << (n + 1)))
    code = DualCode(reference_qubit_schedule(schedule, encoding))
    try:
        feedback = code.decode(s_full, [ref])
        decoded = True
    except DecodeError:
        feedback = PauliString.identity(1)
        decoded = False
    tab.apply_pauli(embed(feedback, n + 1, [last]))
    flog = fidelity_log2(tab, [(ref, last)])
    return ReferenceQubitResult(m, m_bar, s_sched, feedback, _fraction(flog), flog, decoded, seed)
