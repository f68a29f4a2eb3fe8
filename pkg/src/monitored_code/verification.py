"""Named, independently runnable checks of the code/tableau correspondence.

Every check draws random schedules, computes a quantity two ways (from the
dual code or group recursion, and from an explicit tableau simulation or
exhaustive enumeration) and compares them exactly.
"""

from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .distillation import (
    averaged_expectations,
    choi_mixture_expectations,
    distill_AB,
    distill_AB_average,
    distill_system_reference,
    sum_vector_prediction,
    averaged_output_prediction,
    sum_vector_histogram,
)
from .dual_code import DualCode, EntropyCalculator, ExtendedDualCode
from .groups import (
    PauliGroupGens,
    build_logical,
    build_stabilizer,
    commutant,
    logical_history,
    stabilizer_history,
)
from .pauli_core import PauliString, SubsystemMask, embed
from .schedule import MeasurementSchedule
from .tableau import StabilizerTableau, enumerate_branches


class InvariantViolation(AssertionError):
    pass


@dataclass
class CheckResult:
    name: str
    passed: bool
    count: int
    seconds: float
    detail: str = ""

    def as_record(self) -> dict:
        return {"check": self.name, "passed": self.passed, "count": self.count,
                "seconds": round(self.seconds, 3), "detail": self.detail}


# random inputs ---------------------------------------------------------------

def random_pauli(rng: np.random.Generator, n: int, signed: bool = True) -> PauliString:
    v = 0
    while v == 0:
        v = int(rng.integers(1, 4 ** n))
    p = PauliString.from_symplectic(n, v)
    return p.with_sign(-1) if signed and rng.random() < 0.5 else p


def random_schedule(rng: np.random.Generator, n: int, tau: int) -> MeasurementSchedule:
    return MeasurementSchedule(n, tuple(random_pauli(rng, n) for _ in range(tau)))


def random_region(rng: np.random.Generator, n: int, proper: bool = True) -> SubsystemMask:
    hi = (1 << n) - 1 if proper and n > 1 else 1 << n
    bits = int(rng.integers(1, hi))
    return SubsystemMask.of(n, [q for q in range(n) if bits >> q & 1])


def _instances(rng, n_max, tau_max, trials, n_min=1):
    for _ in range(trials):
        n = int(rng.integers(n_min, n_max + 1))
        tau = int(rng.integers(0, tau_max + 1))
        yield random_schedule(rng, n, tau)


def _weight(log2w: int) -> Fraction:
    return Fraction(1, 2 ** (-log2w))


# tableau-side quantities ---------------------------------------------------------

def tableau_entropies(schedule: MeasurementSchedule, region, rng) -> dict:
    """Entropies of |Psi(m)> on [S | R] for one sampled outcome record."""
    n = schedule.n
    a = SubsystemMask.of(n, region) if not isinstance(region, SubsystemMask) else region
    b = a.complement()
    tab = StabilizerTableau.with_reference(n, rng=rng)
    tab.run_schedule(schedule)
    ref = range(n, 2 * n)
    s_a = tab.subsystem_entropy(a.members)
    s_b = tab.subsystem_entropy(b.members)
    s_ab = tab.subsystem_entropy(range(n))
    s_r = tab.subsystem_entropy(ref)
    return {"S_A": s_a, "S_B": s_b, "S_R": s_r, "S_AB": s_ab,
            "S_A_given_B": s_ab - s_b, "I_AB": s_a + s_b - s_ab,
            "I_AR": s_a + s_r - tab.subsystem_entropy(list(a.members) + list(ref))}


def forward_reverse_distribution(schedule: MeasurementSchedule, region, pauli: PauliString | None = None,
                                 ) -> dict[tuple[int, int], Fraction]:
    """Prob(m, m_bar; P_A): measure forward, apply P_A, measure in reverse, from I/d."""
    n = schedule.n
    a = SubsystemMask.of(n, region) if not isinstance(region, SubsystemMask) else region
    out: dict[tuple[int, int], Fraction] = defaultdict(Fraction)

    def run(chooser):
        tab = StabilizerTableau.maximally_mixed(n, chooser=chooser)
        m = tab.run_schedule(schedule).outcomes.bits
        if pauli is not None:
            tab.apply_pauli(embed(pauli, n, a.members))
        mbar = 0
        for j in range(schedule.tau - 1, -1, -1):
            if tab.measure(schedule.ops[j]) < 0:
                mbar |= 1 << j
        return m, mbar

    for log2w, key in enumerate_branches(run):
        out[key] += _weight(log2w)
    return dict(out)


def distillation_distribution(schedule: MeasurementSchedule, region) -> dict[tuple[int, int], Fraction]:
    """Prob(m, m_bar) of the A-B distillation protocol, exhaustively."""
    code = DualCode(schedule)
    out: dict[tuple[int, int], Fraction] = defaultdict(Fraction)

    def run(chooser):
        res = distill_AB(schedule, region, chooser=chooser, code=code)
        return res.m.bits, res.m_bar.bits

    for log2w, key in enumerate_branches(run):
        out[key] += _weight(log2w)
    return dict(out)


# checks ------------------------------------------------------------------------

def _fail(name, k, detail):
    return False, k, f"{name}: {detail}"


def check_recoverability(rng, n_max=5, trials=200, tau_max=10):
    """Recoverable region  <=>  I(A,B) = 2 n_A, for a sampled outcome record."""
    k = 0
    for sched in _instances(rng, n_max, tau_max, trials, n_min=2):
        a = random_region(rng, sched.n)
        want = DualCode(sched).recoverable(a)
        got = tableau_entropies(sched, a, rng)["I_AB"] == 2 * len(a)
        if want != got:
            return _fail("recoverability", k, f"{a.members} in {list(map(str, sched.ops))}")
        k += 1
    return True, k, ""


def check_conditional_entropy(rng, n_max=5, trials=200, tau_max=10):
    """Every entropy in the code report equals the tableau value."""
    k = 0
    for sched in _instances(rng, n_max, tau_max, trials, n_min=2):
        a = random_region(rng, sched.n)
        rep = EntropyCalculator(sched).report(a).as_dict()
        tab = tableau_entropies(sched, a, rng)
        for key, val in tab.items():
            if rep[key] != val:
                return _fail("conditional_entropy", k, f"{key}: code {rep[key]} vs tableau {val}")
        k += 1
    return True, k, ""


def check_sum_vector(rng, n_max=3, trials=30, tau_max=5):
    """Sum(s) is uniform on the total error span and zero elsewhere."""
    k = 0
    for sched in _instances(rng, n_max, tau_max, trials):
        a = random_region(rng, sched.n, proper=False)
        if sum_vector_histogram(sched, a) != sum_vector_prediction(sched, a):
            return _fail("sum_vector", k, list(map(str, sched.ops)))
        k += 1
    return True, k, ""


def check_averaged_output(rng, n_max=3, trials=20, tau_max=5):
    """Outcome-averaged A-B output is the uniform mixture over null P_A."""
    k = 0
    for sched in _instances(rng, n_max, tau_max, trials):
        a = random_region(rng, sched.n, proper=False)
        got = {key: v for key, v in distill_AB_average(sched, a).items() if v}
        want = {key: v for key, v in averaged_output_prediction(sched, a).items() if v}
        if got != want:
            return _fail("averaged_output", k, f"{got} vs {want}")
        k += 1
    return True, k, ""


def check_pauli_average(rng, n_max=3, trials=20, tau_max=5):
    """Prob(m, m_bar) averages Prob(m, m_bar; P_A) over all Paulis on A."""
    k = 0
    for sched in _instances(rng, n_max, tau_max, trials):
        a = random_region(rng, sched.n, proper=False)
        avg: dict = defaultdict(Fraction)
        na = len(a)
        for v in range(4 ** na):
            for key, w in forward_reverse_distribution(sched, a, PauliString.from_symplectic(na, v)).items():
                avg[key] += w / 4 ** na
        if dict(avg) != distillation_distribution(sched, a):
            return _fail("pauli_average", k, list(map(str, sched.ops)))
        k += 1
    return True, k, ""


def check_codeword_shift(rng, n_max=3, trials=20, tau_max=5):
    """Inserting P_A flips m_bar by its codeword; Sum(s; P_A) is uniform on that coset of E."""
    k = 0
    for sched in _instances(rng, n_max, tau_max, trials):
        a = random_region(rng, sched.n, proper=False)
        code = DualCode(sched)
        base = forward_reverse_distribution(sched, a)
        p = random_pauli(rng, len(a), signed=False)
        c = code.codeword_bits(embed(p, sched.n, a.members))
        dist = forward_reverse_distribution(sched, a, p)
        shifted = {(m, mb ^ c): w for (m, mb), w in base.items()}
        if dist != shifted:
            return _fail("codeword_shift", k, "commutation")
        sums: dict = defaultdict(Fraction)
        for (m, mb), w in dist.items():
            sums[m ^ mb] += w
        space = code.error_space
        want = {c ^ e: Fraction(1, 2 ** space.rank) for e in space.elements()}
        if dict(sums) != want:
            return _fail("codeword_shift", k, "coset sum")
        k += 1
    return True, k, ""


def check_stabilizer_signs(rng, n_max=6, trials=200, tau_max=12):
    """Every element of the stabilizer group has a definite sign on |Psi(m)>."""
    k = 0
    for sched in _instances(rng, n_max, tau_max, trials):
        tab = StabilizerTableau.with_reference(sched.n, rng=rng)
        tab.run_schedule(sched)
        for g in build_stabilizer(sched).paulis():
            if tab.expectation(embed(g, 2 * sched.n, range(sched.n))) == 0:
                return _fail("stabilizer_signs", k, str(g))
        k += 1
    return True, k, ""


def _all_paulis(n):
    return (PauliString.from_symplectic(n, v) for v in range(4 ** n))


def check_logical_null(rng, n_max=3, trials=100, tau_max=8):
    """Logical group membership  <=>  codeword in the error span (all Paulis)."""
    k = 0
    for sched in _instances(rng, n_max, tau_max, trials):
        code, logic = DualCode(sched), build_logical(sched)
        for p in _all_paulis(sched.n):
            if logic.contains(p) != code.is_null(p):
                return _fail("logical_null", k, f"{p} in {list(map(str, sched.ops))}")
        k += 1
    return True, k, ""


def check_reverse_sum_vector(rng, n_max=3, trials=20, tau_max=5):
    """System-reference sum vectors occur exactly on the reverse error span."""
    k = 0
    for sched in _instances(rng, n_max, tau_max, trials):
        code = DualCode(sched)
        seen = set()
        for _, s in enumerate_branches(lambda ch: distill_system_reference(sched, chooser=ch, code=code).s.bits):
            seen.add(s)
        if seen != set(code.reverse_error_space.elements()):
            return _fail("reverse_sum_vector", k, list(map(str, sched.ops)))
        k += 1
    return True, k, ""


def check_choi_average(rng, n_max=3, trials=20, tau_max=5):
    """Outcome-averaged Choi output is the uniform mixture of |P> over the stabilizer group."""
    k = 0
    for sched in _instances(rng, n_max, tau_max, trials):
        n = sched.n
        code = DualCode(sched)
        runs = enumerate_branches(lambda ch: distill_system_reference(sched, chooser=ch, code=code).tableau)
        got = averaged_expectations(runs, range(2 * n))
        stab = build_stabilizer(sched).paulis()
        want = choi_mixture_expectations(stab if stab else [PauliString.identity(n)])
        if got != want:
            return _fail("choi_average", k, list(map(str, sched.ops)))
        k += 1
    return True, k, ""


def check_stabilizer_null(rng, n_max=3, trials=100, tau_max=8):
    """Stabilizer group membership  <=>  extended codeword in the extended error span."""
    k = 0
    for sched in _instances(rng, n_max, tau_max, trials):
        ext, stab = ExtendedDualCode(sched), build_stabilizer(sched)
        for p in _all_paulis(sched.n):
            if stab.contains(p) != ext.is_null(p):
                return _fail("stabilizer_null", k, f"{p} in {list(map(str, sched.ops))}")
        k += 1
    return True, k, ""


def check_commutant(rng, n_max=6, trials=200, tau_max=12):
    """L = Comm(S), S = Comm(L), S is abelian and inside L, k is integral."""
    k = 0
    for sched in _instances(rng, n_max, tau_max, trials):
        s, l = build_stabilizer(sched), build_logical(sched)
        ok = (commutant(s).same_group(l) and commutant(l).same_group(s) and s.is_abelian()
              and all(l.contains(g) for g in s.paulis()) and (l.rank - s.rank) % 2 == 0)
        if not ok:
            return _fail("commutant", k, list(map(str, sched.ops)))
        k += 1
    return True, k, ""


def check_recursion(rng, n_max=6, trials=200, tau_max=12):
    """Each P_t lies in Stab^(t); Stab matches the tableau's unsigned group."""
    k = 0
    for sched in _instances(rng, n_max, tau_max, trials):
        tab = StabilizerTableau.maximally_mixed(sched.n, rng=rng)
        for t, g in enumerate(stabilizer_history(sched)):
            p = sched.ops[t]
            if not g.contains(p) or not all(g.echelon.contains(v) for v in g.gens):
                return _fail("recursion", k, f"t={t + 1}")
            tab.measure(p)
            if not PauliGroupGens.from_paulis(sched.n, tab.generators()).same_group(g):
                return _fail("recursion", k, f"tableau differs at t={t + 1}")
        hist = logical_history(sched)
        if hist and not commutant(stabilizer_history(sched)[-1]).same_group(hist[-1]):
            return _fail("recursion", k, "logical history end")
        k += 1
    return True, k, ""


def check_cleaning(rng, n_max=6, trials=200, tau_max=12):
    """g_A + g_B = g and the null-count identities of the extended code."""
    k = 0
    for sched in _instances(rng, n_max, tau_max, trials, n_min=2):
        if not EntropyCalculator(sched).cleaning(random_region(rng, sched.n)).identities_hold:
            return _fail("cleaning", k, list(map(str, sched.ops)))
        k += 1
    return True, k, ""


def check_flatness(rng, n_max=4, trials=50, tau_max=6):
    """Every possible outcome record of a schedule has the same probability."""
    k = 0
    for sched in _instances(rng, n_max, tau_max, trials):
        def run(chooser):
            tab = StabilizerTableau.maximally_mixed(sched.n, chooser=chooser)
            return tab.run_schedule(sched).log2_prob

        weights = {lp for _, lp in enumerate_branches(run)}
        if len(weights) != 1:
            return _fail("flatness", k, f"weights {sorted(weights)}")
        k += 1
    return True, k, ""


def check_recoverable_fidelity(rng, n_max=6, trials=100, tau_max=12):
    """Recoverable regions distill perfect EPR pairs on every run."""
    k = 0
    attempts = 0
    while k < trials and attempts < 50 * trials:
        attempts += 1
        sched = next(_instances(rng, n_max, tau_max, 1, n_min=2))
        a = random_region(rng, sched.n)
        if not DualCode(sched).recoverable(a):
            continue
        if distill_AB(sched, a, rng=rng).epr_fidelity != 1:
            return _fail("recoverable_fidelity", k, list(map(str, sched.ops)))
        k += 1
    return True, k, ""


Check = Callable[..., tuple]

CHECKS: dict[str, Check] = {
    "recoverability": check_recoverability,
    "conditional_entropy": check_conditional_entropy,
    "sum_vector": check_sum_vector,
    "averaged_output": check_averaged_output,
    "pauli_average": check_pauli_average,
    "codeword_shift": check_codeword_shift,
    "stabilizer_signs": check_stabilizer_signs,
    "logical_null": check_logical_null,
    "reverse_sum_vector": check_reverse_sum_vector,
    "choi_average": check_choi_average,
    "stabilizer_null": check_stabilizer_null,
    "commutant": check_commutant,
    "recursion": check_recursion,
    "cleaning": check_cleaning,
    "flatness": check_flatness,
    "recoverable_fidelity": check_recoverable_fidelity,
}

SUITES = {
    "theorems": ["recoverability", "conditional_entropy", "recoverable_fidelity"],
    "lemmas": ["sum_vector", "averaged_output", "pauli_average", "codeword_shift", "stabilizer_signs",
               "logical_null", "reverse_sum_vector", "choi_average", "stabilizer_null"],
    "structure": ["commutant", "recursion", "cleaning", "flatness"],
}
SUITES["all"] = SUITES["theorems"] + SUITES["lemmas"] + SUITES["structure"]


def run_check(name: str, seed: int = 0, n_max: int | None = None, trials: int | None = None) -> CheckResult:
    fn = CHECKS[name]
    kw = {}
    if n_max is not None:
        kw["n_max"] = n_max
    if trials is not None:
        kw["trials"] = trials
    rng = np.random.default_rng([seed, sorted(CHECKS).index(name)])
    t0 = time.perf_counter()
    passed, count, detail = fn(rng, **kw)
    return CheckResult(name, passed, count, time.perf_counter() - t0, detail)


def run_suite(suite: str = "all", seed: int = 0, n_max: int | None = None,
              trials: int | None = None) -> list[CheckResult]:
    names = SUITES[suite] if suite in SUITES else [suite]
    return [run_check(name, seed, n_max, trials) for name in names]
