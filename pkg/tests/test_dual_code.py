import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import dense
from monitored_code.dual_code import (
    DecodeError,
    DualCode,
    EntropyCalculator,
    ExtendedDualCode,
    cleaning_report,
    code_distance_contiguous,
    entropy_suite,
)
from monitored_code.groups import build_logical, build_stabilizer
from monitored_code.pauli_core import PauliString, SignVector, SubsystemMask, embed
from monitored_code.schedule import MeasurementSchedule

S = MeasurementSchedule.from_strings
P = PauliString.from_str


def sv(*spins):
    return SignVector.from_spins(spins)


def spins_set(space, width):
    return {SignVector(width, v).spins() for v in space.elements()}


COMMUTING = S(["+XXI", "+ZZX", "+YZZ"])
NONCOMMUTING = S(["+XZI", "+ZIX", "+IXX"])
NOT_RECOVERABLE = S(["+XIZ", "+ZZZ", "+YZZ"])


def codeword_table(code):
    return {a: code.codeword(P(a + "II")).spins() for a in "IXYZ"}


def error_table(code):
    return [code.error_vector(i).spins() for i in (1, 2, 3)]


def test_commuting_example_tables():
    code = DualCode(COMMUTING)
    assert codeword_table(code) == {"I": (1, 1, 1), "X": (1, -1, -1), "Y": (-1, -1, 1), "Z": (-1, 1, -1)}
    assert error_table(code) == [(1, 1, 1)] * 3
    assert spins_set(code.error_space, 3) == {(1, 1, 1)}
    assert code.recoverable([0])
    assert code.conditional_entropy([0]) == -1


def test_noncommuting_example_tables():
    code = DualCode(NONCOMMUTING)
    assert codeword_table(code) == {"I": (1, 1, 1), "X": (1, -1, 1), "Y": (-1, -1, 1), "Z": (-1, 1, 1)}
    assert error_table(code) == [(1, 1, 1), (-1, 1, 1), (-1, 1, 1)]
    # the span generated by the tabulated error vectors
    assert spins_set(code.error_space, 3) == {(1, 1, 1), (-1, 1, 1)}
    # C(Z_A) = C(I_A) * E(P_2): the codewords collide, so qubit 0 is not recoverable
    assert not code.recoverable([0])
    assert code.conditional_entropy([0]) == 0
    assert EntropyCalculator(NONCOMMUTING).report([0]).I_AB == 1


def test_not_recoverable_example_tables():
    code = DualCode(NOT_RECOVERABLE)
    assert codeword_table(code) == {"I": (1, 1, 1), "X": (1, -1, -1), "Y": (-1, -1, 1), "Z": (-1, 1, -1)}
    assert error_table(code) == [(1, 1, 1), (-1, 1, 1), (-1, -1, 1)]
    assert spins_set(code.error_space, 3) == {(1, 1, 1), (-1, 1, 1), (-1, -1, 1), (1, -1, 1)}
    cosets = {a: {(sv(*c) * SignVector(3, e)).spins() for e in code.error_space.elements()}
              for a, c in codeword_table(code).items()}
    assert cosets["X"] == {(1, -1, -1), (-1, -1, -1), (-1, 1, -1), (1, 1, -1)}
    assert cosets["Y"] == {(-1, -1, 1), (1, -1, 1), (1, 1, 1), (-1, 1, 1)}
    assert cosets["Z"] == {(-1, 1, -1), (1, 1, -1), (1, -1, -1), (-1, -1, -1)}
    assert not code.recoverable([0])
    assert code.conditional_entropy([0]) == 0
    assert code.log2_null_count([0]) == 1


def test_two_qubit_examples():
    for ops, errs in ((["+XX", "+ZZ"], {(1, 1)}), (["+XZ", "+ZZ"], {(1, 1), (-1, 1)})):
        code = DualCode(S(ops))
        assert {a: code.codeword(P(a + "I")).spins() for a in "IXYZ"} == {
            "I": (1, 1), "X": (1, -1), "Y": (-1, -1), "Z": (-1, 1)}
        assert spins_set(code.error_space, 2) == errs
    ents = [DualCode(s).conditional_entropy([0])
            for s in (MeasurementSchedule(2, ()), S(["+ZI"]), S(["+ZZ"]), S(["+XX", "+ZZ"]), S(["+XZ", "+ZZ"]))]
    assert ents == [1, 0, 0, -1, 0]


def test_group_example_codewords():
    code = DualCode(S(["+ZII", "+XII", "+IZI", "+IXI"]))
    assert code.codeword(P("IIX")).spins() == code.codeword(P("IIZ")).spins() == (1, 1, 1, 1)
    assert code.codeword(P("XII")).spins() == (-1, 1, 1, 1) == code.error_vector(2).spins()
    assert code.codeword(P("IXI")).spins() == (1, 1, -1, 1) == code.error_vector(4).spins()
    code = DualCode(S(["+ZI", "+IZ", "+XX"]))
    assert code.codeword(P("ZZ")).spins() == (1, 1, 1)
    assert code.codeword(P("XX")).spins() == (-1, -1, 1)


def test_decode_example():
    code = DualCode(COMMUTING)
    assert code.decode(sv(-1, -1, 1), [0]).letters() == "Y"
    assert DualCode(S(["+XZ", "+ZZ"])).decode(sv(1, -1), [0]).letters() == "X"


# random schedules ------------------------------------------------------------

def random_schedule(rng, n, tau):
    ops = [PauliString.from_symplectic(n, int(rng.integers(1, 4 ** n)), 2 * int(rng.integers(2)))
           for _ in range(tau)]
    return MeasurementSchedule(n, tuple(ops))


schedules = st.builds(
    lambda seed, n, tau: random_schedule(np.random.default_rng(seed), n, tau),
    st.integers(0, 2 ** 32 - 1), st.integers(1, 3), st.integers(0, 6))


def sample_outcomes(sched, rng):
    n = sched.n
    psi = dense.epr_with_reference(n)
    for p in sched.ops:
        mat = dense.pauli_matrix(embed(p, 2 * n, range(n)))
        plus, pr = dense.project(psi, mat, 1)
        if rng.random() < pr:
            psi = plus
        else:
            psi, _ = dense.project(psi, mat, -1)
    return psi


@settings(max_examples=60, deadline=None)
@given(schedules, st.integers(0, 2 ** 32 - 1))
def test_entropy_report_matches_dense_states(sched, seed):
    n = sched.n
    psi = sample_outcomes(sched, np.random.default_rng(seed))
    calc = EntropyCalculator(sched)
    ref = list(range(n, 2 * n))
    ent = lambda qs: dense.entropy(psi, qs, 2 * n)
    for k in range(1, 1 << n):
        a = [q for q in range(n) if k >> q & 1]
        b = [q for q in range(n) if not k >> q & 1]
        rep = calc.report(a)
        s_a, s_b, s_r, s_ab = ent(a), ent(b), ent(ref), ent(range(n))
        want = {"S_A": s_a, "S_B": s_b, "S_R": s_r, "S_AB": s_ab, "S_A_given_B": s_ab - s_b,
                "S_AB_given_R": ent(range(2 * n)) - s_r, "I_AB": s_a + s_b - s_ab,
                "I_AR": s_a + s_r - ent(a + ref)}
        for key, val in want.items():
            assert getattr(rep, key) == pytest.approx(val, abs=1e-9), key


@settings(max_examples=60, deadline=None)
@given(schedules)
def test_null_counts_by_enumeration(sched):
    """N_{I_A} counted Pauli by Pauli, for both codes."""
    n = sched.n
    code, ext = DualCode(sched), ExtendedDualCode(sched)
    for k in range(1 << n):
        a = [q for q in range(n) if k >> q & 1]
        count = count_ext = 0
        for v in range(4 ** len(a)):
            p = embed(PauliString.from_symplectic(len(a), v), n, a)
            count += code.error_space.contains(code.codeword_bits(p))
            count_ext += ext.error_space.contains(ext.codeword_bits(p))
        assert 2 ** code.log2_null_count(a) == count
        assert 2 ** ext.log2_null_count(a) == count_ext


@settings(max_examples=60, deadline=None)
@given(schedules)
def test_codewords_are_commutation_patterns(sched):
    n = sched.n
    code = DualCode(sched)
    for v in range(4 ** n):
        p = PauliString.from_symplectic(n, v)
        m = dense.pauli_matrix(p)
        spins = []
        for q in sched.ops:
            mq = dense.pauli_matrix(q)
            spins.append(1 if np.allclose(m @ mq, mq @ m) else -1)
        assert code.codeword(p).spins() == tuple(spins)


@settings(max_examples=60, deadline=None)
@given(schedules)
def test_error_and_reverse_vectors_are_transposes(sched):
    code = DualCode(sched)
    t = sched.tau
    for i, j in itertools.product(range(1, t + 1), repeat=2):
        assert code.error_vector(i)[j - 1] == code.reverse_error_vector(j)[i - 1]
    for j in range(1, t + 1):
        # C(P_j) = E_rev(P_j) * E(P_j)
        assert code.codeword(sched.ops[j - 1]) == code.error_vector(j) * code.reverse_error_vector(j)


@settings(max_examples=60, deadline=None)
@given(schedules, st.data())
def test_decode_picks_the_least_valid_pauli(sched, data):
    n = sched.n
    code = DualCode(sched)
    k = data.draw(st.integers(1, (1 << n) - 1))
    a = [q for q in range(n) if k >> q & 1]
    total = code.total_error_space(a)
    s_bits = data.draw(st.sampled_from(sorted(total.elements())))
    s = SignVector(sched.tau, s_bits)
    got = code.decode(s, a)
    valid = []
    for v in range(4 ** len(a)):
        p = PauliString.from_symplectic(len(a), v)
        if code.error_space.contains(s_bits ^ code.codeword_bits(embed(p, n, a))):
            valid.append(p)
    assert got in valid
    key = lambda p: [p.x >> j & 1 for j in range(len(a))] + [p.z >> j & 1 for j in range(len(a))]
    assert got == min(valid, key=key)


def test_decode_outside_span_raises():
    code = DualCode(S(["+ZI", "+ZI"]))
    with pytest.raises(DecodeError):
        code.decode(sv(-1, 1), [0])
    with pytest.raises(DecodeError):
        code.decode_reverse(sv(-1, 1))


@settings(max_examples=60, deadline=None)
@given(schedules, st.data())
def test_decode_reverse_reproduces_the_sum_vector(sched, data):
    code = DualCode(sched)
    if sched.tau == 0:
        return
    s = data.draw(st.sampled_from(sorted(code.reverse_error_space.elements())))
    lam, prod = code.decode_reverse(SignVector(sched.tau, s))
    acc = 0
    for j in lam:
        acc ^= code.reverse_error_vector(j + 1).bits
    assert acc == s


@settings(max_examples=60, deadline=None)
@given(schedules, st.data())
def test_cleaning_identities(sched, data):
    n = sched.n
    k = data.draw(st.integers(0, (1 << n) - 1))
    a = [q for q in range(n) if k >> q & 1]
    rep = cleaning_report(SubsystemMask.of(n, a), sched)
    assert rep.identities_hold
    assert rep.g == build_logical(sched).rank - build_stabilizer(sched).rank


def _brute_distance(sched, periodic):
    n = sched.n
    stab, logic = build_stabilizer(sched), build_logical(sched)
    best = np.inf
    for length in range(1, n + 1):
        for start in range(n if periodic else n - length + 1):
            qs = list(SubsystemMask.interval(n, start, length, periodic))
            for v in range(1, 4 ** length):
                p = embed(PauliString.from_symplectic(length, v), n, qs)
                if logic.contains(p) and not stab.contains(p):
                    return length
    return best


@settings(max_examples=40, deadline=None)
@given(schedules, st.booleans())
def test_contiguous_distance_against_brute_force(sched, periodic):
    assert code_distance_contiguous(sched, periodic) == _brute_distance(sched, periodic)


def test_distance_examples():
    assert code_distance_contiguous(S(["+ZZI", "+IZZ"])) == 1
    assert code_distance_contiguous(S(["+ZII", "+XII", "+IZI", "+IXI"])) == 1
    assert code_distance_contiguous(S(["+ZI", "+IZ", "+XX"])) == np.inf


def test_entropy_suite_wrapper():
    rep = entropy_suite([0], COMMUTING)
    assert rep.S_A_given_B == -1 and rep.as_dict()["S_A_given_B"] == -1
