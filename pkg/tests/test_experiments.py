import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from monitored_code.dual_code import EntropyCalculator
from monitored_code.experiments import (
    SWEEP_COLUMNS,
    CircuitSpec,
    InsufficientData,
    brickwork_pairs,
    decoupling_profile,
    fit_code_exponent,
    gen_random_monitored_circuit,
    interval_profile,
    purity_rhs,
    purity_swap_check,
    random_stabilizer_generators,
    sample_circuit,
    schedule_from_circuit,
    simulate_interleaved,
    spec_hash,
    state_independence_check,
    steady_state_run,
    subleading_fit,
    sweep_measurement_rate,
)
from monitored_code.pauli_core import Gf2RowSpace, PauliString, embed, symplectic_product
from monitored_code.tableau import StabilizerTableau, enumerate_branches


def test_spec_validation():
    for bad in (dict(p=1.5), dict(depth=0), dict(boundary="twisted"), dict(unitary="haar")):
        kw = dict(n=4, depth=2, p=0.1) | bad
        with pytest.raises(ValueError):
            CircuitSpec(**kw)


def test_brickwork_layout():
    assert brickwork_pairs(4, 0, True) == [(0, 1), (2, 3)]
    assert brickwork_pairs(4, 1, True) == [(1, 2), (3, 0)]
    assert brickwork_pairs(4, 1, False) == [(1, 2)]
    assert brickwork_pairs(5, 1, True) == [(1, 2), (3, 4)]
    assert brickwork_pairs(2, 1, True) == []


def test_no_measurements_give_an_empty_schedule():
    sched = gen_random_monitored_circuit(CircuitSpec(6, 5, 0.0, seed=3))
    assert sched.tau == 0 and sched.n == 6


def test_measure_everything_once_without_gates():
    sched = gen_random_monitored_circuit(CircuitSpec(4, 1, 1.0, unitary="identity"))
    assert [str(p) for p in sched] == ["+ZIII", "+IZII", "+IIZI", "+IIIZ"]


def test_same_seed_same_circuit():
    spec = CircuitSpec(8, 6, 0.3, seed=11)
    assert sample_circuit(spec).ops == sample_circuit(spec).ops
    assert gen_random_monitored_circuit(spec) == gen_random_monitored_circuit(spec)
    assert spec_hash(spec) == spec_hash(CircuitSpec(8, 6, 0.3, seed=11))
    assert spec_hash(spec) != spec_hash(CircuitSpec(8, 6, 0.3, seed=12))


@pytest.mark.parametrize("seed", range(10))
def test_heisenberg_schedule_matches_interleaved_simulation(seed):
    n = 5
    spec = CircuitSpec(n, 6, 0.3, boundary="open" if seed % 2 else "periodic", seed=seed)
    circ = sample_circuit(spec)
    sched = schedule_from_circuit(circ)
    direct = StabilizerTableau.maximally_mixed(n, seed=seed)
    outcomes = simulate_interleaved(circ, direct)
    lifted = StabilizerTableau.maximally_mixed(n)
    rec = lifted.run_schedule(sched, outcomes=outcomes)
    assert rec.log2_prob == direct.log2_prob
    for g in direct.generators():
        assert lifted.expectation(g) == 1
    # with a reference the two differ by a unitary on R alone
    direct = StabilizerTableau.with_reference(n, seed=seed)
    outcomes = simulate_interleaved(circ, direct)
    lifted = StabilizerTableau.with_reference(n)
    lifted.run_schedule(sched, outcomes=outcomes)
    ref = list(range(n, 2 * n))
    for k in range(1 << n):
        a = [q for q in range(n) if k >> q & 1]
        assert lifted.subsystem_entropy(a) == direct.subsystem_entropy(a)
        assert lifted.subsystem_entropy(a + ref) == direct.subsystem_entropy(a + ref)


def test_maximally_mixed_without_measurement():
    out = steady_state_run(CircuitSpec(8, 16, 0.0, seed=1))
    assert out == {"S_half": 4.0, "S_R": 8, "tau": 0}


def test_sweep_records_regenerate_from_their_seed():
    res = sweep_measurement_rate([6], [0.1, 0.3], samples=2, seed=5)
    assert res.columns == SWEEP_COLUMNS
    assert len(res.records) == 4
    for r in res.records:
        spec = CircuitSpec(r["n"], r["depth"], r["p"], "periodic", r["seed"])
        assert spec_hash(spec) == r["spec_hash"]
        again = steady_state_run(spec)
        assert again["S_half"] == r["S_half"] and again["tau"] == r["tau"]
    assert res.to_csv() == sweep_measurement_rate([6], [0.1, 0.3], samples=2, seed=5).to_csv()
    assert res.to_csv().splitlines()[0] == ",".join(SWEEP_COLUMNS)
    assert len(res.to_jsonl().splitlines()) == 4


# entropy profiles against the tableau ---------------------------------------------

@pytest.mark.parametrize("seed", range(8))
def test_interval_profile_matches_tableau_entropies(seed):
    n = 6
    spec = CircuitSpec(n, 8, 0.25, seed=seed)
    circ = sample_circuit(spec)
    tab = StabilizerTableau.with_reference(n, seed=seed)
    simulate_interleaved(circ, tab)
    # entropies of the schedule state agree with the interleaved run (a unitary on R apart)
    sched = schedule_from_circuit(circ)
    lifted = StabilizerTableau.with_reference(n, seed=seed)
    lifted.run_schedule(sched)
    ref = list(range(n, 2 * n))
    prof = interval_profile(EntropyCalculator(sched))
    s_r = lifted.subsystem_entropy(ref)
    assert prof["S_R"] == s_r == tab.subsystem_entropy(ref)
    for row in prof["rows"]:
        a, b = list(range(row["L"])), list(range(row["L"], n))
        s_a, s_b = lifted.subsystem_entropy(a), lifted.subsystem_entropy(b)
        assert row["I_AR"] == s_a + s_r - lifted.subsystem_entropy(a + ref)
        assert row["I_AB"] == s_a + s_b - lifted.subsystem_entropy(a + b)
        assert row["g_A"] >= 0


def test_decoupling_profile_trivial_cases():
    out = decoupling_profile(CircuitSpec(5, 3, 0.0, seed=2))
    (s,) = out["samples"]
    assert s["single_site_I_AR"] == [2] * 5
    assert [r["I_AR"] for r in s["rows"]] == [2, 4, 6, 8]
    assert s["d_code"] == 1
    pure = decoupling_profile(CircuitSpec(5, 1, 1.0, unitary="identity"))
    (s,) = pure["samples"]
    assert s["S_R"] == 0 and s["single_site_I_AR"] == [0] * 5
    assert math.isinf(pure["d_code_median"])


def test_state_independence_without_measurement():
    spec = CircuitSpec(4, 2, 0.0, seed=1)
    out = state_independence_check(spec, [0, 1])
    pure = StabilizerTableau.computational(4, [0] * 4)
    simulate_interleaved(sample_circuit(spec), pure)
    assert out["S_A_given_B_mixed"] == 2
    assert out["S_A_given_B_product"] == -pure.subsystem_entropy([0, 1])
    assert out["entropy_equal"] == (out["S_A_given_B_product"] == 2)


# purity identity ---------------------------------------------------------------------

def lagrangians(n):
    seen = set()
    for combo in itertools.combinations(range(1, 4 ** n), n):
        if any(symplectic_product(u, v, n) for u, v in itertools.combinations(combo, 2)):
            continue
        space = Gf2RowSpace(2 * n, combo)
        if space.rank == n:
            key = frozenset(space.elements())
            if key not in seen:
                seen.add(key)
                yield [PauliString.from_symplectic(n, v) for v in combo]


def test_random_stabilizer_groups_are_uniform():
    n = 2
    groups = {frozenset(Gf2RowSpace(4, [g.symplectic for g in gens]).elements()) for gens in lagrangians(n)}
    assert len(groups) == 15
    rng = np.random.default_rng(8)
    draws = 15_000
    counts = Counter()
    for _ in range(draws):
        gens = random_stabilizer_generators(n, rng)
        key = frozenset(Gf2RowSpace(4, [g.symplectic for g in gens]).elements())
        assert key in groups
        counts[key] += 1
    sigma = math.sqrt(draws / 15 * (14 / 15))
    assert len(counts) == 15
    assert all(abs(c - draws / 15) <= 4 * sigma for c in counts.values())


def exact_swap_average(base, n, region):
    """Average of the estimator over every stabilizer projection of R, exactly."""
    groups = list(lagrangians(n))
    total = Fraction(0)
    for gens in groups:
        def run(chooser):
            tab = base.copy()
            tab.chooser, tab.log2_prob = chooser, 0
            for g in gens:
                tab.measure(embed(g, 2 * n, range(n, 2 * n)))
            return tab

        for log2w, tab in enumerate_branches(run):
            p = Fraction(2) ** log2w
            total += p * 2 ** n * p / Fraction(2) ** tab.subsystem_entropy(region)
    return total / len(groups)


def test_purity_identity_without_dynamics():
    res = purity_swap_check(CircuitSpec(2, 1, 0.0, unitary="identity"), [0], samples=400, seed=1)
    assert res.rhs == Fraction(4, 5)
    base = StabilizerTableau.with_reference(2)
    assert exact_swap_average(base, 2, [0]) == Fraction(4, 5)


@pytest.mark.parametrize("seed", range(6))
def test_purity_identity_exact_on_two_qubits(seed):
    spec = CircuitSpec(2, 3, 0.4, seed=seed)
    circ = sample_circuit(spec)
    base = StabilizerTableau.with_reference(2, seed=seed)
    simulate_interleaved(circ, base)
    rhs = purity_rhs(2, base.subsystem_entropy([0]), base.subsystem_entropy([1]))
    assert exact_swap_average(base, 2, [0]) == rhs


def test_purity_estimator_is_consistent():
    res = purity_swap_check(CircuitSpec(4, 6, 0.2, seed=4), [0, 1], samples=1500, seed=9)
    assert res.rhs == purity_rhs(4, res.S_A, res.S_B)
    assert abs(res.z) < 4


# fits ----------------------------------------------------------------------------------

def test_subleading_fit_recovers_synthetic_parameters():
    L = np.arange(2, 60, dtype=float)
    S = 0.4 * L + 1.5 * L ** 0.4 + 0.3 * np.log2(L)
    fit = subleading_fit(L, S)
    assert fit.gamma == pytest.approx(0.4, abs=1e-3)
    assert fit.a == pytest.approx(0.4, abs=1e-3)
    assert fit.rss < 1e-8


def test_subleading_fit_needs_enough_points():
    with pytest.raises(InsufficientData):
        subleading_fit([1, 2, 3, 4, 5, 5, 5], [1, 2, 3, 4, 5, 5, 5])


def test_code_exponent_fit():
    ns = np.array([8, 16, 32, 64, 128])
    gamma, amp = fit_code_exponent(ns, 2.0 * ns ** 0.36)
    assert gamma == pytest.approx(0.36) and amp == pytest.approx(2.0)
    with pytest.raises(InsufficientData):
        fit_code_exponent([8, 16], [math.inf, 3])


def test_subleading_fit_on_linear_data():
    L = np.arange(2, 40, dtype=float)
    fit = subleading_fit(L, 0.7 * L)
    assert abs(fit.b) < 1e-4 and abs(fit.c) < 1e-4
    assert fit.a == pytest.approx(0.7, abs=1e-4)


def test_projection_of_an_unentangled_reference_keeps_the_purity():
    # measuring every qubit in Z leaves the reference pure and unentangled
    spec = CircuitSpec(4, 1, 1.0, unitary="identity")
    base = StabilizerTableau.with_reference(4, seed=0)
    simulate_interleaved(sample_circuit(spec), base)
    rng = np.random.default_rng(0)
    for _ in range(50):
        tab = base.copy()
        for g in random_stabilizer_generators(4, rng):
            tab.measure(embed(g, 8, range(4, 8)))
        assert tab.subsystem_entropy([0, 1]) == base.subsystem_entropy([0, 1]) == 0
