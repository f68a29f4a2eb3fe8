"""Random monitored Clifford circuits and the statistics run on them.

A circuit is a brickwork of uniformly random two-qubit Cliffords; after each
layer every site is measured in Z with probability p.  The same circuit can
be simulated directly, or turned into a measurement schedule by pushing each
measured Z through all later gates.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import curve_fit

from .distillation import distill_AB
from .dual_code import EntropyCalculator
from .pauli_core import Gf2RowSpace, PauliString, SubsystemMask, embed, symplectic_product
from .schedule import MeasurementSchedule
from .tableau import PauliTable, StabilizerTableau


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class CircuitSpec:
    n: int
    depth: int
    p: float
    boundary: str = "periodic"
    seed: int = 0
    unitary: str = "clifford"  # or "identity"

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError("measurement rate must lie in [0, 1]")
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if self.boundary not in ("periodic", "open"):
            raise ValueError("boundary is 'periodic' or 'open'")
        if self.unitary not in ("clifford", "identity"):
            raise ValueError("unitary is 'clifford' or 'identity'")


@dataclass
class Circuit:
    """Ops are ('U', a, b, clifford_index), ('M', q) and ('L',) layer ends."""

    n: int
    ops: list[tuple] = field(default_factory=list)

    def prepend_measurements(self, qubits: Iterable[int]) -> Circuit:
        return Circuit(self.n, [("M", q) for q in qubits] + list(self.ops))

    @property
    def measurement_count(self) -> int:
        return sum(1 for op in self.ops if op[0] == "M")


def brickwork_pairs(n: int, layer: int, periodic: bool) -> list[tuple[int, int]]:
    start = layer % 2
    pairs = [(i, i + 1) for i in range(start, n - 1, 2)]
    if periodic and start == 1 and n % 2 == 0 and n > 2:
        pairs.append((n - 1, 0))
    return pairs


def sample_circuit(spec: CircuitSpec) -> Circuit:
    rng = np.random.default_rng(spec.seed)
    from .tableau import TWO_QUBIT_CLIFFORD_ORDER

    circ = Circuit(spec.n)
    for t in range(spec.depth):
        if spec.unitary == "clifford":
            for a, b in brickwork_pairs(spec.n, t, spec.boundary == "periodic"):
                circ.ops.append(("U", a, b, int(rng.integers(TWO_QUBIT_CLIFFORD_ORDER))))
        hits = rng.random(spec.n) < spec.p
        circ.ops += [("M", int(q)) for q in np.flatnonzero(hits)]
        circ.ops.append(("L",))
    return circ


def schedule_from_circuit(circ: Circuit) -> MeasurementSchedule:
    """Each measured Z conjugated by every gate that follows it."""
    table = PauliTable(circ.n)
    for op in circ.ops:
        if op[0] == "M":
            table.append(PauliString.single(circ.n, op[1], "Z"))
        elif op[0] == "U":
            table.apply_two_qubit_clifford(op[3], op[1], op[2])
    return MeasurementSchedule(circ.n, tuple(table.rows()))


def gen_random_monitored_circuit(spec: CircuitSpec) -> MeasurementSchedule:
    return schedule_from_circuit(sample_circuit(spec))


def simulate_interleaved(circ: Circuit, tableau: StabilizerTableau, outcomes: Sequence[int] | None = None,
                         positions: Sequence[int] | None = None, on_layer=None) -> list[int]:
    """Run gates and measurements in time order on ``tableau``; returns the outcomes."""
    pos = list(range(circ.n)) if positions is None else list(positions)
    out = []
    layer = 0
    for op in circ.ops:
        if op[0] == "U":
            tableau.apply_two_qubit_clifford(op[3], pos[op[1]], pos[op[2]])
        elif op[0] == "M":
            forced = outcomes[len(out)] if outcomes is not None else None
            out.append(tableau.measure(PauliString.single(tableau.n, pos[op[1]], "Z"), forced))
        elif on_layer is not None:
            on_layer(layer, tableau)
            layer += 1
    return out


def spec_hash(spec: CircuitSpec) -> str:
    blob = json.dumps(asdict(spec), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _record_seed(seed: int, *keys) -> int:
    words = [int(seed)] + [int(round(k * 1_000_000)) if isinstance(k, float) else int(k) for k in keys]
    return int(np.random.SeedSequence(words).generate_state(1)[0])


@dataclass
class SweepResult:
    columns: tuple[str, ...]
    records: list[dict]

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for r in self.records:
            lines.append(",".join(_fmt(r[c]) for c in self.columns))
        return "\n".join(lines) + "\n"

    def to_jsonl(self) -> str:
        return "".join(json.dumps({c: r[c] for c in self.columns}) + "\n" for r in self.records)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(round(v, 10))
    return str(v)


def steady_state_run(spec: CircuitSpec) -> dict:
    """Half-chain entropy averaged over the final n/4 layers, from a maximally mixed start."""
    n = spec.n
    circ = sample_circuit(spec)
    tab = StabilizerTableau.maximally_mixed(n, seed=_record_seed(spec.seed, 1))
    window = max(1, n // 4)
    first = spec.depth - window
    halves = []

    def on_layer(t, tb):
        if t >= first:
            halves.append(tb.subsystem_entropy(range(n // 2)))

    simulate_interleaved(circ, tab, on_layer=on_layer)
    return {"S_half": float(np.mean(halves)), "S_R": n - tab.nrows, "tau": circ.measurement_count}


SWEEP_COLUMNS = ("n", "p", "sample", "seed", "S_half", "S_R", "tau", "depth", "spec_hash")


def sweep_measurement_rate(ns: Sequence[int], ps: Sequence[float], depth: int | None = None,
                           samples: int = 10, seed: int = 0, boundary: str = "periodic") -> SweepResult:
    """Steady-state half-chain entropy for every (n, p, sample); depth defaults to 2n."""
    records = []
    for n in ns:
        d = 2 * n if depth is None else depth
        for p in ps:
            for k in range(samples):
                rseed = _record_seed(seed, n, float(p), k)
                spec = CircuitSpec(n, d, float(p), boundary, rseed)
                rec = {"n": n, "p": float(p), "sample": k, "seed": rseed, "depth": d, "spec_hash": spec_hash(spec)}
                rec.update(steady_state_run(spec))
                records.append(rec)
    return SweepResult(SWEEP_COLUMNS, records)


def interval_profile(calc: EntropyCalculator) -> dict:
    """I(A,R) and g_A for the prefixes A = [0, L), L = 1..n-1."""
    n = calc.n
    la = calc.code.prefix_null_counts()
    lae = calc.ext.prefix_null_counts()
    rev = list(range(n - 1, -1, -1))
    lb = calc.code.prefix_null_counts(rev)
    lbe = calc.ext.prefix_null_counts(rev)
    s_r = n - calc.log2_null_total_ext
    rows = []
    for L in range(1, n):
        s_a = L - lae[L - 1]
        s_b = (n - L) - lbe[n - L - 1]
        rows.append({"L": L, "I_AR": s_a + s_r - s_b, "g_A": la[L - 1] - lae[L - 1],
                     "I_AB": calc.log2_null_total - la[L - 1] - lb[n - L - 1]})
    return {"S_R": s_r, "rows": rows}


def decoupling_profile(spec: CircuitSpec, samples: int = 1) -> dict:
    """Per-sample I(A,R) and g_A versus prefix length, with the contiguous distance."""
    out = []
    for k in range(samples):
        s = spec if samples == 1 else CircuitSpec(spec.n, spec.depth, spec.p, spec.boundary,
                                                  _record_seed(spec.seed, k), spec.unitary)
        calc = EntropyCalculator(gen_random_monitored_circuit(s))
        prof = interval_profile(calc)
        prof["seed"] = s.seed
        prof["d_code"] = calc.contiguous_distance(spec.boundary == "periodic")
        prof["single_site_I_AR"] = [calc.report([q]).I_AR for q in range(spec.n)]
        out.append(prof)
    finite = [p["d_code"] for p in out if math.isfinite(p["d_code"])]
    return {"samples": out, "d_code_median": float(np.median(finite)) if finite else math.inf}


def state_independence_check(spec: CircuitSpec, region, seed: int | None = None) -> dict:
    """Compare a maximally mixed start with |0...0> (all qubits measured first)."""
    circ = sample_circuit(spec)
    mixed = schedule_from_circuit(circ)
    prod = schedule_from_circuit(circ.prepend_measurements(range(spec.n)))
    a = SubsystemMask.of(spec.n, region)
    s_mixed = EntropyCalculator(mixed).code.conditional_entropy(a)
    s_prod = EntropyCalculator(prod).code.conditional_entropy(a)
    run_seed = spec.seed if seed is None else seed
    f_mixed = distill_AB(mixed, a, seed=run_seed).epr_fidelity
    f_prod = distill_AB(prod, a, seed=run_seed).epr_fidelity
    return {
        "S_A_given_B_mixed": s_mixed,
        "S_A_given_B_product": s_prod,
        "fidelity_mixed": f_mixed,
        "fidelity_product": f_prod,
        "entropy_equal": s_mixed == s_prod,
        "fidelity_equal": f_mixed == f_prod,
    }


# purity identity ---------------------------------------------------------------

def random_stabilizer_generators(n: int, rng: np.random.Generator) -> list[PauliString]:
    """Generators of a uniformly random maximal commuting Pauli group.

    Builds an isotropic basis one vector at a time, each drawn uniformly from
    the symplectic complement of the current span minus the span itself.
    The number of choices at each step does not depend on the earlier draws,
    so every maximal group is equally likely.
    """
    dim = 2 * n
    perp = [1 << k for k in range(dim)]  # basis of the complement of the span
    span = Gf2RowSpace(dim)
    gens = []
    while len(gens) < n:
        while True:
            coeffs = rng.integers(0, 2, size=len(perp))
            v = 0
            for c, b in zip(coeffs, perp):
                if c:
                    v ^= b
            if v and not span.contains(v):
                break
        span.insert(v)
        gens.append(PauliString.from_symplectic(n, v))
        pivot = next(i for i, b in enumerate(perp) if symplectic_product(b, v, n))
        pb = perp.pop(pivot)
        perp = [b ^ pb if symplectic_product(b, v, n) else b for b in perp]
    return gens


@dataclass
class PurityResult:
    mean: float
    stderr: float
    rhs: Fraction
    z: float
    samples: int
    S_A: int
    S_B: int


def purity_rhs(n: int, s_a: int, s_b: int) -> Fraction:
    d = 2 ** n
    return Fraction(d, d + 1) * (Fraction(1, 2 ** s_a) + Fraction(1, 2 ** s_b))


def purity_swap_check(spec: CircuitSpec, region, samples: int = 1000, seed: int = 0,
                      circuit: Circuit | None = None) -> PurityResult:
    """Average the purity of A after projecting the reference onto random stabilizer states.

    The reference is projected by measuring the generators of a uniformly
    random stabilizer group, so the outcome is Born-sampled with probability
    p.  The per-sample statistic d * p * Tr(sigma_A^2), with sigma the
    normalized post-projection state, has the Haar-average purity of the
    unnormalized projected state as its expectation.
    """
    n = spec.n
    circ = circuit if circuit is not None else sample_circuit(spec)
    rng = np.random.default_rng(seed)
    base = StabilizerTableau.with_reference(n, rng=rng)
    simulate_interleaved(circ, base)
    a = list(SubsystemMask.of(n, region).members)
    b = [q for q in range(n) if q not in a]
    s_a, s_b = base.subsystem_entropy(a), base.subsystem_entropy(b)
    ref = list(range(n, 2 * n))
    values = np.empty(samples)
    for k in range(samples):
        tab = base.copy()
        tab.log2_prob = 0
        for g in random_stabilizer_generators(n, rng):
            tab.measure(embed(g, 2 * n, ref))
        values[k] = 2.0 ** (n + tab.log2_prob - tab.subsystem_entropy(a))
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else math.inf
    rhs = purity_rhs(n, s_a, s_b)
    z = (mean - float(rhs)) / stderr if stderr > 0 else (0.0 if mean == float(rhs) else math.inf)
    return PurityResult(mean, stderr, rhs, z, samples, s_a, s_b)


# fits ----------------------------------------------------------------------------

@dataclass
class FitResult:
    a: float
    b: float
    gamma: float
    c: float
    residuals: np.ndarray
    rss: float


def _subleading(L, a, b, gamma, c):
    return a * L + b * L ** gamma + c * np.log2(L)


def subleading_fit(L: Sequence[float], S: Sequence[float]) -> FitResult:
    """Least squares for S = a L + b L**gamma + c log2 L with 0 < gamma < 1."""
    L = np.asarray(L, dtype=float)
    S = np.asarray(S, dtype=float)
    if len(np.unique(L)) < 6:
        raise InsufficientData("need at least 6 distinct lengths")
    best = None
    for g0 in (0.2, 0.35, 0.5, 0.65, 0.8):
        try:
            popt, _ = curve_fit(_subleading, L, S, p0=(0.5, 1.0, g0, 0.0),
                                bounds=([-np.inf, -np.inf, 1e-6, -np.inf], [np.inf, np.inf, 1 - 1e-6, np.inf]),
                                maxfev=20000)
        except RuntimeError:
            continue
        res = S - _subleading(L, *popt)
        rss = float(res @ res)
        if best is None or rss < best[1]:
            best = (popt, rss, res)
    if best is None:
        raise RuntimeError("fit did not converge")
    (a, b, gamma, c), rss, res = best
    return FitResult(float(a), float(b), float(gamma), float(c), res, rss)


def fit_code_exponent(ns: Sequence[float], d_codes: Sequence[float]) -> tuple[float, float]:
    """gamma_code and prefactor from d_code ~ A n**gamma_code (log-log line)."""
    ns = np.asarray(ns, dtype=float)
    d = np.asarray(d_codes, dtype=float)
    ok = np.isfinite(d) & (d > 0)
    if ok.sum() < 2:
        raise InsufficientData("need two finite distances")
    slope, intercept = np.polyfit(np.log(ns[ok]), np.log(d[ok]), 1)
    return float(slope), float(np.exp(intercept))
