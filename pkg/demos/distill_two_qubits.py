"""
Distilling an EPR pair from two monitored qubits
================================================

Runs the A-Abar distillation protocol on every outcome branch of a few
two-qubit schedules and prints the Pauli expectations of the output pair.
An EPR pair shows XX = ZZ = 1, YY = -1; a classically correlated pair
only ZZ = 1.
"""

# %%
from monitored_code import DualCode, MeasurementSchedule, enumerate_branches
from monitored_code.distillation import averaged_expectations, distill_AB, distill_AB_average

cases = {
    "nothing measured": MeasurementSchedule(2, ()),
    "Z on A": MeasurementSchedule.from_strings(["+ZI"]),
    "ZZ": MeasurementSchedule.from_strings(["+ZZ"]),
    "XX then ZZ": MeasurementSchedule.from_strings(["+XX", "+ZZ"]),
    "XZ then ZZ": MeasurementSchedule.from_strings(["+XZ", "+ZZ"]),
}

# %%
# Each line is one branch (m, m_bar) of the forward and reversed records.
for label, sched in cases.items():
    print(f"== {label}: S(A|B) = {DualCode(sched).conditional_entropy([0])}")
    for log2w, res in enumerate_branches(lambda ch: distill_AB(sched, [0], chooser=ch)):
        exps = averaged_expectations([(0, res.tableau)], list(res.pairs[0]))
        shown = " ".join(f"{k}={v}" for k, v in sorted(exps.items()) if k != "II")
        print(f"  m={res.m} m_bar={res.m_bar} p=2^{log2w} feedback={res.feedback.letters()} "
              f"F={res.epr_fidelity}  {shown or 'maximally mixed'}")

# %%
# Averaged over outcomes the output is a uniform mixture of twisted EPR
# states |P> over the Paulis whose codewords fall in the error span.
# Z on A and ZZ give the same mixture even though the measured states differ.
for label in ("Z on A", "ZZ", "XZ then ZZ"):
    weights = distill_AB_average(cases[label], [0])
    print(label, {k: str(v) for k, v in weights.items() if v})
