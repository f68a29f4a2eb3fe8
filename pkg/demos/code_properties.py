"""
Monitored circuits as stabilizer codes
======================================

Builds the stabilizer and logical groups of a schedule one measurement at
a time, then distills the code's Choi state between the system and a
reference, and finally tracks a single reference qubit encoded into the
system.
"""

# %%
from pathlib import Path

from monitored_code import MeasurementSchedule, enumerate_branches, read_schedule
from monitored_code.distillation import distill_gullans_huse, distill_system_reference
from monitored_code.groups import logical_history, logical_pairs, stabilizer_history

HERE = Path(__file__).parent / "schedules"

# %%
# Each new measurement either joins the stabilizer group or replaces the
# generator it anticommutes with.  The logical group is the commutant.
for name in ("logical_pair", "bell_pair"):
    sched = read_schedule(HERE / f"{name}.txt")
    print(f"== {name}")
    for t, (s, l) in enumerate(zip(stabilizer_history(sched), logical_history(sched)), 1):
        print(f"  t={t} measured {sched.ops[t - 1].letters()}  stab {s}  logical {l}")
    print("  encoded qubits:", [(a.letters(), b.letters()) for a, b in logical_pairs(sched)])

# %%
# Measuring the conjugate schedule on the reference and correcting with a
# product of measured operators leaves a state where every logical L
# satisfies <L (x) L*> = 1, on every branch.
sched = read_schedule(HERE / "logical_pair.txt")
ok = [res.logical_correlations
      for _, res in enumerate_branches(lambda ch: distill_system_reference(sched, chooser=ch))]
print(f"logical correlations hold on {sum(ok)}/{len(ok)} branches")

# %%
# One reference qubit encoded in a three-qubit repetition code.  A ZZ check
# on the first two qubits leaves the encoded information alone.  XXX is the
# encoded X, so measuring it destroys the entanglement, and so does
# measuring one physical qubit in two bases.
encoding = [("CNOT", 2, 0), ("CNOT", 2, 1)]
for ops in (["+ZZI"], ["+XXX"], ["+IIZ", "+IIX"]):
    sched = MeasurementSchedule.from_strings(ops)
    fids = {str(res.epr_fidelity)
            for _, res in enumerate_branches(lambda ch: distill_gullans_huse(3, sched, encoding, chooser=ch))}
    print(f"measure {' '.join(ops):12s} -> EPR fidelity with the reference: {sorted(fids)}")
