"""
Three measurements on three qubits
==================================

Reads the small example schedules, prints the commutation patterns that
decide whether qubit 0 can be recovered, and checks the verdict against
the entropies of the measured state.
"""

# %%
from pathlib import Path

from monitored_code import DualCode, EntropyCalculator, PauliString, SignVector, read_schedule
from monitored_code.dual_code import DecodeError

HERE = Path(__file__).parent / "schedules"
names = ["three_qubit_recoverable", "three_qubit_noncommuting", "three_qubit_unrecoverable"]

# %%
# Every single-qubit Pauli on qubit 0 gets a codeword: its commutation
# signs with the three measured operators.  Error vectors only look back
# in time.
for name in names:
    sched = read_schedule(HERE / f"{name}.txt")
    code = DualCode(sched)
    print(f"== {name}: {' '.join(str(p) for p in sched)}")
    for letter in "IXYZ":
        p = PauliString.from_str(letter + "II")
        print(f"  C({letter}) = {code.codeword(p)}")
    for i in range(1, sched.tau + 1):
        print(f"  E(P{i}) = {code.error_vector(i)}")
    print(f"  recoverable: {code.recoverable([0])}")

# %%
# The same verdict from entropies: a recoverable qubit is maximally
# entangled with the rest, so S(A|B) = -1.
for name in names:
    sched = read_schedule(HERE / f"{name}.txt")
    rep = EntropyCalculator(sched).report([0])
    print(f"{name:28s} S_A|B = {rep.S_A_given_B:+d}   I(A,B) = {rep.I_AB}")

# %%
# When qubit 0 is recoverable the decoder maps any sum vector s = m * m_bar
# back to the Pauli that produced it.
code = DualCode(read_schedule(HERE / "three_qubit_recoverable.txt"))
for bits in range(8):
    s = SignVector(3, bits)
    try:
        print(s, "->", code.decode(s, [0]).letters())
    except DecodeError:  # never produced by a real run
        print(s, "-> unreachable")
