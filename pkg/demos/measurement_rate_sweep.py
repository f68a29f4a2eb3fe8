"""
Entanglement versus measurement rate
====================================

Random brickwork Clifford circuits with single-site Z measurements at rate
p.  Prints the steady-state half-chain entropy, the mutual information of
prefixes with the reference, and the contiguous code distance.  Sizes are
kept small so the script runs in under a minute.
"""

# %%
import numpy as np

from monitored_code.experiments import (
    CircuitSpec,
    decoupling_profile,
    fit_code_exponent,
    subleading_fit,
    sweep_measurement_rate,
)

# %%
# Steady-state half-chain entropy, depth 2n, averaged over the last n/4
# layers.  Below the transition it grows with n, above it stays O(1).
res = sweep_measurement_rate([16, 32], [0.05, 0.1, 0.2, 0.3], samples=8, seed=1)
table = {}
for r in res.records:
    table.setdefault((r["p"], r["n"]), []).append(r["S_half"])
print("   p    n=16    n=32")
for p in (0.05, 0.1, 0.2, 0.3):
    print(f"{p:5.2f}  {np.mean(table[p, 16]):6.2f}  {np.mean(table[p, 32]):6.2f}")

# %%
# I(A,R) for prefixes A = [0, L).  Short prefixes are decoupled from the
# reference; the first L where I(A,R) > 0 bounds the contiguous distance.
prof = decoupling_profile(CircuitSpec(32, 64, 0.1, seed=2))
sample = prof["samples"][0]
print("L    :", " ".join(f"{r['L']:2d}" for r in sample["rows"][:16]))
print("I_AR :", " ".join(f"{r['I_AR']:2d}" for r in sample["rows"][:16]))
print("g_A  :", " ".join(f"{r['g_A']:2d}" for r in sample["rows"][:16]))
print("S_R =", sample["S_R"], " d_code =", sample["d_code"])

# %%
# Median contiguous distance at a few sizes and a power-law fit.  At these
# sizes the exponent is only indicative.
ns = [8, 16, 32]
meds = [decoupling_profile(CircuitSpec(n, 2 * n, 0.1, seed=n), samples=8)["d_code_median"] for n in ns]
print("d_code medians:", dict(zip(ns, meds)))
try:
    gamma, amp = fit_code_exponent(ns, meds)
    print(f"d_code ~ {amp:.2f} n^{gamma:.2f}")
except ValueError as exc:
    print("no fit:", exc)

# %%
# The subleading fit recovers its exponent on synthetic data.
L = np.arange(2, 64, dtype=float)
fit = subleading_fit(L, 0.5 * L + L ** 0.4 + np.random.default_rng(0).normal(0, 0.01, L.size))
print(f"a={fit.a:.3f} b={fit.b:.3f} gamma={fit.gamma:.3f} c={fit.c:.3f}")
