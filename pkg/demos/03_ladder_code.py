r"""
The ladder code
===============

A two-leg ladder measured in the order rungs, xx legs, rungs, yy legs keeps
one logical qubit.  It only detects errors, but repeated readout on every rung
plus a majority vote still gives a memory whose failure rate drops with p.

Run with ``python3 demos/03_ladder_code.py``.
"""

# %%
import numpy as np

from floquetlab.ladder import (
    SCHEDULE_3,
    inject_check_error,
    inject_measurement_error,
    ladder_circuit,
    ladder_failure_rate,
    ladder_inner,
    run_ladder,
)
from floquetlab.lattice import build_ladder

L = 8
lat = build_ladder(L)
groups, _ = run_ladder(L, 12, np.random.default_rng(0))
print("ISG ranks:", [g.rank for g in groups], f"(n = {lat.n_qubits})")

# %%
# Dropping the second rung round measures the leg loop, the inner logical.
groups3, _ = run_ladder(L, 12, np.random.default_rng(0), SCHEDULE_3)
print("three-round schedule measures the inner logical:", groups3[-1].contains_up_to_sign(ladder_inner(lat)))

# %%
# Syndromes
# ---------
# A leg check error lights two squares at the same time; a flipped rung
# outcome lights one square twice, one round apart.
exp = ladder_circuit(L, 4 * L + 2)
sites, _ = inject_check_error(exp, k=1, slot=5)
print("check error ->", sites)
sites, _ = inject_measurement_error(exp, k=3, r=10)
print("rung flip   ->", sites)

# %%
# Majority readout
# ----------------
for p in (0.01, 0.03):
    fails = ladder_failure_rate(L, p, 2000, np.random.default_rng(1))
    print(f"p={p}: {fails}/2000 majority-vote failures")
