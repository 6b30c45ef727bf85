r"""
Honeycomb code: how the stabilizer group evolves
================================================

We build the smallest colorable honeycomb torus, measure its checks in the
label order 0, 1, 2, 0, ... starting from the maximally mixed state, and watch
the instantaneous stabilizer group (ISG) settle into a steady state.

Run with ``python3 demos/01_honeycomb_isg.py``.
"""

# %%
# The lattice
# -----------
# Every qubit sits on three edges with three different Pauli letters, and every
# hexagon carries a label in {0, 1, 2} so that neighbouring hexagons differ.
# A ``(4, 4)`` torus cannot be colored this way; ``(3, 3)`` can.
import numpy as np

from floquetlab.honeycomb import (
    build_logicals,
    classify,
    evolve_outer,
    expected_isg,
    no_long_loops,
    run_schedule,
    subsystem_counts,
)
from floquetlab.lattice import ColoringError, build_honeycomb

lat = build_honeycomb(3, 3)
print(f"{lat.n_qubits} qubits, {len(lat.edges)} checks, {len(lat.plaquettes)} plaquettes")
try:
    build_honeycomb(4, 4)
except ColoringError as err:
    print("(4,4):", err)

# %%
# As a subsystem code the check group protects nothing: the gauge group is
# large and the center (the plaquettes plus two long loops) leaves no room.
gauge, center, gauge_qubits, logical = subsystem_counts(lat)
print(f"gauge rank {gauge}, center rank {center}, gauge qubits {gauge_qubits}, logical qubits {logical}")

# %%
# Running the schedule
# --------------------
# The rank grows for three rounds and then stays at ``2 n_p - 2``.  Each
# group is compared with the group built directly from the current checks and
# the plaquettes inferred so far.
rng = np.random.default_rng(1)
run = run_schedule(lat, 10, rng)
for r, g in enumerate(run.groups):
    print(f"round {r}: rank {g.rank:2d}  matches expected: {g.equals(expected_isg(lat, r))}  "
          f"no long loop measured: {bool(no_long_loops(g, lat))}")

# %%
# A bad schedule
# --------------
# Measuring all x checks, then all y, then all z, ends up measuring a long
# loop, which destroys the encoded information.
bad = run_schedule(lat, 6, rng, schedule="letter")
print("letter schedule leaks a long loop:", any(no_long_loops(g, lat) == 0 for g in bad.groups))

# %%
# Outer logicals change type every round
# --------------------------------------
# An outer logical is pushed through the schedule by multiplying it with the
# checks just measured.  Relative to the current superlattice toric code it
# alternates between an electric and a magnetic string.
q = build_logicals(lat, 3).outer[0]
kinds = []
for r in range(3, 12):
    q, used = evolve_outer(lat, q, r)
    kinds.append(classify(lat, q, r + 1)[0])
print("types over nine rounds:", " ".join(kinds))
