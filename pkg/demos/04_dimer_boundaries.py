r"""
Dimers and the boundary obstruction
===================================

Pairwise check measurements move Majorana pairings around.  Each pairing
carries a path; the parity of the summed paths across a cut of the annulus
never changes.  That conservation law forces both boundaries to behave alike.

Run with ``python3 demos/04_dimer_boundaries.py``.
"""

# %%
# A single hexagon
# ----------------
# Measuring edge (2,3) and then (4,5) re-pairs the six sites.
import numpy as np

from floquetlab.dimer import build_annulus, dimer_trace, hexagon_example, obstruction_demo, random_top_sequence

for step, pairs in enumerate(hexagon_example()):
    print(f"step {step}: {pairs}")

# %%
# One period on an annulus
# ------------------------
# Starting from nearest-neighbour pairs on label-0 edges, we measure all
# label-1, label-2 and label-0 edges.  Re-measuring an existing pair reveals
# a loop; we record whether that loop winds around the annulus.
ann = build_annulus(12, 10)
rep = obstruction_demo(ann)
print(f"bottom winds: {rep.bottom_parity}, top winds: {rep.top_parity}, bulk: {rep.bulk_parity}")
print("two periods:", obstruction_demo(ann, periods=2).__dict__)

# %%
# Trying to be clever at the top
# ------------------------------
# Replace the top rows with random pairwise checks.  Whatever we try, the
# top boundary winds exactly when the bottom does.
rng = np.random.default_rng(3)
outcomes = set()
for _ in range(20):
    r = obstruction_demo(ann, random_top_sequence(ann, rng))
    outcomes.add((r.bottom_parity, r.top_parity, r.pairing_restored))
print("(bottom, top, restored) over 20 random top sequences:", outcomes)

# %%
# The trace is what ``floquetlab dimer`` prints, one record per measurement.
first = next(dimer_trace(build_annulus(4, 4)))
print({k: first[k] for k in ("step", "round", "edge", "winding")})
