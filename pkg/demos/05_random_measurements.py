r"""
Measuring random Pauli products
===============================

A toy model: measure uniformly random Pauli operators on N qubits.  Once the
state is pure, every new measurement either is already determined or gives a
fair coin, so an observer learns little from the outcomes.

Run with ``python3 demos/05_random_measurements.py``.
"""

# %%
import numpy as np

from floquetlab.experiments import commute_fraction, commute_statistics, growth_factors, indistinguishability

rng = np.random.default_rng(0)

# %%
# Commuting with a rank-K group
# -----------------------------
# The exact fraction of nonidentity Paulis commuting with K independent
# generators is close to ``2**-K``.
for K in (0, 2, 4, 6):
    st = commute_statistics(10, K, 5000, rng)
    print(f"K={K}: observed {st.commute_rate:.4f}, exact {commute_fraction(10, K):.4f}")

# %%
# Purification takes exponentially long
# -------------------------------------
means, factor = growth_factors(range(3, 9), 100, rng)
for N, m in means.items():
    print(f"N={N}: mean steps to a pure state {m:.1f}")
print(f"fitted growth per extra qubit: {factor:.2f}")

# %%
# Outcomes hide disturbances
# --------------------------
# Apply a random Pauli 5% of the time between measurements; a chi-square
# test on the outcome histograms does not notice.
print(f"chi-square p-value: {indistinguishability(8, 5000, rng):.3f}")
