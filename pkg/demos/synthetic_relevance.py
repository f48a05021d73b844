"""
Do optimal counterfactuals find the features that matter?
=========================================================

Synthetic data lets us know the answer in advance: the label is the sum of
a few relevant features modulo 3, and every other feature is noise.
"""

import numpy as np

from cfrank import SyntheticSpec, generate_synthetic, rank_minimal
from cfrank.algebra import disagreement
from cfrank.experiments import relevant_ratios

spec = SyntheticSpec(dim=20, values_per_feature=3, relevant=(2, 7, 11), rows=2000, seed=1)
data, R = generate_synthetic(spec)
print(data.n_rows, "rows,", data.n_features, "features, relevant:", sorted(R))
print("class counts:", np.bincount(data.y))

# %%
# One query up close
# ------------------
#
# The optimal counterfactual always changes at least one relevant feature,
# because two rows agreeing on R carry the same label.

a = 0
best = rank_minimal(data, a).optimal
changed = disagreement(data.X[a], data.X[best.witness])
print("changed features:", sorted(changed), " relevant among them:", sorted(changed & R))

# %%
# Relevant ratio as the sample grows
# ----------------------------------
#
# With few rows the nearest unlike neighbour has to differ on many noise
# features too. With more rows it can afford to differ on little more than
# the relevant ones, so the share of R it touches drops towards 1/|R|.

rng = np.random.default_rng(0)
for rows in (500, 2000, 8000):
    sample, R = generate_synthetic(SyntheticSpec(dim=20, relevant=(2, 7, 11), rows=rows, seed=1))
    queries = rng.choice(sample.n_rows, size=200, replace=False).tolist()
    ratios = relevant_ratios(sample, R, queries)
    print(f"{rows:>5} rows: mean ratio {float(np.mean([float(r) for r in ratios])):.3f}, "
          f"min {float(min(ratios)):.3f}")
