"""
Explaining a recidivism score
=============================

The bundled toy table has eight people (rows ``a`` to ``h``) described by
five categorical features and a risk score. We explain why person ``a``
got ``Med``.
"""

from cfrank import (
    all_counterfactuals,
    counter_set,
    load_toy,
    minimal_counterfactuals,
    minimal_factuals,
    rank_minimal,
)
from cfrank.metrics import metrics_report

data = load_toy()
names = "abcdefgh"
a = 0

features = data.schema.features
for i in range(data.n_rows):
    values = [f.values[v] for f, v in zip(features, data.X[i])]
    print(names[i], values, data.label_of(i))

# %%
# Who could serve as a counterexample?
# ------------------------------------
#
# Any row with a different score. Each one yields a counterfactual: the
# feature values that would have to change for ``a`` to look like it.

print("rows scored differently from a:", [names[i] for i in counter_set(data, a)])
for cf in all_counterfactuals(data, a):
    print(f"  {names[cf.witness]}  distance {cf.distance}  change {data.schema.render(cf.psi)}")

# %%
# Keeping only the closest ones
# -----------------------------
#
# The minimal counterfactuals are the nearest differently-scored rows.
# Several can sit at the same distance, so we rank them by how many
# differently-labeled rows their hyperball captures.

ranking = rank_minimal(data, a)
for entry in ranking.ranked:
    print(f"  rank {entry.rank}: {names[entry.witness]}  power {entry.power}")
print("unique optimal:", ranking.unique_optimal, " gap:", ranking.gap)

best = ranking.optimal
print("best explanation:", data.schema.render(best.explanation.psi))

# %%
# How good is the winner?
# -----------------------

for cf in minimal_counterfactuals(data, a):
    print(names[cf.witness], metrics_report(data, a, cf.witness).as_dict())

# %%
# And why ``Med`` in the first place?
# -----------------------------------
#
# A factual explanation is a part of ``a`` that every row sharing it also
# scores ``Med``.

for f in minimal_factuals(data, a, max_size=2):
    print("  ", data.schema.render(f.psi), "held by rows", [names[i] for i in f.supporting_rows])
