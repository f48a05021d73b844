"""Counterfactual explanations for labeled categorical data.

Counterfactuals are read off observed rows: the explanation for query ``a``
from a differently-labeled row ``b`` is the set of literals where ``b``
differs from ``a``. Minimal ones come from nearest unlike neighbours and are
ranked by counterfactual power.
"""

from cfrank.algebra import (
    InconsistentLiteralSet,
    Literal,
    LiteralSet,
    SchemaMismatch,
    UnlabeledInstance,
    agreement,
    counter_set,
    disagreement,
    hamming,
    is_consistent,
    project,
)
from cfrank.dataset import (
    DatasetError,
    LabeledSample,
    Schema,
    SyntheticSpec,
    generate_synthetic,
    load_csv,
    load_toy,
    sample,
    write_csv,
)
from cfrank.explain import (
    CounterfactualExplanation,
    FactualExplanation,
    NoCounterfactual,
    all_counterfactuals,
    counterfactual_of,
    is_factual,
    is_irreducible_def6,
    is_reducible,
    minimal_counterfactuals,
    minimal_factuals,
)
from cfrank.metrics import MetricsReport, capacity, compare_optimal_vs_random, typicality, universality
from cfrank.rank import RankedCounterfactual, RankingResult, cf_power, dag_frequency_rank, hyperball, power_gap, rank_minimal

__version__ = "0.1.0"
