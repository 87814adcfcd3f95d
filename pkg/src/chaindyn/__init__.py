"""chaindyn: chain dynamics for finitely generated semigroup actions on
finite metric spaces.

Core objects: FiniteMetricSpace (module space), GeneratorSystem and Word
(module system), ChainGraph (module graph).  Analyses: entropy estimators and
the exact counting oracle (entropy), recurrence/mixing rates (recurrence),
cyclic structure decomposition (structure).  The CLI lives in chaindyn.cli.
"""

from .errors import (
    ChainDynError,
    InvalidArgumentError,
    MetricViolationError,
    NotTransitiveError,
    ResourceBudgetError,
    UnsupportedMapError,
)
from .space import (
    FiniteMetricSpace,
    ScaleLadder,
    box_dimension_estimate,
    build_circle_grid,
    build_disjoint_union,
    build_product,
    build_shift_space,
    covering_number,
    from_distance_matrix,
    validate_metric,
)
from .system import (
    Chain,
    GeneratorSystem,
    Word,
    apply_word,
    from_map_tables,
    power_system,
    product_system,
    quantize_map,
    skew_product,
    word_metric_dw,
)
from .graph import (
    ChainGraph,
    build_chain_graph,
    count_chains_for_word,
    is_chain,
    reach_layers,
    total_chain_count,
)
from .entropy import (
    bufetov_entropy,
    orbit_separated_count,
    orbit_spanning_count,
    pseudo_entropy,
    pseudo_separated_count,
    pseudo_spanning_count,
    spectral_growth_rate,
    verify_skew_identity,
)
from .recurrence import (
    is_chain_mixing,
    is_chain_transitive,
    mixing_time,
    mixing_time_point,
    proposition_suite,
    recurrence_time,
    recurrence_time_point,
    verify_lbm,
    verify_ubd,
)
from .structure import (
    OdometerSpec,
    additive_stabilization_bound,
    connectivity_equivalence_check,
    epsilon_classes,
    frobenius_two,
    gcd_of_set,
    k_ladder,
    odometer_system,
    period_k,
)

__version__ = "0.1.0"
