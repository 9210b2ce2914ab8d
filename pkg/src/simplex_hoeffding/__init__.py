__version__ = "0.1.0"

from simplex_hoeffding.bounds import (  # noqa: E402
    BoundResult,
    CompletedPoint,
    ExponentArgument,
    SimplexPoint,
    TailDirection,
    chernoff_log_bound,
    complete,
    exponent_M,
    hoeffding_binary_bound,
    kl_divergence,
    lemma1_gap,
    mgf_envelope,
    optimal_t,
    theorem1_bound,
)
from simplex_hoeffding.distributions import (  # noqa: E402
    CountVector,
    DirichletSpec,
    MultinomialSpec,
    dirichlet_bound,
    dirichlet_log_pdf,
    dirichlet_mean,
    multinomial_bound,
    multinomial_log_pmf,
    multinomial_mean,
    sample_dirichlet,
    sample_multinomial,
)
from simplex_hoeffding.transform import BoxBounds, box_bound, box_to_simplex, simplex_to_box_threshold  # noqa: E402
