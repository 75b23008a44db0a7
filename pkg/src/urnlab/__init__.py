"""urnlab: exact absorption laws for weighted urn processes.

Two two-color processes are covered, with arbitrary positive weight
sequences attached to the ball counts: draws proportional to a color's own
weight (sampling-without-replacement type) and draws proportional to the
opposing weight (OK-Corral type), plus their r-color extensions.  The
package computes the survivor distribution three independent ways (closed
form, exact recurrence, path enumeration), its moments, the reciprocal
duality between the two processes, the limit laws for fast-growing weights,
and seeded Monte Carlo validation.
"""

from .closedform import (
    ALPHA_POLES,
    BETA_POLES,
    DistinctWeightsError,
    multi_okcorral_reading_report,
    okcorral_distribution,
    okcorral_pmf,
    okcorral_pmf_multi,
    partial_fraction_sides,
    polya_okcorral_pmf,
    polya_sampling_pmf,
    polya_sampling_pmf_multi,
    sampling_distribution,
    sampling_pmf,
    sampling_pmf_multi,
)
from .moments import (
    mixed_factorial_moment,
    moment_polynomial,
    okcorral_polynomial_moment,
    okcorral_raw_moment,
    puyhaubert_f,
    puyhaubert_g,
    puyhaubert_sum_identity,
    sampling_factorial_moment,
    sampling_raw_moment,
)
from .numerics import (
    Polynomial,
    Scalar,
    ScalarModeError,
    binom_general,
    falling_factorial,
    ramanujan_q,
    stirling_first_unsigned,
    stirling_second,
)
from .oracle import (
    ExactDistribution,
    absorption_pmf,
    absorption_pmf_multi,
    enumerate_pmf,
)
from .simulate import (
    SimConfig,
    empirical_pmf,
    sample_fixed_blacks,
    sample_limit_fraction,
    simulate_counts,
    simulate_once,
)
from .weights import (
    MODEL_OKCORRAL,
    MODEL_SAMPLING,
    UrnSpec,
    WeightSequence,
    check_distinct,
    custom,
    linear,
    power,
    reciprocal,
    shifted_square,
    square,
    triangular,
    two_color,
)

__version__ = "0.1.0"
