"""Prime-race density toolkit.

Computes logarithmic densities of orderings pi(x;q,a1) > ... > pi(x;q,ar)
from Dirichlet L-function zero data, with rigorous error budgets for the
all-nonsquare triples mod 8 and mod 12, executable symmetry/inequality
theorems, and an empirical sieve harness.
"""

__version__ = "0.1.0"

from .characters import (
    Character,
    RaceTuple,
    Residue,
    bias_factor,
    c_value,
    character_group,
    kronecker,
    reduced_residues,
    square_root_count,
)
from .zerodata import ZeroTable, b1, full_reciprocal_sum, load_zero_table
from .special import (
    DecayBound,
    FProfile,
    alpha,
    bessel_j0,
    build_profile,
    decay_constants,
    delta_t_bound,
    f_truncated,
    query_profile,
)
from .density import (  # noqa: E402
    DensityEstimate,
    GridSpec,
    density_general,
    density_two_way,
    lattice_sum,
    permutation_table,
    rho_hat,
)
from .rigor import (  # noqa: E402
    ErrorBudget,
    TailModel,
    assemble_budget,
    discretization_bound,
    montgomery_tail,
    product_truncation_bound,
    tail_model_for_pair,
    truncation_bound,
)
from .symmetry import (  # noqa: E402
    SymmetryClass,
    check_inequalities,
    isomorphism_classes,
    symmetry_closure,
    verify_table_symmetries,
)
from .empirical import RaceTrace, log_density_estimate, normalized_error, sieve_race  # noqa: E402

__all__ = [name for name in dir() if not name.startswith("_")]
