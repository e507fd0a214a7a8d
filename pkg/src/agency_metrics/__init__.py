"""Agency metrics on finite MDPs: curiosity, empowerment, reward distances, measures."""

__version__ = "0.1.0"

from .agency import (
    AgencyWeights,
    agency_objective,
    empowerment,
    empowerment_map,
    ideal_agency_reward,
)
from .convergence import (
    NetworkShape,
    RateQuery,
    bounded_depth_epsilon,
    log_complexity,
    sparse_rate_compare,
)
from .exceptions import (
    AgencyMetricsError,
    DimensionError,
    DomainError,
    IterationLimitError,
    ResourceError,
    SingularityError,
    ValidationError,
)
from .information import (
    CapacityResult,
    blahut_arimoto,
    curiosity_kl,
    entropy,
    mutual_information,
)
from .mdp import (
    TabularMdp,
    expected_return,
    make_gridworld,
    make_random_mdp,
    policy_evaluation,
    return_range,
    value_iteration,
)
from .measure import (
    FunctionCube,
    SubspaceBasis,
    epsilon_tube_measure,
    monte_carlo_measure,
    subspace_projection,
)
from .starc import (
    StarcConfig,
    agency_metric,
    apply_potential_shaping,
    canonicalize,
    standardize,
    starc_distance,
)
