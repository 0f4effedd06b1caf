"""Budget-feasible truthful procurement mechanisms with exact verification."""

from .exact import (
    ONE_PLUS_SQRT2,
    SQRT2,
    TWO_PLUS_SQRT2,
    Num,
    Quad,
    as_num,
    decimal_str,
    format_num,
    parse_num,
)
from .model import (
    Additive,
    Agent,
    Coverage,
    Explicit,
    Instance,
    Outcome,
    RandomizedOutcome,
    check_monotone_valuation,
    check_submodular,
    evaluate,
    marginal,
)
from .hetero import (
    HeteroInstance,
    HeteroItem,
    build_hull_chains,
    fhk,
    gre_h,
    gre_h_mechanism,
    mhk,
    rmhk,
)
from .knapsack import (
    fopt_knapsack,
    gre_knapsack,
    gre_knapsack_mechanism,
    knapsack_payment_formula,
    mech_knapsack,
    rm_knapsack,
)
from .submodular import (
    det_mech_sm,
    fractional_greedy_sm,
    greedy_sm,
    greedy_sm_mechanism,
    random_mech_sm,
)
from .oracles import brute_force_opt, structured_fractional_opt_hetero
from .thresholds import NonMonotoneAllocationError, ThresholdResult, threshold_payment
from .checks import approximation_report, check_budget_feasible, check_monotone_allocation
from .adversarial import expected_ratio_under_distribution, lb3_family, probe_lb3, yao_distribution
from .files import ParseError, parse_instance, serialize_instance, serialize_report
from .registry import MECHANISMS, MONOTONE_RULES

__version__ = "0.1.0"
