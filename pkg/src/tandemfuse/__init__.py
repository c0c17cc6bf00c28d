"""Decision rules, detection probabilities, and KL error exponents for
one-way (YX), interactive (XYX), centralized, multi-step memoryless, and
multi-sensor tandem fusion under the Gaussian unit-shift model, with a
Monte-Carlo simulator validating every analytic quantity.
"""

from .gaussian import (
    GaussianModel,
    XyxThresholds,
    YxThresholds,
    llr,
    normal_pdf,
    q_inv,
    q_tail,
    tail_prob,
    xyx_joint_probs,
)
from .fixed_sample import (
    BracketError,
    IterConfig,
    IterationResult,
    NonConvergenceError,
    OperatingPoint,
    SearchConfig,
    centralized,
    evaluate_xyx,
    evaluate_yx,
    grid_optimize_xyx,
    grid_optimize_yx,
    iterate_xyx_thresholds,
    iterate_yx_thresholds,
    optimize_xyx,
    optimize_yx,
    solve_lambda,
)
from .asymptotic import (
    DirectionSwap,
    KlResult,
    XyxKlDesign,
    bern_kl,
    kl_direction_swap,
    kl_xyx,
    kl_yx,
    maximize_kl_xyx,
    maximize_kl_yx,
    xyx_kl_design,
    yx_kl_lambda,
)
from .extensions import (
    MifDesign,
    MultiSensorModel,
    MultisensorKlMax,
    VecYxThresholds,
    XVecYxThresholds,
    mif_kl,
    mif_kl_max,
    mif_kl_search,
    multisensor_evaluate,
    multisensor_kl_max,
)
from .montecarlo import (
    McEstimate,
    estimate_exponent,
    estimate_mif_kl,
    simulate_fixed,
)

__version__ = "0.1.0"
