"""Adaptive optimizers with runtime convergence diagnostics.

The package implements SGD, Adam, AMSGrad and the convex-combination
variants C-Adam / C-Adam_V2 as pure state transitions over float64
vectors, verifies their theoretical invariants (monotone second moments,
the scaled-moment increment, the first-moment bound, the regret-bound
right-hand side) as runtime diagnostics, and ships a deterministic
experiment harness for the linear counterexample, a noisy 2-D classifier
and digit classification at desk scale.
"""

__version__ = "0.1.0"

from .optim import (  # noqa: F401
    Hyperparams,
    OptimizerState,
    StepOutcome,
    Variant,
    init_state,
    step,
    step_adam,
    step_amsgrad,
    step_cadam,
    step_cadam_v2,
    step_sgd,
)
from .projection import FeasibleBox, project  # noqa: F401
from .oco import (  # noqa: F401
    LinearLossProblem,
    RegretTracker,
    average_regret,
    run_oco,
    sample_loss,
)
from .models import (  # noqa: F401
    ModelSpec,
    ParamVector,
    accuracy,
    decision_boundary,
    init_params,
    loss_and_grad,
    predict,
)
from .data import (  # noqa: F401
    Batch,
    Dataset,
    batches,
    gen_noisy_2d,
    load_idx,
    save_idx,
    stratified_split,
    subsample,
    synthetic_digits,
)
from .diagnostics import (  # noqa: F401
    BoundReport,
    RunHistory,
    StepTrace,
    check_psi,
    moment_bound_margin,
    regret_bound_rhs,
    run_invariant_sweep,
)
from .harness import RunManifest, SweepSpec, compare, preset, run, sweep  # noqa: F401
