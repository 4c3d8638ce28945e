"""Frank-Wolfe training of multi-category SVM classifiers.

Trains linear multiclass classifiers under a family of sorting-friendly
hinge losses (max hinge, top-k hinge, Usunier, and their rank-weighted
generalizations) by maximizing the Fenchel dual with a Frank-Wolfe method
whose direction-finding and line-search steps are closed form.  The
primal-dual gap certifies solution accuracy and drives termination.
Optional quadratic smoothing of the losses keeps both steps closed form.
"""

__version__ = "0.1.0"

from .data import (
    Dataset,
    SvmlightParseError,
    load_svmlight,
    parse_svmlight,
    save_svmlight,
    serialize_svmlight,
    synth_blobs,
)
from .losses import (
    BetaVertex,
    LossFamily,
    LossSpec,
    MarginVector,
    beta_argmax,
    default_rho,
    loss_eval,
    margin_vector,
    subgradient,
)
from .metrics import topk_error
from .model import (
    Model,
    ModelDimensionError,
    ModelFormatError,
    ModelVersionError,
    SparseVector,
    load_model,
    predict_topk,
    save_model,
    scores,
)
from .pg import PgConfig, pg_train
from .solver import (
    DualState,
    SolverConfig,
    StepRule,
    TraceRecord,
    TrainResult,
    direction_find,
    dual_value,
    init_state,
    line_search_gamma,
    primal_value,
    read_trace,
    recompute_weights,
    step,
    train,
    write_trace,
)

__all__ = [
    "BetaVertex",
    "Dataset",
    "DualState",
    "LossFamily",
    "LossSpec",
    "MarginVector",
    "Model",
    "ModelDimensionError",
    "ModelFormatError",
    "ModelVersionError",
    "PgConfig",
    "SolverConfig",
    "SparseVector",
    "StepRule",
    "SvmlightParseError",
    "TraceRecord",
    "TrainResult",
    "beta_argmax",
    "default_rho",
    "direction_find",
    "dual_value",
    "init_state",
    "line_search_gamma",
    "load_model",
    "load_svmlight",
    "loss_eval",
    "margin_vector",
    "parse_svmlight",
    "pg_train",
    "predict_topk",
    "primal_value",
    "read_trace",
    "recompute_weights",
    "save_model",
    "save_svmlight",
    "scores",
    "serialize_svmlight",
    "step",
    "subgradient",
    "synth_blobs",
    "topk_error",
    "train",
    "write_trace",
]
