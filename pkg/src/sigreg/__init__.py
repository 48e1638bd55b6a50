"""Signature-based learning of conditional laws of time series.

The pipeline: embed a discrete series as a piecewise-linear path, compute its
truncated signature, and regress future behavior linearly on those
coordinates. Exact inverse maps (series reconstruction, mixture-weight
recovery) certify that the features lose nothing; classical AR and GP models
provide the comparison line; seeded generators and experiment drivers
reproduce the benchmark studies end to end.
"""

__version__ = "0.1.0"

from .baselines import (
    ARModel,
    GPModel,
    ar_fit,
    ar_predict,
    gp_fit,
    gp_log_marginal_likelihood,
    gp_predict,
    se_kernel,
)
from .datagen import (
    DiffusionSet,
    LabeledSeries,
    gen_ar,
    gen_arch,
    gen_diffusion,
    gen_mix_poly_ar,
    gen_poly_ar,
)
from .errors import NumericalError, RankDeficiencyError
from .experiments import (
    CrossValConfig,
    ExperimentReport,
    run_crossval,
    run_diffusion_study,
)
from .model import (
    ESModelSpec,
    FittedESModel,
    build_feature_matrix,
    fit,
    induced_covariance,
    moments_from_mu,
    predict_mean,
    predict_series,
)
from .paths import (
    PiecewiseLinearPath,
    TimeSeries,
    embed_piecewise_linear,
    embed_time_joined,
    rebase_window,
)
from .recovery import (
    build_separating_forms,
    reconstruct_time_series,
    recover_mixture_weights,
)
from .signatures import (
    oracle_iterated_integral,
    signature,
    signature_batch,
    signature_of_time_series,
)
from .tensor import (
    LinearForm,
    TruncatedTensor,
    apply_form,
    project,
    shuffle_words,
    tensor_add,
    tensor_exp,
    tensor_mul,
    truncate,
    unit_tensor,
    zero_tensor,
)

__all__ = [
    "__version__",
    "ARModel",
    "GPModel",
    "ar_fit",
    "ar_predict",
    "gp_fit",
    "gp_log_marginal_likelihood",
    "gp_predict",
    "se_kernel",
    "DiffusionSet",
    "LabeledSeries",
    "gen_ar",
    "gen_arch",
    "gen_diffusion",
    "gen_mix_poly_ar",
    "gen_poly_ar",
    "NumericalError",
    "RankDeficiencyError",
    "CrossValConfig",
    "ExperimentReport",
    "run_crossval",
    "run_diffusion_study",
    "ESModelSpec",
    "FittedESModel",
    "build_feature_matrix",
    "fit",
    "induced_covariance",
    "moments_from_mu",
    "predict_mean",
    "predict_series",
    "PiecewiseLinearPath",
    "TimeSeries",
    "embed_piecewise_linear",
    "embed_time_joined",
    "rebase_window",
    "build_separating_forms",
    "reconstruct_time_series",
    "recover_mixture_weights",
    "oracle_iterated_integral",
    "signature",
    "signature_batch",
    "signature_of_time_series",
    "LinearForm",
    "TruncatedTensor",
    "apply_form",
    "project",
    "shuffle_words",
    "tensor_add",
    "tensor_exp",
    "tensor_mul",
    "truncate",
    "unit_tensor",
    "zero_tensor",
]
