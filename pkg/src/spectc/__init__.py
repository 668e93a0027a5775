"""Spectral completion of partially observed low-rank tensors.

Two completers are provided: an unfolding-based method for symmetric tensors
of order k >= 3 that estimates the column space of the balanced matricization
and denoises with a tensor-product projector, and a contraction-based method
for overcomplete third-order tensors. Both come as plain functions
(:func:`complete_unfold`, :func:`complete_contraction`) and as scikit-learn
style transformers operating on dense arrays with NaN at unobserved entries.
"""

from .contraction import (
    ContractionCompleter,
    ContractionConfig,
    TripleSplit,
    complete_contraction,
    contract,
    delta_from_mask,
    lambda_star_overcomplete,
    split_three,
)
from .errors import ConfigError, InfeasibleInputError
from .experiments import (
    ExperimentSpec,
    MseRecord,
    emit_csv,
    emit_plotdata,
    normalized_mse,
    run_experiment,
)
from .matrix import (
    IncoherenceParams,
    UnfoldingParams,
    coherence,
    complete_column,
    debiased_gram,
    incoherence_params,
    unfolding_params,
)
from .models import (
    RandomTensorSpec,
    from_components,
    generate,
    sample_mask_bernoulli,
    sample_mask_exact,
    stream_rng,
)
from .spectral import (
    SpectralProjector,
    apply_mode_projection,
    identity_projector,
    pattern_for_order,
    sin_theta,
    svd,
    sym_eig,
    threshold_projector,
)
from .tensors import (
    ObservationMask,
    PartialTensor,
    Tensor,
    UnfoldedMatrix,
    diag_split,
    frobenius,
    max_abs,
    multilinear_rank,
    op_norm,
    project_mask,
    refold,
    restrict,
    unfold,
)
from .unfolding import (
    CompletionResult,
    UnfoldConfig,
    UnfoldingCompleter,
    complete_unfold,
    denoise,
    lambda_star_simulation,
    lambda_star_theorem,
    split_two,
    unfolded_gram,
)

__version__ = "0.1.0"

__all__ = [
    "CompletionResult",
    "ConfigError",
    "ContractionCompleter",
    "ContractionConfig",
    "ExperimentSpec",
    "IncoherenceParams",
    "InfeasibleInputError",
    "MseRecord",
    "ObservationMask",
    "PartialTensor",
    "RandomTensorSpec",
    "SpectralProjector",
    "Tensor",
    "TripleSplit",
    "UnfoldConfig",
    "UnfoldedMatrix",
    "UnfoldingCompleter",
    "UnfoldingParams",
    "apply_mode_projection",
    "coherence",
    "complete_column",
    "complete_contraction",
    "complete_unfold",
    "contract",
    "debiased_gram",
    "delta_from_mask",
    "denoise",
    "diag_split",
    "emit_csv",
    "emit_plotdata",
    "frobenius",
    "from_components",
    "generate",
    "identity_projector",
    "incoherence_params",
    "lambda_star_overcomplete",
    "lambda_star_simulation",
    "lambda_star_theorem",
    "max_abs",
    "multilinear_rank",
    "normalized_mse",
    "op_norm",
    "pattern_for_order",
    "project_mask",
    "refold",
    "restrict",
    "run_experiment",
    "sample_mask_bernoulli",
    "sample_mask_exact",
    "sin_theta",
    "split_three",
    "split_two",
    "stream_rng",
    "svd",
    "sym_eig",
    "threshold_projector",
    "unfold",
    "unfolded_gram",
    "unfolding_params",
]
