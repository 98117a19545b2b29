"""Classical MDS embeddings and out-of-sample placement of proximity data.

Two strategies place a new object into an existing configuration X:
projection (fixed representation space, a linear least-squares fit) and
restricted reconstruction (re-embed all n + 1 objects with X held fixed,
a quartic in the new coordinates solved globally).
"""

__version__ = "0.1.0"

from .errors import OosEmbedError
from .project import ProjectionResult, project_landmark, project_ols, project_spectral
from .proximity import (
    CenteredOosData,
    DissimilarityMatrix,
    SimilarityMatrix,
    beta_shortcut,
    center_similarity,
    dissim_to_centered_sim,
    double_center,
    gamma_tilde_oos,
    tau_w,
    validate_dissimilarity,
    validate_similarity,
)
from .restrict import (
    ArcTrace,
    BatchProblem,
    EmbeddingResult,
    OosProblem,
    arc,
    objective,
    solve_batch,
    solve_single,
    stress_oos,
)
from .spectral import Configuration, EigenSystem, TruncatedGram, cmds_embed, symmetric_eigen, truncate_psd

__all__ = [
    "ArcTrace",
    "BatchProblem",
    "CenteredOosData",
    "Configuration",
    "DissimilarityMatrix",
    "EigenSystem",
    "EmbeddingResult",
    "OosEmbedError",
    "OosProblem",
    "ProjectionResult",
    "SimilarityMatrix",
    "TruncatedGram",
    "arc",
    "beta_shortcut",
    "center_similarity",
    "cmds_embed",
    "dissim_to_centered_sim",
    "double_center",
    "gamma_tilde_oos",
    "objective",
    "project_landmark",
    "project_ols",
    "project_spectral",
    "solve_batch",
    "solve_single",
    "stress_oos",
    "symmetric_eigen",
    "tau_w",
    "truncate_psd",
    "validate_dissimilarity",
    "validate_similarity",
]
