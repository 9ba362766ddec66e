"""Affine point cloud registration via quadratic assignment on Grassmannians."""

from .assignment import brute_force_lap, lap_max
from .consensus import ConsensusOptions, Mode, combine, default_c, weight
from .grassmann import Projector, center, pad_projector, permute_columns, projector
from .pipeline import RagOptions, RegistrationResult, rag_register, recover_linear
from .qap import FaqOptions, faq_trial, qap_objective, random_doubly_stochastic

__all__ = [
    "ConsensusOptions", "FaqOptions", "Mode", "Projector", "RagOptions", "RegistrationResult",
    "brute_force_lap", "center", "combine", "default_c", "faq_trial", "lap_max",
    "pad_projector", "permute_columns", "projector", "qap_objective",
    "rag_register", "random_doubly_stochastic", "recover_linear", "weight",
]
