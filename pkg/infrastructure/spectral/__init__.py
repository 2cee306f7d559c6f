from infrastructure.spectral.targets import (
    augmented_pair_matrix,
    hsic_cross_matrix,
    masked_ae_matrix,
    masking_expectation_matrix,
    negative_pair_sum,
    pca_matrix,
    split_diagonal,
    supcon_hybrid_matrix,
    supervised_contrast_matrix,
    transfer_hybrid_matrix,
)
from infrastructure.spectral.eigensolver import representation_from, top_r_eigenbasis

__all__ = [
    "augmented_pair_matrix", "hsic_cross_matrix", "masked_ae_matrix",
    "masking_expectation_matrix", "negative_pair_sum", "pca_matrix", "split_diagonal",
    "supcon_hybrid_matrix", "supervised_contrast_matrix", "transfer_hybrid_matrix",
    "representation_from", "top_r_eigenbasis",
]
