from infrastructure.sampling.generators import (
    derive_seed,
    make_mixture_model,
    make_noise_profile,
    make_spiked_model,
    random_mask,
    sample_mixture,
    sample_regression_task,
    sample_spiked,
    sample_task_vectors,
    sample_uniform_orthobasis,
    sample_unit_vector,
    signal_basis,
)

__all__ = [
    "derive_seed", "make_mixture_model", "make_noise_profile", "make_spiked_model",
    "random_mask", "sample_mixture", "sample_regression_task", "sample_spiked",
    "sample_task_vectors", "sample_uniform_orthobasis", "sample_unit_vector", "signal_basis",
]
