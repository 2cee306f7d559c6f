"""Tests for the seeded samplers."""
import numpy as np
import pytest
from pydantic import ValidationError

from domain.errors import ContractError, DimensionError, ZeroScaleError
from domain.models import NoiseProfile, SignalSupport, SpikedModel
from infrastructure.sampling import (
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


def test_derive_seed_is_deterministic_and_key_sensitive():
    assert derive_seed(0, 1, 2) == derive_seed(0, 1, 2)
    seeds = {derive_seed(0, g, rep) for g in range(5) for rep in range(5)}
    assert len(seeds) == 25
    assert derive_seed(1, 0) != derive_seed(0, 1)


def test_orthobasis_is_orthonormal_and_reproducible():
    u = sample_uniform_orthobasis(12, 4, seed=3)
    assert u.shape == (12, 4)
    np.testing.assert_allclose(u.T @ u, np.eye(4), atol=1e-12)
    np.testing.assert_array_equal(u, sample_uniform_orthobasis(12, 4, seed=3))
    assert not np.allclose(u, sample_uniform_orthobasis(12, 4, seed=4))


def test_orthobasis_allows_square_and_rejects_wide():
    q = sample_uniform_orthobasis(5, 5, seed=0)
    np.testing.assert_allclose(q @ q.T, np.eye(5), atol=1e-12)
    with pytest.raises(DimensionError):
        sample_uniform_orthobasis(3, 4, seed=0)


def test_orthobasis_first_coordinate_is_symmetric():
    """Haar columns in the plane have a mean-zero first coordinate."""
    values = np.array([sample_uniform_orthobasis(2, 1, seed=s)[0, 0] for s in range(4000)])
    assert abs(values.mean()) <= 5 * values.std() / np.sqrt(values.size)


def test_unit_vector():
    w = sample_unit_vector(6, seed=2)
    assert abs(np.linalg.norm(w) - 1.0) < 1e-12
    np.testing.assert_array_equal(sample_unit_vector(1, seed=9), [1.0])


def test_stepped_noise_profile():
    levels = make_noise_profile(10, 3, 2.0, kappa=16.0)
    np.testing.assert_allclose(levels[:3], 2.0)
    np.testing.assert_allclose(levels[3:], 0.5)
    flat = make_noise_profile(10, 3, 2.0, profile=NoiseProfile.HOMOSKEDASTIC)
    np.testing.assert_allclose(flat, 2.0)


def test_noise_vector_passes_through_and_checks_length():
    vector = np.linspace(0.5, 1.5, 6)
    np.testing.assert_array_equal(make_noise_profile(6, 2, vector), vector)
    with pytest.raises(DimensionError):
        make_noise_profile(7, 2, vector)


def test_spiked_model_summary_quantities(stepped_model):
    assert (stepped_model.d, stepped_model.r) == (20, 3)
    assert stepped_model.kappa == pytest.approx(16.0)
    assert stepped_model.rho == pytest.approx(0.5)


def test_spiked_model_rejects_bad_inputs():
    with pytest.raises(DimensionError):
        make_spiked_model(4, 4, 1.0, 1.0, seed=0)
    with pytest.raises(ValidationError):
        SpikedModel(u_star=np.ones((4, 1)), nu=1.0, sigma=np.ones(4))
    with pytest.raises(ValidationError):
        SpikedModel(u_star=np.eye(4)[:, :1], nu=-1.0, sigma=np.ones(4))


def test_quiet_support_keeps_signal_off_loud_coordinates():
    model = make_spiked_model(20, 3, 1.0, 2.0, seed=11, support=SignalSupport.QUIET)
    np.testing.assert_array_equal(model.u_star[:3], 0.0)
    np.testing.assert_allclose(model.u_star.T @ model.u_star, np.eye(3), atol=1e-12)
    gmm = make_mixture_model(20, 3, 1.0, 2.0, seed=11, support=SignalSupport.QUIET)
    np.testing.assert_allclose(gmm.means[:, :3], 0.0, atol=1e-12)


def test_quiet_support_matches_full_draw_for_flat_noise():
    levels = np.full(9, 0.7)
    np.testing.assert_array_equal(
        signal_basis(levels, 2, seed=4, support=SignalSupport.QUIET),
        signal_basis(levels, 2, seed=4, support=SignalSupport.FULL),
    )
    with pytest.raises(DimensionError):
        signal_basis(np.array([1.0, 1.0, 0.5, 2.0]), 2, seed=0, support=SignalSupport.QUIET)


def test_spiked_sample_returns_latents(spiked_model):
    batch = sample_spiked(spiked_model, 50, seed=1)
    assert batch.x.shape == (10, 50) and batch.z.shape == (2, 50) and batch.xi.shape == (10, 50)
    np.testing.assert_allclose(batch.x, spiked_model.u_star @ batch.z + batch.xi, atol=1e-12)
    np.testing.assert_array_equal(batch.x, sample_spiked(spiked_model, 50, seed=1).x)
    with pytest.raises(DimensionError):
        sample_spiked(spiked_model, 0, seed=1)


def test_spiked_sample_covariance(spiked_model):
    d, n = spiked_model.d, 10_000
    bound = 10 * spiked_model.sigma.max() ** 2 * np.sqrt(d / n)
    for replicate in range(20):
        x = np.array(sample_spiked(spiked_model, n, seed=derive_seed(2, replicate)).x)
        empirical = x @ x.T / n
        assert np.linalg.norm(empirical - spiked_model.covariance(), 2) <= bound


def test_spiked_sample_without_signal_or_noise_is_zero(spiked_model):
    silent = SpikedModel(u_star=spiked_model.u_star, nu=0.0, sigma=np.zeros(spiked_model.d))
    batch = sample_spiked(silent, 40, seed=5)
    np.testing.assert_array_equal(batch.x, np.zeros((spiked_model.d, 40)))


def test_mixture_model_constraints():
    gmm = make_mixture_model(12, 3, 1.5, 1.0, seed=4)
    assert gmm.k == 4 and gmm.r == 3 and gmm.d == 12
    np.testing.assert_allclose(gmm.probs.sum(), 1.0)
    np.testing.assert_allclose(gmm.probs @ gmm.means, 0.0, atol=1e-10)
    np.testing.assert_allclose(np.linalg.norm(gmm.means, axis=1), np.sqrt(3) * 1.5)
    assert gmm.nu == pytest.approx(1.5)
    basis = gmm.signal_basis()
    np.testing.assert_allclose(basis.T @ basis, np.eye(3), atol=1e-10)
    np.testing.assert_allclose(basis @ basis.T @ gmm.means.T, gmm.means.T, atol=1e-10)


def test_mixture_class_means():
    gmm = make_mixture_model(10, 2, 1.0, 1.0, seed=8)
    counts = [30_000, 30_000, 40_000]
    batch = sample_mixture(gmm, counts, seed=3)
    blocks = batch.blocks(gmm.k)
    for label, (block, count) in enumerate(zip(blocks, counts)):
        assert block.shape == (10, count)
        deviation = np.max(np.abs(block.mean(axis=1) - gmm.means[label]))
        assert deviation <= 5 * 1.0 / np.sqrt(count)


def test_mixture_without_noise_repeats_the_class_means():
    gmm = make_mixture_model(10, 2, 1.0, 0.0, seed=8)
    np.testing.assert_array_equal(gmm.covs, 0.0)
    batch = sample_mixture(gmm, [3, 4, 5], seed=1)
    for label, block in enumerate(batch.blocks(gmm.k)):
        np.testing.assert_array_equal(block, np.tile(gmm.means[label][:, None], (1, block.shape[1])))


def test_mixture_rejects_bad_counts():
    gmm = make_mixture_model(10, 2, 1.0, 1.0, seed=8)
    with pytest.raises(DimensionError):
        sample_mixture(gmm, [1, 1], seed=0)
    with pytest.raises(DimensionError):
        sample_mixture(gmm, [0, 0, 0], seed=0)


def test_regression_task_labels(spiked_model):
    w = sample_unit_vector(2, seed=1)
    x_hat, y, z_hat = sample_regression_task(spiked_model, w, 100_000, seed=6)
    assert x_hat.shape == (10, 100_000)
    np.testing.assert_allclose(y, w @ z_hat / spiked_model.nu)
    assert abs(y.var() - 1.0) < 0.03


def test_regression_task_contracts(spiked_model):
    with pytest.raises(ContractError):
        sample_regression_task(spiked_model, np.array([1.0, 1.0]), 10, seed=0)
    silent = SpikedModel(u_star=spiked_model.u_star, nu=0.0, sigma=spiked_model.sigma)
    with pytest.raises(ZeroScaleError):
        sample_regression_task(silent, np.array([1.0, 0.0]), 10, seed=0)


def test_task_vectors_orthonormal_when_fewer_than_rank():
    vectors = sample_task_vectors(10, 8, seed=0)
    assert vectors.shape == (8, 10)
    np.testing.assert_allclose(vectors @ vectors.T, np.eye(8), atol=1e-12)


def test_task_vectors_spread_when_many():
    vectors = sample_task_vectors(10, 20, seed=0)
    assert vectors.shape == (20, 10)
    np.testing.assert_allclose(np.linalg.norm(vectors, axis=1), 1.0)
    assert np.linalg.eigvalsh(vectors.T @ vectors)[0] > 0.01 * 20 / 10


@pytest.mark.slow
def test_random_mask_frequencies():
    bits = np.array([random_mask(20, seed=s).bits for s in range(100_000)])
    assert set(np.unique(bits)) <= {0, 1}
    np.testing.assert_allclose(bits.mean(axis=0), 0.5, atol=0.005)


def test_mask_and_complement_partition_the_coordinates():
    for seed in range(50):
        mask = random_mask(15, seed=seed)
        other = mask.complement()
        np.testing.assert_array_equal(mask.bits * other.bits, 0)
        np.testing.assert_array_equal(mask.bits + other.bits, 1)
        np.testing.assert_array_equal(mask.matrix() + other.matrix(), np.eye(15))


def test_mask_complement_and_apply():
    mask = random_mask(6, seed=1)
    x = np.arange(12.0).reshape(6, 2)
    np.testing.assert_array_equal(mask.apply(x) + mask.complement().apply(x), x)
    np.testing.assert_array_equal(mask.matrix() @ x, mask.apply(x))
