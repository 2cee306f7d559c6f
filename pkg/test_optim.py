"""Tests for the loss functions and the gradient descent oracle."""
import logging
from itertools import product

import numpy as np
import pytest

from domain.errors import ContractError, DimensionError, StepSizeError
from domain.models import DiagMask, GDConfig, LossData, LossKind, LossSpec, MaskPolicy
from infrastructure.metrics import sin_theta
from infrastructure.optim import (
    LossObjective,
    closed_form_minimizer,
    eval_loss,
    finite_diff_gradient,
    loss_gradient,
    minimize,
    random_init,
)
from infrastructure.sampling import random_mask
from infrastructure.spectral import top_r_eigenbasis
from src.usecases.validation_usecase import oracle_instance

CONTRASTIVE = [LossKind.SELFCON, LossKind.SUPCON_HYBRID, LossKind.HSIC_TRANSFER]


def _all_masks(d):
    return tuple(DiagMask(bits=bits) for bits in product((0, 1), repeat=d))


def _subspace(w):
    _, _, right = np.linalg.svd(w, full_matrices=False)
    return right.T


def _relative(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(a)


@pytest.mark.parametrize("kind", CONTRASTIVE)
def test_zero_representation_has_zero_loss_and_gradient(kind):
    spec, data, _ = oracle_instance(kind, seed=1)
    w = np.zeros((2, 8))
    assert eval_loss(spec, w, data) == 0.0
    np.testing.assert_array_equal(loss_gradient(spec, w, data), 0.0)


@pytest.mark.parametrize("kind", list(LossKind))
def test_gradient_matches_finite_differences(kind):
    spec, data, _ = oracle_instance(kind, seed=2)
    w = random_init(2, 8, seed=3)
    assert _relative(loss_gradient(spec, w, data), finite_diff_gradient(spec, w, data)) <= 1e-5


def test_gradient_with_decoder_matches_finite_differences():
    spec, data, _ = oracle_instance(LossKind.MASKED_AUTOENCODER, seed=4)
    decoder = np.random.default_rng(0).standard_normal((8, 2))
    data = data.model_copy(update={"decoder": decoder})
    w = random_init(2, 8, seed=5)
    assert _relative(loss_gradient(spec, w, data), finite_diff_gradient(spec, w, data)) <= 1e-5


def test_selfcon_views_gradient_matches_finite_differences():
    rng = np.random.default_rng(6)
    data = LossData(views=(rng.standard_normal((5, 9)), rng.standard_normal((5, 9))))
    spec = LossSpec(kind=LossKind.SELFCON, lam=0.7)
    w = random_init(2, 5, seed=7)
    assert _relative(loss_gradient(spec, w, data), finite_diff_gradient(spec, w, data)) <= 1e-5


def test_regularizer_gradient_term():
    spec, data, _ = oracle_instance(LossKind.SELFCON, seed=8)
    spec = spec.model_copy(update={"lam": 2.5})
    w = random_init(2, 8, seed=9)
    s = LossObjective(spec, data).reference
    np.testing.assert_allclose(loss_gradient(spec, w, data) + 2 * w @ s, 5.0 * w @ (w.T @ w), atol=1e-12)


def test_finite_differences_shrink_with_step():
    spec, data, _ = oracle_instance(LossKind.SELFCON, seed=10)
    w = random_init(2, 8, seed=11)
    exact = loss_gradient(spec, w, data)
    coarse = np.linalg.norm(finite_diff_gradient(spec, w, data, h=1e-3) - exact)
    fine = np.linalg.norm(finite_diff_gradient(spec, w, data, h=1e-5) - exact)
    assert fine < coarse
    with pytest.raises(ContractError):
        finite_diff_gradient(spec, w, data, h=0.0)


def test_loss_depends_on_gram_only():
    spec, data, _ = oracle_instance(LossKind.HSIC_TRANSFER, seed=12)
    w = random_init(2, 8, seed=13)
    angle = 0.7
    rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    assert eval_loss(spec, rotation @ w, data) == pytest.approx(eval_loss(spec, w, data), abs=1e-10)


def test_selfcon_completes_the_square():
    rng = np.random.default_rng(14)
    x = rng.standard_normal((6, 8))
    masks = tuple(random_mask(6, seed=s) for s in range(3))
    spec = LossSpec(kind=LossKind.SELFCON, lam=1.5, mask_policy=MaskPolicy.FIXED, masks=masks)
    data = LossData(x=x)
    s = LossObjective(spec, data).reference
    w = random_init(3, 6, seed=15)
    completed = 0.75 * np.linalg.norm(w.T @ w - s / 1.5) ** 2 - np.linalg.norm(s) ** 2 / 3.0
    assert eval_loss(spec, w, data) == pytest.approx(completed, abs=1e-8)


def test_fixed_over_all_masks_equals_expectation():
    spec, data, _ = oracle_instance(LossKind.SELFCON, seed=16)
    fixed = LossSpec(kind=LossKind.SELFCON, mask_policy=MaskPolicy.FIXED, masks=_all_masks(8))
    np.testing.assert_allclose(
        LossObjective(fixed, data).reference, LossObjective(spec, data).reference, atol=1e-10
    )
    resample = LossSpec(kind=LossKind.SELFCON, mask_policy=MaskPolicy.RESAMPLE)
    w = random_init(2, 8, seed=17)
    assert eval_loss(resample, w, data) == pytest.approx(eval_loss(spec, w, data), abs=1e-12)


def test_single_pair_contributes_no_negatives(caplog):
    x1, x2 = np.array([[1.0], [2.0]]), np.array([[0.5], [-1.0]])
    spec = LossSpec(kind=LossKind.SELFCON)
    with caplog.at_level(logging.WARNING):
        value = eval_loss(spec, np.array([[1.0, 1.0]]), LossData(views=(x1, x2)))
    assert np.isfinite(value)
    assert "negative-pair sum is empty" in caplog.text


def test_mismatched_bundles_are_rejected():
    x = np.random.default_rng(0).standard_normal((4, 10))
    with pytest.raises(ContractError):
        eval_loss(LossSpec(kind=LossKind.SUPCON_HYBRID), np.ones((1, 4)), LossData(x=x))
    with pytest.raises(ContractError):
        eval_loss(LossSpec(kind=LossKind.HSIC_TRANSFER, alpha=(1.0,)), np.ones((1, 4)), LossData(x=x))
    with pytest.raises(ContractError):
        eval_loss(LossSpec(kind=LossKind.AUTOENCODER), np.ones((1, 4)), LossData())
    masks = (random_mask(5, seed=0),)
    with pytest.raises(DimensionError):
        eval_loss(LossSpec(kind=LossKind.SELFCON, mask_policy=MaskPolicy.FIXED, masks=masks), np.ones((1, 4)),
                  LossData(x=x))
    with pytest.raises(DimensionError):
        eval_loss(LossSpec(kind=LossKind.SELFCON), np.ones((1, 3)), LossData(x=x))


def test_loss_spec_contracts():
    with pytest.raises(ValueError):
        LossSpec(kind=LossKind.SELFCON, lam=0.0)
    with pytest.raises(ValueError):
        LossSpec(kind=LossKind.SUPCON_HYBRID, alpha=(1.0, -1.0))
    with pytest.raises(ValueError):
        LossSpec(kind=LossKind.SELFCON, mask_policy=MaskPolicy.FIXED)
    assert LossSpec(kind="selfcon", **{"lambda": 2.0}).lam == 2.0


@pytest.mark.parametrize("kind", list(LossKind))
def test_closed_form_minimizer_is_stationary(kind):
    spec, data, _ = oracle_instance(kind, seed=18)
    objective = LossObjective(spec, data)
    w = closed_form_minimizer(spec, data, 2)
    assert np.linalg.norm(objective.gradient(w)) <= 1e-6 * objective.scale()


def test_closed_form_minimizer_scales_with_lambda():
    spec, data, target = oracle_instance(LossKind.SELFCON, seed=19)
    w1 = closed_form_minimizer(spec, data, 2)
    w3 = closed_form_minimizer(spec.model_copy(update={"lam": 3.0}), data, 2)
    np.testing.assert_allclose(w3, w1 / np.sqrt(3.0), atol=1e-12)
    assert sin_theta(_subspace(w1), top_r_eigenbasis(target, 2).basis).value < 1e-8


def test_minimize_rejects_zero_init():
    spec, data, _ = oracle_instance(LossKind.SELFCON, seed=20)
    with pytest.raises(ContractError):
        minimize(spec, data, np.zeros((2, 8)), GDConfig(max_iters=5))


def test_minimize_reports_divergence():
    spec, data, _ = oracle_instance(LossKind.SELFCON, seed=21)
    with pytest.raises(StepSizeError) as excinfo:
        minimize(spec, data, random_init(2, 8, seed=0), GDConfig(step_size=1e3, max_iters=100))
    assert excinfo.value.iteration >= 1


def test_minimize_descends_monotonically_under_fixed_masks():
    spec, data, _ = oracle_instance(LossKind.SELFCON, seed=22)
    masks = tuple(random_mask(8, seed=s) for s in range(4))
    fixed = LossSpec(kind=LossKind.SELFCON, mask_policy=MaskPolicy.FIXED, masks=masks)
    result = minimize(fixed, data, random_init(2, 8, seed=1), GDConfig(max_iters=2000))
    assert result.trace.shape == (result.iterations + 1,)
    assert np.all(np.diff(result.trace) <= 1e-12)


def test_minimize_stops_at_gradient_tolerance():
    spec, data, _ = oracle_instance(LossKind.AUTOENCODER, seed=23)
    init = closed_form_minimizer(spec, data, 2)
    result = minimize(spec, data, init, GDConfig(max_iters=100, grad_tol=1e-6 * LossObjective(spec, data).scale()))
    assert result.converged and result.iterations == 0


def test_selfcon_gd_over_all_masks_matches_spectral():
    _, data, target = oracle_instance(LossKind.SELFCON, seed=24)
    spec = LossSpec(kind=LossKind.SELFCON, mask_policy=MaskPolicy.FIXED, masks=_all_masks(8))
    step = 0.05 / LossObjective(spec, data).scale()
    result = minimize(spec, data, random_init(2, 8, seed=2), GDConfig(step_size=step, max_iters=10000))
    assert sin_theta(_subspace(result.w), top_r_eigenbasis(target, 2).basis).value <= 1e-3


def test_autoencoder_gd_matches_pca():
    spec, data, target = oracle_instance(LossKind.AUTOENCODER, seed=25)
    step = 0.05 / LossObjective(spec, data).scale()
    result = minimize(spec, data, random_init(2, 8, seed=3), GDConfig(step_size=step, max_iters=10000))
    assert sin_theta(_subspace(result.w), top_r_eigenbasis(target, 2).basis).value <= 1e-3


def test_resampled_masks_are_seeded():
    _, data, target = oracle_instance(LossKind.SELFCON, seed=26)
    spec = LossSpec(kind=LossKind.SELFCON, mask_policy=MaskPolicy.RESAMPLE)
    init = random_init(2, 8, seed=4)
    first = minimize(spec, data, init, GDConfig(max_iters=5000, seed=9))
    second = minimize(spec, data, init, GDConfig(max_iters=5000, seed=9))
    other = minimize(spec, data, init, GDConfig(max_iters=5000, seed=10))
    np.testing.assert_array_equal(first.w, second.w)
    assert not np.array_equal(first.w, other.w)
    assert sin_theta(_subspace(first.w), top_r_eigenbasis(target, 2).basis).value <= 0.3
