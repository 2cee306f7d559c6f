"""Seeded samplers for the generative models.

Every function takes an explicit seed and builds its own
``numpy.random.Generator``; there is no module-level random state.
"""
import logging
from typing import Sequence, Tuple, Union

import numpy as np

from domain.errors import ContractError, DimensionError, ZeroScaleError
from domain.models import (
    DiagMask,
    LabeledBatch,
    MixtureModel,
    NoiseProfile,
    SampleBatch,
    SignalSupport,
    SpikedModel,
)

logger = logging.getLogger(__name__)

MAX_TASK_RESAMPLES = 100


def derive_seed(base_seed: int, *keys: int) -> int:
    """Mix a base seed with integer keys into a new 64-bit seed."""
    sequence = np.random.SeedSequence([int(base_seed), *(int(k) for k in keys)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed))


def sample_uniform_orthobasis(d: int, r: int, seed: int) -> np.ndarray:
    """Haar-distributed d x r orthonormal basis.

    Orthonormalizes a standard Gaussian matrix and fixes the signs so the
    triangular factor has a positive diagonal.
    """
    if d < 1 or r < 1 or r > d:
        raise DimensionError(f"need 1 <= r <= d, got d={d}, r={r}")
    gaussian = _rng(seed).standard_normal((d, r))
    q, triangular = np.linalg.qr(gaussian)
    signs = np.sign(np.diag(triangular))
    signs[signs == 0] = 1.0
    return q * signs


def sample_unit_vector(r: int, seed: int) -> np.ndarray:
    """Uniform point on the unit sphere in R^r."""
    return sample_uniform_orthobasis(r, 1, seed)[:, 0] if r > 1 else np.ones(1)


def make_noise_profile(
    d: int,
    r: int,
    sigma: Union[float, Sequence[float]],
    kappa: float = 16.0,
    profile: NoiseProfile = NoiseProfile.STEPPED,
) -> np.ndarray:
    """Noise standard deviations sigma_1..sigma_d.

    A vector is returned unchanged. A scalar is the largest level sigma_(1):
    ``homoskedastic`` repeats it, ``stepped`` keeps it on the first r
    coordinates and divides it by sqrt(kappa) elsewhere.
    """
    if np.ndim(sigma) == 1:
        levels = np.asarray(sigma, dtype=float)
        if levels.shape != (d,):
            raise DimensionError(f"sigma vector must have length {d}, got {levels.shape[0]}")
        return levels
    levels = np.full(d, float(sigma))
    if NoiseProfile(profile) == NoiseProfile.STEPPED:
        levels[r:] = float(sigma) / np.sqrt(kappa)
    return levels


def signal_basis(levels, r: int, seed: int, support: SignalSupport = SignalSupport.FULL) -> np.ndarray:
    """Haar d x r basis, restricted to the quiet coordinates when asked.

    With ``quiet`` support the rows outside the lowest noise level are zero;
    if every coordinate is at that level the result equals the full draw.
    """
    levels = np.asarray(levels, dtype=float)
    d = levels.shape[0]
    if SignalSupport(support) == SignalSupport.FULL:
        return sample_uniform_orthobasis(d, r, seed)
    rows = np.flatnonzero(np.isclose(levels, levels.min(), rtol=1e-12, atol=0.0))
    if rows.size < r:
        raise DimensionError(f"{rows.size} coordinates at the lowest noise level cannot hold r={r}")
    basis = np.zeros((d, r))
    basis[rows] = sample_uniform_orthobasis(rows.size, r, seed)
    return basis


def make_spiked_model(
    d: int,
    r: int,
    nu: float,
    sigma: Union[float, Sequence[float]],
    seed: int,
    kappa: float = 16.0,
    profile: NoiseProfile = NoiseProfile.STEPPED,
    support: SignalSupport = SignalSupport.FULL,
) -> SpikedModel:
    """Spiked model with a Haar signal subspace on the allowed coordinates."""
    if r >= d:
        raise DimensionError(f"need r < d, got d={d}, r={r}")
    levels = make_noise_profile(d, r, sigma, kappa, profile)
    return SpikedModel(u_star=signal_basis(levels, r, seed, support), nu=nu, sigma=levels)


def sample_spiked(model: SpikedModel, n: int, seed: int) -> SampleBatch:
    if n < 1:
        raise DimensionError(f"n must be positive, got {n}")
    rng = _rng(seed)
    z = model.nu * rng.standard_normal((model.r, n))
    xi = model.sigma[:, None] * rng.standard_normal((model.d, n))
    return SampleBatch(x=model.u_star @ z + xi, z=z, xi=xi, seed=seed)


def make_mixture_model(
    d: int,
    r: int,
    nu: float,
    sigma: Union[float, Sequence[float]],
    seed: int,
    kappa: float = 16.0,
    profile: NoiseProfile = NoiseProfile.STEPPED,
    support: SignalSupport = SignalSupport.FULL,
) -> MixtureModel:
    """Balanced (r+1)-class mixture whose means are a rotated regular simplex.

    The simplex vertices are centered, embedded through a Haar d x r basis
    (see ``signal_basis``), recentered and rescaled to norm sqrt(r) * nu.
    """
    if r >= d:
        raise DimensionError(f"need r < d, got d={d}, r={r}")
    levels = make_noise_profile(d, r, sigma, kappa, profile)
    k = r + 1
    vertices = np.eye(k) - 1.0 / k
    left, _, _ = np.linalg.svd(vertices)
    coords = vertices @ left[:, :r]
    means = coords @ signal_basis(levels, r, seed, support).T
    probs = np.full(k, 1.0 / k)
    means -= probs @ means
    means *= (np.sqrt(r) * nu / np.linalg.norm(means, axis=1))[:, None]
    return MixtureModel(means=means, covs=np.tile(levels ** 2, (k, 1)), probs=probs)


def sample_mixture(gmm: MixtureModel, counts: Sequence[int], seed: int) -> LabeledBatch:
    if len(counts) != gmm.k:
        raise DimensionError(f"expected {gmm.k} class counts, got {len(counts)}")
    if any(c < 0 for c in counts) or sum(counts) == 0:
        raise DimensionError("counts must be nonnegative with at least one positive")
    rng = _rng(seed)
    blocks, labels = [], []
    for label, count in enumerate(counts):
        noise = rng.standard_normal((gmm.d, count))
        blocks.append(gmm.means[label][:, None] + np.sqrt(gmm.covs[label])[:, None] * noise)
        labels.append(np.full(count, label))
    return LabeledBatch(x=np.hstack(blocks), labels=np.concatenate(labels), seed=seed)


def sample_regression_task(
    model: SpikedModel, w_t: np.ndarray, m: int, seed: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Labeled task sample (x_hat, y, z_hat) with y_i = <w_t, z_i> / nu."""
    w_t = np.asarray(w_t, dtype=float)
    if abs(np.linalg.norm(w_t) - 1.0) > 1e-12:
        raise ContractError(f"w_t must be a unit vector, got norm {np.linalg.norm(w_t)}")
    if model.nu == 0:
        raise ZeroScaleError("labels divide by nu, which is zero")
    batch = sample_spiked(model, m, seed)
    return np.array(batch.x), w_t @ batch.z / model.nu, np.array(batch.z)


def sample_task_vectors(r: int, t: int, seed: int, min_eig: float = 0.01) -> np.ndarray:
    """Source-task coefficients, one unit vector per row (t x r).

    Fewer than r tasks get orthonormal vectors. Otherwise Haar unit vectors
    are drawn until lambda_r(sum_t w_t w_t^T) exceeds min_eig * t / r.
    """
    if t < r:
        return sample_uniform_orthobasis(r, r, seed)[:, :t].T
    for attempt in range(MAX_TASK_RESAMPLES):
        gaussian = _rng(derive_seed(seed, attempt)).standard_normal((t, r))
        vectors = gaussian / np.linalg.norm(gaussian, axis=1, keepdims=True)
        if np.linalg.eigvalsh(vectors.T @ vectors)[0] > min_eig * t / r:
            return vectors
        logger.debug(f"Resampling task vectors (attempt {attempt + 1})")
    raise ContractError(f"could not draw {t} well-spread task vectors in R^{r}")


def random_mask(d: int, seed: int) -> DiagMask:
    """Bernoulli(1/2) diagonal mask."""
    if d < 1:
        raise DimensionError(f"d must be positive, got {d}")
    return DiagMask(bits=_rng(seed).integers(0, 2, size=d))
