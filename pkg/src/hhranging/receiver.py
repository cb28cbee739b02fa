"""The hetero-homodyne receiver: angle selection, ML decoding, trial loop.

Per pulse, the d returned modes are heterodyned, the homodyne basis angle
is taken from the first principal component of the conjugated outcomes in
the complex plane, and the idler is homodyned at that angle.  After all
pulses a maximum-likelihood estimator picks the candidate index whose
predicted homodyne means are closest to the observed outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model
from .errors import ParameterError
from .model import Mode, ProtocolParams

# Below this squared-resultant magnitude the scatter is treated as
# isotropic and the angle defaults to 0 (any angle is equally good).
DEGENERATE_SCATTER = 1e-30


@dataclass(frozen=True)
class ScatterMatrix:
    """Symmetric PSD 2x2 second-moment matrix of centered outcomes."""

    s_xx: float
    s_xy: float
    s_yy: float


@dataclass(frozen=True)
class TrialRecord:
    """Everything observed and decided in one protocol trial."""

    heterodyne: np.ndarray  # (d, M) complex
    thetas: np.ndarray  # (M,)
    homodyne: np.ndarray  # (M,)
    true_index: int
    estimate: int


def _normalize_angle(theta: float) -> float:
    """Reduce an angle modulo pi into (-pi/2, pi/2]."""
    theta = (theta + np.pi / 2.0) % np.pi - np.pi / 2.0
    if theta <= -np.pi / 2.0:
        theta += np.pi
    return theta


def scatter_matrix(alphas: np.ndarray) -> ScatterMatrix:
    """Second moments of the centered conjugated outcomes."""
    alphas = np.asarray(alphas, dtype=complex)
    if alphas.size < 2:
        raise ParameterError("scatter_matrix needs at least 2 outcomes")
    z = np.conj(alphas) - np.mean(np.conj(alphas))
    x, y = z.real, z.imag
    return ScatterMatrix(s_xx=float(x @ x), s_xy=float(x @ y), s_yy=float(y @ y))


def homodyne_angle(alphas: np.ndarray) -> float:
    """Principal-component angle of the conjugated heterodyne outcomes.

    Equals half the argument of sum((conj(alpha_k) - mean)^2), reduced
    into (-pi/2, pi/2]; returns 0 for degenerate (isotropic) scatter.
    """
    alphas = np.asarray(alphas, dtype=complex)
    if alphas.size < 2:
        raise ParameterError("homodyne_angle needs at least 2 outcomes")
    z = np.conj(alphas) - np.mean(np.conj(alphas))
    s = np.sum(z * z)
    if abs(s) < DEGENERATE_SCATTER:
        return 0.0
    return _normalize_angle(0.5 * np.angle(s))


def ml_gain(params: ProtocolParams) -> float:
    """Scale factor g mapping conj(alpha_k) projections to homodyne means."""
    kappa, n_s, n_b = params.kappa, params.n_s, params.n_b
    if params.mode is Mode.ASYMPTOTIC:
        return 2.0 * np.sqrt(kappa * n_s) / n_b
    return 2.0 * np.sqrt(kappa * n_s * (n_s + 1.0)) / (n_b + kappa * n_s + 1.0)


def ml_estimate(
    heterodyne: np.ndarray,
    thetas: np.ndarray,
    homodyne: np.ndarray,
    params: ProtocolParams,
) -> int:
    """Index (1-based) whose predicted homodyne means are closest to X.

    Minimizes ||X - g * Re(conj(alpha_k) o exp(-i theta))||^2 over k.
    The homodyne variance is hypothesis-independent and drops out of the
    argmin.  Ties break toward the lowest index.
    """
    heterodyne = np.asarray(heterodyne, dtype=complex)
    thetas = np.asarray(thetas, dtype=float)
    homodyne = np.asarray(homodyne, dtype=float)
    if heterodyne.ndim != 2 or heterodyne.shape != (params.d, thetas.size) or (
        thetas.shape != homodyne.shape
    ):
        raise ParameterError(
            f"inconsistent trial shapes: heterodyne {heterodyne.shape}, "
            f"thetas {thetas.shape}, homodyne {homodyne.shape}"
        )
    g = ml_gain(params)
    mu = g * np.real(np.conj(heterodyne) * np.exp(-1j * thetas))  # (d, M)
    dist = ((homodyne - mu) ** 2).sum(axis=1)
    return int(np.argmin(dist)) + 1


def run_trial(params: ProtocolParams, t: int, rng: np.random.Generator) -> TrialRecord:
    """One full protocol trial with the target at index t.

    Consumes exactly m_pulses * (2 d + 1) standard normals from ``rng``,
    in (pulse, mode-quadrature, homodyne) order; this layout is what the
    harness fast path reproduces.  The propagation delay between modes is
    not simulated; the mode index stands in for arrival time.
    """
    if not 1 <= t <= params.d:
        raise IndexError(f"target index {t} out of range [1, {params.d}]")
    d, m = params.d, params.m_pulses
    heterodyne = np.empty((d, m), dtype=complex)
    thetas = np.empty(m)
    homodyne = np.empty(m)
    var = model.trial_homodyne_variance(params)
    for pulse in range(m):
        alphas = model.sample_heterodyne_round(params, t, rng)
        theta = homodyne_angle(alphas)
        idler = model.conditional_idler(alphas[t - 1], params)
        x = model.sample_homodyne(idler, theta, rng, variance=var)
        heterodyne[:, pulse] = alphas
        thetas[pulse] = theta
        homodyne[pulse] = x
    estimate = ml_estimate(heterodyne, thetas, homodyne, params)
    return TrialRecord(
        heterodyne=heterodyne,
        thetas=thetas,
        homodyne=homodyne,
        true_index=t,
        estimate=estimate,
    )
