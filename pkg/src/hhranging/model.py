"""Physical parameters, Gaussian-state covariances, and outcome distributions.

Conventions: quadratures x = a + a^dag, p = (a - a^dag)/i, so a thermal
state with mean photon number N has quadrature variance 2N + 1 and the
vacuum has variance 1.  A complex heterodyne outcome alpha ~ CN(0, s2)
has independent real and imaginary parts, each N(0, s2/2).

Two outcome models are supported:

* ``Mode.EXACT`` keeps the full covariances, including the kappa*N_S
  contribution on the returned target mode and the one unit of vacuum
  noise added by heterodyning.
* ``Mode.ASYMPTOTIC`` is the leading-order model valid for
  kappa, N_S << 1 << N_B: every heterodyne outcome is CN(0, N_B) and the
  conditional homodyne outcome has unit variance.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError


class Mode(enum.Enum):
    EXACT = "exact"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class ProtocolParams:
    """Physical and simulation parameters for one ranging experiment."""

    kappa: float
    n_s: float
    n_b: float
    d: int
    m_pulses: int
    mode: Mode = Mode.ASYMPTOTIC

    def __post_init__(self):
        if not 0.0 < self.kappa < 1.0:
            raise ParameterError(f"kappa must be in (0, 1), got {self.kappa}")
        if self.n_s <= 0.0:
            raise ParameterError(f"n_s must be > 0, got {self.n_s}")
        if self.n_b <= 0.0:
            raise ParameterError(f"n_b must be > 0, got {self.n_b}")
        if self.d < 2:
            raise ParameterError(f"d must be >= 2, got {self.d}")
        if self.m_pulses < 1:
            raise ParameterError(f"m_pulses must be >= 1, got {self.m_pulses}")

    @property
    def regime_warning(self) -> bool:
        """True when the asymptotic validity regime is clearly left.

        The asymptotic model assumes kappa, N_S << 1 << N_B.  Construction
        never rejects parameters outside that regime; this flag lets
        callers surface a diagnostic instead.
        """
        return self.kappa > 0.1 or self.n_s > 0.5 or self.n_b < 10.0


@dataclass(frozen=True)
class ConditionalIdler:
    """Displaced-thermal idler state after one heterodyne round."""

    mu: complex
    n_th: float

    def __post_init__(self):
        if self.n_th < 0.0:
            raise ParameterError(f"n_th must be >= 0, got {self.n_th}")


@dataclass(frozen=True)
class CovarianceMatrix:
    """Real symmetric covariance matrix in (x1, p1, x2, p2, ...) ordering."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ParameterError(f"covariance must be square with even dim, got {m.shape}")
        if not np.allclose(m, m.T):
            raise ParameterError("covariance must be symmetric")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class PulseOutcome:
    """Measurement record for a single pulse."""

    heterodyne: np.ndarray  # (d,) complex
    theta: float
    homodyne: float


def tmsv_covariance(n_s: float) -> CovarianceMatrix:
    """Covariance of a two-mode squeezed vacuum with signal photon number n_s."""
    if n_s < 0.0:
        raise ParameterError(f"n_s must be >= 0, got {n_s}")
    diag = (2.0 * n_s + 1.0) * np.eye(2)
    off = 2.0 * np.sqrt(n_s * (n_s + 1.0)) * np.diag([1.0, -1.0])
    return CovarianceMatrix(np.block([[diag, off], [off, diag]]))


def cct_joint_covariance(n_s: float, n_i: float, kappa: float, n_b: float) -> CovarianceMatrix:
    """Joint covariance of the returned target mode and a classically
    correlated thermal idler."""
    if min(n_s, n_i, kappa, n_b) < 0.0:
        raise ParameterError("cct_joint_covariance arguments must be >= 0")
    ret = (2.0 * n_b + 2.0 * kappa * n_s + 1.0) * np.eye(2)
    idl = (2.0 * n_i + 1.0) * np.eye(2)
    off = 2.0 * np.sqrt(kappa * n_s * n_i) * np.eye(2)
    return CovarianceMatrix(np.block([[ret, off], [off, idl]]))


def heterodyne_scales(params: ProtocolParams) -> tuple[float, float]:
    """Per-quadrature standard deviations (target mode, other modes).

    Heterodyne on a thermal mode of variance 2N+1 yields a complex
    outcome CN(0, N+1); the asymptotic model drops the +1 and the
    kappa*N_S contribution.
    """
    if params.mode is Mode.ASYMPTOTIC:
        s = np.sqrt(params.n_b / 2.0)
        return s, s
    s_t = np.sqrt((params.n_b + params.kappa * params.n_s + 1.0) / 2.0)
    s_o = np.sqrt((params.n_b + 1.0) / 2.0)
    return s_t, s_o


def sample_heterodyne_round(
    params: ProtocolParams, t: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw the d complex heterodyne outcomes of one pulse, target at index t.

    Consumes exactly 2*d standard normals from ``rng`` (real, imag per
    mode, in mode order).
    """
    if not 1 <= t <= params.d:
        raise IndexError(f"target index {t} out of range [1, {params.d}]")
    raw = rng.standard_normal(2 * params.d)
    s_t, s_o = heterodyne_scales(params)
    scales = np.full(params.d, s_o)
    scales[t - 1] = s_t
    return (raw[0::2] + 1j * raw[1::2]) * scales


def conditional_idler(alpha_t: complex, params: ProtocolParams) -> ConditionalIdler:
    """Idler state conditioned on the heterodyne outcome at the target mode."""
    kappa, n_s, n_b = params.kappa, params.n_s, params.n_b
    if params.mode is Mode.ASYMPTOTIC:
        mu = (np.sqrt(kappa * n_s) / n_b) * np.conj(alpha_t)
        return ConditionalIdler(mu=complex(mu), n_th=n_s)
    denom = n_b + kappa * n_s + 1.0
    mu = (np.sqrt(kappa * n_s * (n_s + 1.0)) / denom) * np.conj(alpha_t)
    n_th = n_s * (n_b + 1.0 - kappa) / denom
    return ConditionalIdler(mu=complex(mu), n_th=n_th)


def homodyne_mean(idler: ConditionalIdler, theta: float) -> float:
    """Mean of the homodyne outcome at measurement angle theta."""
    return 2.0 * np.real(idler.mu * np.exp(-1j * theta))


def homodyne_variance(idler: ConditionalIdler) -> float:
    """Variance of the homodyne outcome, 2*n_th + 1."""
    return 2.0 * idler.n_th + 1.0


def trial_homodyne_variance(params: ProtocolParams) -> float:
    """Homodyne-outcome variance used by the per-trial outcome model.

    The asymptotic outcome model fixes unit variance (the 2*N_S term is
    part of what the kappa, N_S << 1 limit discards); the exact model
    uses 2*n_th + 1, which is independent of the heterodyne outcome.
    """
    if params.mode is Mode.ASYMPTOTIC:
        return 1.0
    denom = params.n_b + params.kappa * params.n_s + 1.0
    n_th = params.n_s * (params.n_b + 1.0 - params.kappa) / denom
    return 2.0 * n_th + 1.0


def sample_homodyne(
    idler: ConditionalIdler,
    theta: float,
    rng: np.random.Generator,
    variance: float | None = None,
) -> float:
    """Draw one homodyne outcome; consumes exactly one standard normal.

    ``variance`` overrides the idler's 2*n_th + 1 (used by the
    asymptotic trial model, which fixes unit variance).
    """
    var = homodyne_variance(idler) if variance is None else variance
    return homodyne_mean(idler, theta) + np.sqrt(var) * rng.standard_normal()
