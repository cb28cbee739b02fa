"""Independent brute-force cross-checks for the closed-form results.

Everything here deliberately avoids the code paths it validates: the
Wishart mean comes from direct sampling, the principal angle from an
explicit 2x2 eigendecomposition, and the classical baseline error from
simulating the decision statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytics import ctr_signal_strength
from .errors import ParameterError
from .receiver import ScatterMatrix, _normalize_angle

_BATCH = 100_000


@dataclass(frozen=True)
class OracleResult:
    estimate: float
    standard_error: float
    n_samples: int


def wishart_lambda_max_mean_mc(
    d: int, n_samples: int, rng: np.random.Generator, batch_size: int = _BATCH
) -> OracleResult:
    """Monte Carlo mean of lambda_max of the centered 2D scatter matrix.

    Samples d i.i.d. standard bivariate normals, centers them, forms the
    2x2 scatter matrix, and takes its top eigenvalue by the quadratic
    formula.  The normalized scatter follows W(2, d-1).
    """
    if d < 2:
        raise ParameterError(f"d must be >= 2, got {d}")
    if n_samples < 1_000:
        raise ParameterError(f"n_samples must be >= 1000, got {n_samples}")
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_samples:
        n = min(batch_size, n_samples - done)
        v = rng.standard_normal((n, d, 2))
        v -= v.mean(axis=1, keepdims=True)
        s_xx = (v[:, :, 0] ** 2).sum(axis=1)
        s_yy = (v[:, :, 1] ** 2).sum(axis=1)
        s_xy = (v[:, :, 0] * v[:, :, 1]).sum(axis=1)
        lam = 0.5 * (s_xx + s_yy) + 0.5 * np.hypot(s_xx - s_yy, 2.0 * s_xy)
        total += lam.sum()
        total_sq += (lam * lam).sum()
        done += n
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0)
    return OracleResult(
        estimate=mean,
        standard_error=np.sqrt(var / n_samples),
        n_samples=n_samples,
    )


def principal_angle_eig(scatter: ScatterMatrix) -> float:
    """Angle of the dominant eigenvector of a 2x2 scatter matrix.

    Uses the quadratic eigenvalue formula with the cancellation-safe
    discriminant sqrt((s_xx - s_yy)^2 + 4 s_xy^2); result lies in
    (-pi/2, pi/2], with 0 for the isotropic degenerate case.
    """
    a, b, c = scatter.s_xx, scatter.s_xy, scatter.s_yy
    if a < 0.0 or c < 0.0 or b * b > a * c * (1.0 + 1e-12) + 1e-300:
        raise ParameterError(f"scatter matrix not PSD: {scatter}")
    disc = np.hypot(a - c, 2.0 * b)
    if disc < 1e-30:
        return 0.0  # isotropic: every direction is principal
    lam = 0.5 * (a + c) + 0.5 * disc
    # Eigenvector of [[a, b], [b, c]] for lam; pick the better-conditioned
    # of the two component forms.
    if abs(lam - c) >= abs(lam - a):
        vx, vy = lam - c, b
    else:
        vx, vy = b, lam - a
    if vx == 0.0 and vy == 0.0:
        return 0.0
    return _normalize_angle(np.arctan2(vy, vx))


def ctr_error_mc(
    d: int,
    kappa: float,
    n_s: float,
    n_b: float,
    m: int,
    trials: int,
    rng: np.random.Generator,
    batch_size: int = _BATCH,
) -> OracleResult:
    """Monte Carlo error rate of the classical baseline's argmax decision.

    Simulates the d summed-homodyne statistics directly (standardized:
    unit-variance Gaussians with the target one shifted by z) and counts
    argmax errors; ties break toward the lowest index.  The standard
    error is derived from the 95% Wilson interval half-width.
    """
    if d < 2:
        raise ParameterError(f"d must be >= 2, got {d}")
    if trials < 1_000:
        raise ParameterError(f"trials must be >= 1000, got {trials}")
    z = ctr_signal_strength(kappa, n_s, n_b, m)
    errors = 0
    done = 0
    while done < trials:
        n = min(batch_size, trials - done)
        stats = rng.standard_normal((n, d))
        t = rng.integers(0, d, n)
        stats[np.arange(n), t] += z
        errors += int((stats.argmax(axis=1) != t).sum())
        done += n
    from .harness import wilson_interval  # deferred: harness imports receiver

    p_hat = errors / trials
    lo, hi = wilson_interval(errors, trials)
    return OracleResult(
        estimate=p_hat,
        standard_error=(hi - lo) / (2.0 * 1.959963984540054),
        n_samples=trials,
    )
