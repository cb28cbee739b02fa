"""Monte Carlo orchestration: error-probability estimation and sweeps.

Reproducibility contract: trial ``i`` of a run with master seed ``s``
always consumes the stream SFC64(SeedSequence((s, i))), drawing first the
true index (uniform mode only) and then the trial's normals in (pulse,
mode-quadrature, homodyne) order.  Results are therefore bit-identical
for a given master seed regardless of chunking, parallelism, or
scheduling.

Trials are run through a compiled streaming kernel that keeps only the d
running ML distance accumulators per trial; it consumes the identical
random stream as ``receiver.run_trial`` and produces identical estimates.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numba
import numpy as np

from . import analytics
from .errors import ParameterError, StatisticalFloorError
from .model import ProtocolParams, heterodyne_scales, trial_homodyne_variance
from .receiver import DEGENERATE_SCATTER, ml_gain

_Z95 = 1.959963984540054
# Trials per kernel invocation; a tuning knob only, results do not depend
# on it (each trial owns its substream).
_CHUNK = 1024


@dataclass(frozen=True)
class ErrorEstimate:
    p_hat: float
    ci_low: float
    ci_high: float
    errors: int
    trials: int


@dataclass(frozen=True)
class SweepPoint:
    m: int
    estimate: ErrorEstimate
    log_bound_qtr: float
    log_ctr_exact: float


def wilson_interval(errors: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1 or errors < 0 or errors > trials:
        raise ParameterError(f"invalid counts: {errors}/{trials}")
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))
    # the edges are exactly 0 and 1 at the boundary counts; rounding in
    # center - half would otherwise leave them off by ~1 ulp
    lo = 0.0 if errors == 0 else max(center - half, 0.0)
    hi = 1.0 if errors == trials else min(center + half, 1.0)
    return lo, hi


def trial_generator(master_seed: int, trial: int) -> np.random.Generator:
    """The dedicated random stream of one trial."""
    return np.random.Generator(np.random.SFC64(np.random.SeedSequence((master_seed, trial))))


@numba.njit(cache=True)
def _decode_trials(buf, tvec, d, m, scale_t, scale_o, g, hstd, est_out):
    """Streaming decoder for a batch of trials.

    ``buf[i]`` holds trial i's m*(2d+1) standard normals in draw order.
    Keeps O(d) state per trial: the running ML distance accumulators.
    """
    per = 2 * d + 1
    vr = np.empty(d)
    vi = np.empty(d)
    dist = np.empty(d)
    for i in range(buf.shape[0]):
        t = tvec[i] - 1
        row = buf[i]
        for k in range(d):
            dist[k] = 0.0
        base = 0
        for _ in range(m):
            mr = 0.0
            mi = 0.0
            for k in range(d):
                sc = scale_t if k == t else scale_o
                a = row[base + 2 * k] * sc
                b = -row[base + 2 * k + 1] * sc  # conjugated outcome
                vr[k] = a
                vi[k] = b
                mr += a
                mi += b
            mr /= d
            mi /= d
            s_re = 0.0
            s_im = 0.0
            for k in range(d):
                zr = vr[k] - mr
                zi = vi[k] - mi
                s_re += zr * zr - zi * zi
                s_im += 2.0 * zr * zi
            r = np.hypot(s_re, s_im)
            if r < DEGENERATE_SCATTER:
                ct = 1.0
                st = 0.0
            else:
                # half-angle of arg(s_re + i s_im); cos >= 0 matches the
                # (-pi/2, pi/2] normalization of homodyne_angle
                c2 = s_re / r
                ct = np.sqrt(max(0.5 * (1.0 + c2), 0.0))
                if ct < 1e-12:
                    ct = 0.0
                    st = 1.0
                else:
                    st = s_im / (2.0 * r * ct)
            x = g * (vr[t] * ct + vi[t] * st) + row[base + 2 * d] * hstd
            for k in range(d):
                diff = x - g * (vr[k] * ct + vi[k] * st)
                dist[k] += diff * diff
            base += per
        best = 0
        for k in range(1, d):
            if dist[k] < dist[best]:
                best = k
        est_out[i] = best + 1


def run_trial_batch(
    params: ProtocolParams,
    master_seed: int,
    start: int,
    count: int,
    index_mode: str = "uniform",
) -> tuple[np.ndarray, np.ndarray]:
    """Run trials [start, start+count) and return (true indices, estimates)."""
    d, m = params.d, params.m_pulses
    n_normals = m * (2 * d + 1)
    buf = np.empty((count, n_normals))
    tvec = np.empty(count, dtype=np.int64)
    for i in range(count):
        trial = start + i
        gen = trial_generator(master_seed, trial)
        if index_mode == "uniform":
            tvec[i] = gen.integers(1, d + 1)
        elif index_mode == "cycle":
            tvec[i] = trial % d + 1
        else:
            raise ParameterError(f"unknown index_mode {index_mode!r}")
        buf[i] = gen.standard_normal(n_normals)
    scale_t, scale_o = heterodyne_scales(params)
    g = ml_gain(params)
    hstd = math.sqrt(trial_homodyne_variance(params))
    est = np.empty(count, dtype=np.int64)
    _decode_trials(buf, tvec, d, m, scale_t, scale_o, g, hstd, est)
    return tvec, est


def _count_chunk_errors(args) -> int:
    params, master_seed, start, count, index_mode = args
    tvec, est = run_trial_batch(params, master_seed, start, count, index_mode)
    return int((est != tvec).sum())


def estimate_error_probability(
    params: ProtocolParams,
    trials: int,
    master_seed: int,
    parallelism: int = 1,
    index_mode: str = "uniform",
) -> ErrorEstimate:
    """Monte Carlo estimate of the average error probability (equal priors).

    Bit-identical output for a fixed master seed at any parallelism.
    """
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    if parallelism < 1:
        raise ParameterError(f"parallelism must be >= 1, got {parallelism}")
    chunks = [
        (params, master_seed, start, min(_CHUNK, trials - start), index_mode)
        for start in range(0, trials, _CHUNK)
    ]
    if parallelism == 1 or len(chunks) == 1:
        errors = sum(_count_chunk_errors(c) for c in chunks)
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            errors = sum(pool.map(_count_chunk_errors, chunks, chunksize=1))
    lo, hi = wilson_interval(errors, trials)
    return ErrorEstimate(
        p_hat=errors / trials, ci_low=lo, ci_high=hi, errors=errors, trials=trials
    )


def exponent_fit_stats(
    sweep: list[SweepPoint], min_errors: int = 20
) -> tuple[float, float]:
    """Weighted LS fit of ln p_hat vs m; returns (-slope, slope stderr).

    Weights come from the Wilson CI half-widths in log space.  Points
    with fewer than ``min_errors`` error events are dropped; fewer than
    3 usable points is a statistical-floor failure.
    """
    usable = [p for p in sweep if p.estimate.errors >= min_errors]
    if len(usable) < 3:
        raise StatisticalFloorError(
            f"exponent fit needs >= 3 points with >= {min_errors} errors, "
            f"got {len(usable)} of {len(sweep)}"
        )
    x = np.array([p.m for p in usable], dtype=float)
    y = np.array([math.log(p.estimate.p_hat) for p in usable])
    sigma = np.array(
        [
            (math.log(p.estimate.ci_high) - math.log(p.estimate.ci_low)) / (2.0 * _Z95)
            for p in usable
        ]
    )
    w = 1.0 / sigma**2
    xbar = (w * x).sum() / w.sum()
    ybar = (w * y).sum() / w.sum()
    sxx = (w * (x - xbar) ** 2).sum()
    slope = (w * (x - xbar) * (y - ybar)).sum() / sxx
    return -slope, math.sqrt(1.0 / sxx)


def exponent_fit(sweep: list[SweepPoint], min_errors: int = 20) -> float:
    """The empirical error exponent: minus the fitted slope of ln p_hat vs m."""
    return exponent_fit_stats(sweep, min_errors)[0]


def sweep_qtr_vs_ctr(
    params: ProtocolParams,
    m_grid,
    trials_per_point: int,
    master_seed: int,
    parallelism: int = 1,
    index_mode: str = "uniform",
) -> list[SweepPoint]:
    """Monte Carlo receiver error vs the analytic curves over an m grid.

    Points at different m share per-trial substream prefixes (common
    random numbers); each point is individually reproducible.
    """
    m_grid = [int(m) for m in m_grid]
    if not m_grid:
        raise ParameterError("m_grid must be nonempty")
    if any(m < 1 for m in m_grid):
        raise ParameterError("m_grid entries must be >= 1")
    if any(b <= a for a, b in zip(m_grid, m_grid[1:])):
        raise ParameterError("m_grid must be strictly increasing")
    points = []
    for m in m_grid:
        p_m = replace(params, m_pulses=m)
        est = estimate_error_probability(
            p_m, trials_per_point, master_seed, parallelism, index_mode
        )
        points.append(
            SweepPoint(
                m=m,
                estimate=est,
                log_bound_qtr=analytics.qtr_error_log_bound(
                    params.d, params.kappa, params.n_s, params.n_b, m
                ),
                log_ctr_exact=analytics.ctr_exact_log_error(
                    params.d, params.kappa, params.n_s, params.n_b, m
                ),
            )
        )
    return points
