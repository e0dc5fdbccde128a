"""
Brute-force baselines the closed-form solvers are checked against.

Nothing here knows about stationarity curves: the capacity oracle is a plain
vectorized grid over the duty square with local refinement, reported together
with an error bound derived from an empirical gradient bound, and the
derivative oracles are central finite differences.  The multi-antenna oracle
exhaustively scans the one-parameter family of joint PMFs that share given
marginals (two antennas per user), which brackets the staircase construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, DutyPair, hit_probs, mutual_info
from .miso import MisoConfig, _entropy_arr, subset_rates

__all__ = [
    "GridSpec",
    "GridResult",
    "grid_capacity",
    "fd_gradient",
    "fd_hessian",
    "miso_pmf_enumeration",
]

SAFETY_FACTOR = 1.5
TOP_CELLS = 5


@dataclass(frozen=True)
class GridSpec:
    """Initial step and number of tenfold local refinements."""

    step: float = 1e-2
    refine_rounds: int = 3

    def __post_init__(self) -> None:
        if not 0.0 < self.step <= 0.1:
            raise ValueError(f"step must lie in (0, 0.1], got {self.step}")
        if not 0 <= self.refine_rounds <= 6:
            raise ValueError(f"refine_rounds must lie in [0, 6], got {self.refine_rounds}")

    @property
    def final_step(self) -> float:
        return self.step / 10.0**self.refine_rounds


@dataclass(frozen=True)
class GridResult:
    """Best grid value with its resolution-derived error bound.

    error_bound = gradient_bound * final_step, where gradient_bound is the
    largest gradient norm seen on the coarse grid inflated by a safety factor.
    The true capacity lies in [capacity, capacity + error_bound].
    """

    capacity: float
    duty: DutyPair
    final_step: float
    gradient_bound: float
    error_bound: float


def _rate_grid(params: ChannelParams, m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """Vectorized I/tau over broadcastable duty arrays."""
    hp = hit_probs(params)
    h1, h2, h3, h4 = hp.entropies()
    w11 = m1 * m2
    w01 = (1.0 - m1) * m2
    w10 = m1 * (1.0 - m2)
    w00 = (1.0 - m1) * (1.0 - m2)
    ph = w11 * hp.p1 + w01 * hp.p2 + w10 * hp.p3 + w00 * hp.p4
    mix = w11 * h1 + w01 * h2 + w10 * h3 + w00 * h4
    return (_entropy_arr(ph) - mix) / params.tau


def _grad_norm_grid(params: ChannelParams, m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """Vectorized gradient norm of I/tau; boundary-safe log-odds."""
    hp = hit_probs(params)
    h1, h2, h3, h4 = hp.entropies()
    c1 = m2 * (hp.p1 - hp.p2) + (1.0 - m2) * (hp.p3 - hp.p4)
    c2 = m1 * (hp.p1 - hp.p3) + (1.0 - m1) * (hp.p2 - hp.p4)
    e1 = m2 * (h1 - h2) + (1.0 - m2) * (h3 - h4)
    e2 = m1 * (h1 - h3) + (1.0 - m1) * (h2 - h4)
    ph = (
        m1 * m2 * hp.p1
        + (1.0 - m1) * m2 * hp.p2
        + m1 * (1.0 - m2) * hp.p3
        + (1.0 - m1) * (1.0 - m2) * hp.p4
    )
    # Clamped: saturated cells would send the log-odds to -inf; the estimate
    # only has to stay an upper bound on the slopes actually seen.
    ph = np.clip(ph, 1e-15, 1.0 - 1e-15)
    lo = np.log1p(-ph) - np.log(ph)
    return np.hypot(c1 * lo - e1, c2 * lo - e2) / params.tau


def _axis(lo: float, hi: float, step: float) -> np.ndarray:
    lo, hi = max(lo, 0.0), min(hi, 1.0)
    n = max(1, int(round((hi - lo) / step)))
    return np.linspace(lo, hi, n + 1)


def _local_peaks(values: np.ndarray, g1: np.ndarray, g2: np.ndarray, sep: float) -> list[tuple[float, float, float]]:
    """Up to TOP_CELLS well-separated high cells as (value, mu1, mu2)."""
    flat = np.argsort(values, axis=None)[::-1]
    picked: list[tuple[float, float, float]] = []
    for k in flat:
        i, j = np.unravel_index(k, values.shape)
        mu1, mu2 = float(g1[i]), float(g2[j])
        if all(max(abs(mu1 - p1), abs(mu2 - p2)) >= sep for _, p1, p2 in picked):
            picked.append((float(values[i, j]), mu1, mu2))
        if len(picked) == TOP_CELLS:
            break
    return picked


def grid_capacity(params: ChannelParams, spec: GridSpec = GridSpec()) -> GridResult:
    """Best I/tau over a refined grid on the duty square.

    One full pass at spec.step, then refine_rounds local passes shrinking the
    step tenfold around the best cells; several separated incumbents are
    carried so close rival maxima cannot shake the search off the global one.
    The incumbent never decreases across rounds.
    """
    g = _axis(0.0, 1.0, spec.step)
    m1, m2 = np.meshgrid(g, g, indexing="ij")
    values = _rate_grid(params, m1, m2)
    gradient_bound = SAFETY_FACTOR * float(np.max(_grad_norm_grid(params, m1, m2)))

    if spec.refine_rounds == 0:
        i, j = np.unravel_index(np.argmax(values), values.shape)
        incumbents = [(float(values[i, j]), float(g[i]), float(g[j]))]
    else:
        incumbents = _local_peaks(values, g, g, 3.0 * spec.step)
    step = spec.step
    for _ in range(spec.refine_rounds):
        new_step = step / 10.0
        refined: list[tuple[float, float, float]] = []
        for val, mu1, mu2 in incumbents:
            a1 = _axis(mu1 - 1.5 * step, mu1 + 1.5 * step, new_step)
            a2 = _axis(mu2 - 1.5 * step, mu2 + 1.5 * step, new_step)
            w1, w2 = np.meshgrid(a1, a2, indexing="ij")
            local = _rate_grid(params, w1, w2)
            i, j = np.unravel_index(np.argmax(local), local.shape)
            best = max(val, float(local[i, j]))
            refined.append((best, float(w1[i, j]), float(w2[i, j])))
        incumbents = refined
        step = new_step

    capacity, mu1, mu2 = max(incumbents)
    return GridResult(
        capacity=capacity,
        duty=DutyPair(mu1, mu2),
        final_step=spec.final_step,
        gradient_bound=gradient_bound,
        error_bound=gradient_bound * spec.final_step,
    )


def fd_gradient(
    params: ChannelParams, duty: DutyPair, h: float = 1e-6
) -> tuple[float, float]:
    """Central-difference gradient of the per-slot mutual information."""
    mu1, mu2 = duty.mu1, duty.mu2
    if min(mu1, mu2, 1.0 - mu1, 1.0 - mu2) < h:
        raise ValueError(f"duty must be at least {h} away from the boundary")
    d1 = mutual_info(params, DutyPair(mu1 + h, mu2)) - mutual_info(
        params, DutyPair(mu1 - h, mu2)
    )
    d2 = mutual_info(params, DutyPair(mu1, mu2 + h)) - mutual_info(
        params, DutyPair(mu1, mu2 - h)
    )
    return (d1 / (2.0 * h), d2 / (2.0 * h))


def fd_hessian(
    params: ChannelParams, duty: DutyPair, h: float = 1e-4
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Central-difference Hessian of the per-slot mutual information."""
    mu1, mu2 = duty.mu1, duty.mu2
    if min(mu1, mu2, 1.0 - mu1, 1.0 - mu2) < h:
        raise ValueError(f"duty must be at least {h} away from the boundary")

    def f(x: float, y: float) -> float:
        return mutual_info(params, DutyPair(x, y))

    f00 = f(mu1, mu2)
    h11 = (f(mu1 + h, mu2) - 2.0 * f00 + f(mu1 - h, mu2)) / (h * h)
    h22 = (f(mu1, mu2 + h) - 2.0 * f00 + f(mu1, mu2 - h)) / (h * h)
    h12 = (
        f(mu1 + h, mu2 + h)
        - f(mu1 + h, mu2 - h)
        - f(mu1 - h, mu2 + h)
        + f(mu1 - h, mu2 - h)
    ) / (4.0 * h * h)
    return ((h11, h12), (h12, h22))


def _marginal_family(duties: list[float], step: float) -> np.ndarray:
    """All joint PMFs of one user with the given marginals, rows = PMFs.

    One antenna pins the PMF; with two, the both-on mass t is free on
    [max(0, mu_a + mu_b - 1), min(mu_a, mu_b)] and is scanned at the step.
    """
    if len(duties) == 1:
        mu = duties[0]
        return np.array([[1.0 - mu, mu]])
    mu_a, mu_b = duties
    lo = max(0.0, mu_a + mu_b - 1.0)
    hi = min(mu_a, mu_b)
    n = max(1, int(math.ceil((hi - lo) / step))) if hi > lo else 0
    t = np.linspace(lo, hi, n + 1)
    return np.column_stack([1.0 - mu_a - mu_b + t, mu_a - t, mu_b - t, t])


def miso_pmf_enumeration(
    config: MisoConfig,
    duties_user1: list[float],
    duties_user2: list[float],
    step: float = 1e-3,
) -> float:
    """Best joint mutual information over every PMF pair with the given marginals.

    Supports one or two antennas per user, where the feasible set given
    marginals is at most one-dimensional per user.
    """
    if len(config.peaks_user1) > 2 or len(config.peaks_user2) > 2:
        raise ValueError("enumeration supports at most two antennas per user")
    if len(duties_user1) != len(config.peaks_user1) or len(duties_user2) != len(
        config.peaks_user2
    ):
        raise ValueError("one duty per antenna is required")
    q1 = _marginal_family(duties_user1, step)
    q2 = _marginal_family(duties_user2, step)
    rates = (
        subset_rates(config.peaks_user1)[:, None]
        + subset_rates(config.peaks_user2)[None, :]
        + config.lambda0
    )
    hits = -np.expm1(-rates * config.tau)
    ph = q1 @ hits @ q2.T
    mix = q1 @ _entropy_arr(hits) @ q2.T
    return float(np.max(_entropy_arr(ph) - mix))
