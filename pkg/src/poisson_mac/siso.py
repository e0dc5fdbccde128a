"""
Exact sum-rate solver for the two-user single-antenna channel.

The per-slot objective I(mu1, mu2) is smooth but not concave, so the optimum
is found by enumerating the stationary candidates of the box-constrained
problem:

* interior stationary points have both partials zero.  Eliminating the common
  log-odds factor between the two partial-derivative equations leaves an
  affine relation mu1*u - mu2*v + w = 0 (curve ``f``); the second partial
  alone solves to a closed form mu2 = g(mu1) that is strictly convex whenever
  tau <= ln2/(a1+a2+lambda0).  An affine curve meets a strictly convex one at
  most twice, so one golden-section pass locating the minimum of g - f plus a
  bisection on each side finds every interior candidate.
* the two edge candidates put one user at its closed-form solo duty cycle and
  silence the other.

The best of the at-most-four candidates is the capacity.  Out of the stated
regime the convexity guarantee lapses; the solver still runs but flags the
report and cross-checks against a brute-force grid, keeping the larger value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from .channel import (
    ChannelParams,
    DutyPair,
    HitProbs,
    binary_entropy,
    hit_prob,
    hit_probs,
    _grad,
    _mutual_info,
)

__all__ = [
    "Strategy",
    "Scenario",
    "LineCoefficients",
    "Candidate",
    "SufficiencyRecord",
    "IntersectionSearch",
    "SolveReport",
    "uvw",
    "f_mac",
    "g_mac",
    "find_intersections",
    "single_user_duty",
    "sufficiency_tests",
    "solve",
    "sweep_strategy_region",
    "regime_fraction_rule",
]

TIE_TOL = 1e-12


class Strategy(Enum):
    """Which users transmit at the optimum."""

    ONLY_USER1 = "OnlyUser1"
    ONLY_USER2 = "OnlyUser2"
    BOTH_ACTIVE = "BothActive"


class Scenario(Enum):
    """Origin of a candidate: first/second interior stationary point or an edge."""

    BOTH_ACTIVE_1 = "BothActive1"
    BOTH_ACTIVE_2 = "BothActive2"
    ONLY_USER1 = "OnlyUser1"
    ONLY_USER2 = "OnlyUser2"


_STRATEGY_OF_SCENARIO = {
    Scenario.BOTH_ACTIVE_1: Strategy.BOTH_ACTIVE,
    Scenario.BOTH_ACTIVE_2: Strategy.BOTH_ACTIVE,
    Scenario.ONLY_USER1: Strategy.ONLY_USER1,
    Scenario.ONLY_USER2: Strategy.ONLY_USER2,
}

# Deterministic tie-break: prefer both-active, then user 2, then user 1.
_TIE_RANK = {
    Strategy.BOTH_ACTIVE: 0,
    Strategy.ONLY_USER2: 1,
    Strategy.ONLY_USER1: 2,
}


@dataclass(frozen=True)
class LineCoefficients:
    """Coefficients of the affine stationarity locus mu1*u - mu2*v + w = 0.

    Signs follow the chord-difference forms, which make u and v positive for
    every channel and give w the sign of a2 - a1.
    """

    u: float
    v: float
    w: float


@dataclass(frozen=True)
class Candidate:
    """One evaluated optimum candidate.  Interior points that fall outside the
    unit square are recorded as the conventional placeholder (0, 0) with
    valid=False and rate 0."""

    duty: DutyPair
    scenario: Scenario
    rate: float
    valid: bool


@dataclass(frozen=True)
class SufficiencyRecord:
    """Outcomes of the cheap strategy screens.

    single_user_sufficient: g stays below f across [0, 1], so no interior
        stationary point exists and a single user is optimal.
    adding_user2_helps: the objective increases in mu2 at the solo-user-1
        optimum, so silencing user 2 is not optimal.
    adding_user1_helps: symmetric screen at the solo-user-2 optimum.
    """

    single_user_sufficient: bool
    adding_user2_helps: bool
    adding_user1_helps: bool


@dataclass(frozen=True)
class IntersectionSearch:
    """Roots of g - f on [0, 1].  points carry the in-box stationary pairs;
    rejected carries roots whose mu2 coordinate left the unit interval.
    reliable is False out of regime, where g may fail to be convex."""

    points: tuple[DutyPair, ...]
    rejected: tuple[DutyPair, ...]
    reliable: bool


@dataclass(frozen=True)
class SolveReport:
    capacity: float
    optimum: DutyPair
    strategy: Strategy
    candidates: tuple[Candidate, ...]
    near_ties: tuple[Candidate, ...]
    regime_ok: bool
    # None only for saturated out-of-regime channels where the screens'
    # curve algebra is undefined.
    sufficiency: SufficiencyRecord | None
    grid_checked: bool = False


def uvw(params: ChannelParams) -> LineCoefficients:
    """Line coefficients of the both-active stationarity locus."""
    hp = hit_probs(params)
    return _uvw(hp)


def _uvw(hp: HitProbs) -> LineCoefficients:
    h1, h2, h3, h4 = hp.entropies()
    u = (hp.p1 - hp.p2) * (h3 - h4) - (hp.p3 - hp.p4) * (h1 - h2)
    v = (hp.p1 - hp.p3) * (h2 - h4) - (hp.p2 - hp.p4) * (h1 - h3)
    w = (hp.p2 - hp.p4) * (h3 - h4) - (hp.p3 - hp.p4) * (h2 - h4)
    return LineCoefficients(u=u, v=v, w=w)


def f_mac(params: ChannelParams, mu1: float) -> float:
    """mu2 on the affine stationarity line at the given mu1."""
    line = uvw(params)
    return (line.u / line.v) * mu1 + line.w / line.v


def g_mac(params: ChannelParams, mu1: float) -> float:
    """mu2 solving d I/d mu2 = 0 at the given mu1; strictly convex in regime."""
    return _g_of(hit_probs(params))(mu1)


def _f_of(hp: HitProbs) -> Callable[[float], float]:
    line = _uvw(hp)
    slope = line.u / line.v
    intercept = line.w / line.v
    return lambda mu1: slope * mu1 + intercept


def _g_of(hp: HitProbs) -> Callable[[float], float]:
    h1, h2, h3, h4 = hp.entropies()
    dp_13, dp_24 = hp.p1 - hp.p3, hp.p2 - hp.p4
    dh_13, dh_24 = h1 - h3, h2 - h4
    p3, p4 = hp.p3, hp.p4

    def g(mu1: float) -> float:
        den = mu1 * dp_13 + (1.0 - mu1) * dp_24
        # Exponent capped: far out of regime the hit levels saturate and the
        # chord ratio can exceed the double-precision exp range.
        a_m = math.exp(min((mu1 * dh_13 + (1.0 - mu1) * dh_24) / den, 700.0))
        return (1.0 / (a_m + 1.0) - (mu1 * p3 + (1.0 - mu1) * p4)) / den

    return g


_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(fn: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Abscissa of the minimum of a strictly unimodal function on [lo, hi]."""
    a, b = lo, hi
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def _bisect_root(fn: Callable[[float], float], lo: float, hi: float) -> float:
    """Root of a continuous function with fn(lo) >= 0 >= fn(hi) (or reversed)."""
    flo = fn(lo)
    if flo == 0.0:
        return lo
    sign_lo = flo > 0.0
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == sign_lo:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16:
            break
    return 0.5 * (lo + hi)


def find_intersections(params: ChannelParams) -> IntersectionSearch:
    """All stationary pairs where the affine and convex curves meet on [0, 1].

    Exploits strict convexity of g - f: golden-section locates its minimum,
    then one bisection per side recovers each sign change.  Out of regime the
    search still runs but the result is flagged unreliable.
    """
    hp = hit_probs(params)
    f, g = _f_of(hp), _g_of(hp)

    def d(mu1: float) -> float:
        return g(mu1) - f(mu1)

    m_star = _golden_min(d, 0.0, 1.0, 1e-14)
    roots: list[float] = []
    if d(m_star) <= 0.0:
        if d(0.0) >= 0.0:
            roots.append(_bisect_root(d, 0.0, m_star))
        if d(1.0) >= 0.0:
            roots.append(_bisect_root(d, m_star, 1.0))
    if len(roots) == 2 and abs(roots[0] - roots[1]) < 1e-9:
        roots = roots[:1]

    points: list[DutyPair] = []
    rejected: list[DutyPair] = []
    for r in roots:
        mu2 = g(r)
        if -1e-12 <= mu2 <= 1.0 + 1e-12:
            points.append(DutyPair(min(max(r, 0.0), 1.0), min(max(mu2, 0.0), 1.0)))
        else:
            rejected.append(DutyPair(min(max(r, 0.0), 1.0), min(max(mu2, 0.0), 1.0)))
    return IntersectionSearch(
        points=tuple(points), rejected=tuple(rejected), reliable=params.in_regime
    )


def single_user_duty(a: float, lambda0: float, tau: float) -> float:
    """Closed-form optimal duty cycle when one user at peak rate a transmits alone."""
    p_on = hit_prob(a + lambda0, tau)
    p_off = hit_prob(lambda0, tau)
    chord = (binary_entropy(p_on) - binary_entropy(p_off)) / (p_on - p_off)
    return (1.0 / (1.0 + math.exp(min(chord, 700.0))) - p_off) / (p_on - p_off)


def sufficiency_tests(params: ChannelParams) -> SufficiencyRecord:
    """Screens that settle the transmission strategy without the full solve."""
    hp = hit_probs(params)
    f, g = _f_of(hp), _g_of(hp)
    mu1_solo = single_user_duty(params.a1, params.lambda0, params.tau)
    mu2_solo = single_user_duty(params.a2, params.lambda0, params.tau)
    return SufficiencyRecord(
        single_user_sufficient=g(0.0) < f(0.0) and g(1.0) < f(1.0),
        adding_user2_helps=_grad(hp, mu1_solo, 0.0)[1] > 0.0,
        adding_user1_helps=_grad(hp, 0.0, mu2_solo)[0] > 0.0,
    )


def _classify_grid_point(duty: DutyPair, step: float) -> Strategy:
    if duty.mu1 <= 0.5 * step:
        return Strategy.ONLY_USER2
    if duty.mu2 <= 0.5 * step:
        return Strategy.ONLY_USER1
    return Strategy.BOTH_ACTIVE


def solve(params: ChannelParams) -> SolveReport:
    """Sum-rate capacity with the optimal duty pair and strategy.

    In regime the enumeration is exact.  Out of regime the report carries
    regime_ok=False and the result of a step-1e-3 grid cross-check, keeping
    whichever value is larger.
    """
    hp = hit_probs(params)
    try:
        inter = find_intersections(params)
    except (ArithmeticError, ValueError):
        # Saturated hit levels break the curve algebra; that only happens far
        # out of regime, where the grid cross-check below carries the result.
        if params.in_regime:
            raise
        inter = IntersectionSearch(points=(), rejected=(), reliable=False)

    candidates: list[Candidate] = []
    both_scen = (Scenario.BOTH_ACTIVE_1, Scenario.BOTH_ACTIVE_2)
    for slot in range(2):
        if slot < len(inter.points):
            pt = inter.points[slot]
            rate = _mutual_info(hp, pt.mu1, pt.mu2) / params.tau
            candidates.append(Candidate(pt, both_scen[slot], rate, valid=True))
        else:
            candidates.append(
                Candidate(DutyPair(0.0, 0.0), both_scen[slot], 0.0, valid=False)
            )
    mu1_solo = single_user_duty(params.a1, params.lambda0, params.tau)
    mu2_solo = single_user_duty(params.a2, params.lambda0, params.tau)
    candidates.append(
        Candidate(
            DutyPair(mu1_solo, 0.0),
            Scenario.ONLY_USER1,
            _mutual_info(hp, mu1_solo, 0.0) / params.tau,
            valid=True,
        )
    )
    candidates.append(
        Candidate(
            DutyPair(0.0, mu2_solo),
            Scenario.ONLY_USER2,
            _mutual_info(hp, 0.0, mu2_solo) / params.tau,
            valid=True,
        )
    )

    best_rate = max(c.rate for c in candidates)
    near = [c for c in candidates if c.valid and best_rate - c.rate <= TIE_TOL]
    winner = min(near, key=lambda c: _TIE_RANK[_STRATEGY_OF_SCENARIO[c.scenario]])

    capacity = winner.rate
    optimum = winner.duty
    strategy = _STRATEGY_OF_SCENARIO[winner.scenario]
    grid_checked = False

    if not params.in_regime:
        # Convexity of g may fail here, so the enumeration can miss the
        # optimum; fall back on a brute-force pass and keep the larger value.
        from .gridsearch import GridSpec, grid_capacity

        grid = grid_capacity(params, GridSpec(step=1e-3, refine_rounds=0))
        grid_checked = True
        if grid.capacity > capacity:
            capacity = grid.capacity
            optimum = grid.duty
            strategy = _classify_grid_point(grid.duty, 1e-3)

    try:
        sufficiency = sufficiency_tests(params)
    except (ArithmeticError, ValueError):
        if params.in_regime:
            raise
        sufficiency = None

    return SolveReport(
        capacity=capacity,
        optimum=optimum,
        strategy=strategy,
        candidates=tuple(candidates),
        near_ties=tuple(near) if len(near) > 1 else (),
        regime_ok=params.in_regime,
        sufficiency=sufficiency,
        grid_checked=grid_checked,
    )


def regime_fraction_rule(fraction: float, lambda0: float) -> Callable[[float, float], float]:
    """Dead-time rule tau = fraction * ln2 / (a1 + a2 + lambda0), always in regime
    for fraction <= 1."""

    def rule(a1: float, a2: float) -> float:
        return fraction * math.log(2.0) / (a1 + a2 + lambda0)

    return rule


def sweep_strategy_region(
    a1_grid: Sequence[float],
    a2_grid: Sequence[float],
    lambda0: float,
    tau_rule: float | Callable[[float, float], float],
    max_workers: int | None = None,
) -> list[list[Strategy]]:
    """Optimal-strategy label for every (a1, a2) cell.

    tau_rule is either a fixed dead time or a callable (a1, a2) -> tau.
    Cells are independent; with max_workers > 1 rows are dispatched to a
    thread pool.
    """
    if callable(tau_rule):
        rule = tau_rule
    else:
        fixed = float(tau_rule)
        rule = lambda a1, a2: fixed

    def solve_row(a1: float) -> list[Strategy]:
        return [
            solve(ChannelParams(a1, a2, lambda0, rule(a1, a2))).strategy
            for a2 in a2_grid
        ]

    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(solve_row, a1_grid))
    return [solve_row(a1) for a1 in a1_grid]
