"""KL-distance error exponents for one-way and interactive fusion.

The exponent of the optimal large-sample test equals the per-sample KL
distance of the final-stage input.  For the one-way process that input is
(x, v) with v a single threshold bit from Y; binarizing y contributes the
Bernoulli divergence f(alpha, beta) on top of K[x] = 1/(2 sigma_x^2).  The
interactive process adds a first bit from X that, at the optimum, Y simply
ignores; the maximizers here make that degeneracy numerically observable
instead of assuming it.

All divergences are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .gaussian import GaussianModel, _check_threshold, q_tail, tail_prob

GOLDEN_XTOL = 1e-8
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def bern_kl(alpha: float, beta: float) -> float:
    """D(Bern(alpha) || Bern(beta)) = a log(a/b) + (1-a) log((1-a)/(1-b)).

    Uses the 0 log 0 = 0 convention.  beta in {0, 1} with mismatched alpha
    yields +inf (an event impossible under the reference measure), not an
    exception.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta!r}")
    if alpha == beta:
        return 0.0
    if alpha > 0.0:
        if beta == 0.0:
            return math.inf
        head = alpha * math.log(alpha / beta)
    else:
        head = 0.0
    if alpha < 1.0:
        if beta == 1.0:
            return math.inf
        tail = (1.0 - alpha) * math.log((1.0 - alpha) / (1.0 - beta))
    else:
        tail = 0.0
    return max(0.0, head + tail)


def _bern_kl_grid(alpha, beta):
    """Vectorized bern_kl for grid sweeps (rel_entr carries the conventions)."""
    return special.rel_entr(alpha, beta) + special.rel_entr(1.0 - alpha, 1.0 - beta)


@dataclass(frozen=True)
class KlResult:
    """A KL distance with the Y-side threshold and bit statistics behind it.

    k_x is the continuous-observation term 1/(2 sigma_x^2); alpha_star and
    beta_star are P_0 and P_1 of the region {y > t_star}.  For maximizer
    output, t_star additionally satisfies the threshold/level coupling
    t = sigma_y^2 log(lambda(t)) + 1/2 and local_maxima lists every
    grid-detected local optimum (no uniqueness is asserted).
    """

    k_total: float
    k_x: float
    t_star: float
    alpha_star: float
    beta_star: float
    local_maxima: tuple[float, ...] = field(default=())


def kl_yx(model: GaussianModel, t) -> KlResult:
    """KL distance of (x, v) when Y thresholds at t: K[x] + f(P0(y>t), P1(y>t))."""
    t = _check_threshold("t", t)
    k_x = 0.5 / (model.sigma_x * model.sigma_x)
    a = tail_prob(model, t, 0, "y")
    b = tail_prob(model, t, 1, "y")
    return KlResult(k_total=k_x + bern_kl(a, b), k_x=k_x, t_star=t, alpha_star=a, beta_star=b)


def yx_kl_lambda(model: GaussianModel, t: float) -> float:
    """LR level lambda(t) the optimal Y rule is coupled to.

    lambda(t) = log[b(1-a) / (a(1-b))] / [(b - a) / (b(1-b))] with
    a = P_0(y > t), b = P_1(y > t).  The optimal threshold solves
    t = sigma_y^2 log(lambda(t)) + 1/2.
    """
    a = tail_prob(model, t, 0, "y")
    b = tail_prob(model, t, 1, "y")
    if not (0.0 < a < 1.0 and 0.0 < b < 1.0):
        raise ValueError("lambda(t) is undefined at degenerate bit statistics")
    num = math.log(b * (1.0 - a) / (a * (1.0 - b)))
    den = (b - a) / (b * (1.0 - b))
    return num / den


def _golden_max(f, lo: float, hi: float, xtol: float = GOLDEN_XTOL):
    """Golden-section maximization of a unimodal f on [lo, hi]."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = c if fc >= fd else d
    return x, max(fc, fd)


def _y_profile_grid(sigma_y: float, points: int = 2001):
    """Bit-divergence profile f(P0(y>t), P1(y>t)) over the standard search box."""
    ts = np.linspace(-3.0 * sigma_y, 3.0 * sigma_y + 1.0, points)
    vals = _bern_kl_grid(q_tail(ts / sigma_y), q_tail((ts - 1.0) / sigma_y))
    return ts, vals


def _maximize_y_profile(sigma_y: float, points: int = 2001):
    """All refined local maxima of the bit-divergence profile; best first."""
    ts, vals = _y_profile_grid(sigma_y, points)

    def f(t):
        return bern_kl(q_tail(t / sigma_y), q_tail((t - 1.0) / sigma_y))

    interior = np.flatnonzero(
        (vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:])
    ) + 1
    candidates = []
    for i in interior:
        t_ref, v_ref = _golden_max(f, ts[i - 1], ts[i + 1])
        if not any(abs(t_ref - t_prev) <= 1e-6 for t_prev, _ in candidates):
            candidates.append((t_ref, v_ref))
    if not candidates:
        i = int(np.argmax(vals))
        candidates.append((float(ts[i]), float(vals[i])))
    candidates.sort(key=lambda tv: -tv[1])
    return candidates


def maximize_kl_yx(model: GaussianModel, points: int = 2001) -> KlResult:
    """Maximize the one-way KL distance over Y's threshold.

    1-D grid over [-3 sigma_y, 3 sigma_y + 1] followed by golden-section
    refinement of every grid-local maximum; the argmax depends on sigma_y
    only (the K[x] term is additive).
    """
    candidates = _maximize_y_profile(model.sigma_y, points)
    t_star, f_star = candidates[0]
    k_x = 0.5 / (model.sigma_x * model.sigma_x)
    return KlResult(
        k_total=k_x + f_star,
        k_x=k_x,
        t_star=t_star,
        alpha_star=tail_prob(model, t_star, 0, "y"),
        beta_star=tail_prob(model, t_star, 1, "y"),
        local_maxima=tuple(t for t, _ in candidates),
    )


@dataclass(frozen=True)
class XyxKlDesign:
    """Interactive first/second-stage design with its bit statistics.

    alpha1 = P_0({x > t_u}); alpha2[u] / beta2[u] are P_0 / P_1 of
    {y > t_v[u]}.  The statistics are stored explicitly so the degeneracy of
    t_u in the KL objective stays observable.
    """

    t_u: float
    t_v: tuple[float, float]
    alpha1: float
    alpha2: tuple[float, float]
    beta2: tuple[float, float]


def xyx_kl_design(model: GaussianModel, t_u, t_v) -> XyxKlDesign:
    """Build a consistent XyxKlDesign from raw thresholds."""
    t_u = _check_threshold("t_u", t_u)
    t_v = (_check_threshold("t_v[0]", t_v[0]), _check_threshold("t_v[1]", t_v[1]))
    return XyxKlDesign(
        t_u=t_u,
        t_v=t_v,
        alpha1=tail_prob(model, t_u, 0, "x"),
        alpha2=tuple(tail_prob(model, t, 0, "y") for t in t_v),
        beta2=tuple(tail_prob(model, t, 1, "y") for t in t_v),
    )


def kl_xyx(model: GaussianModel, design: XyxKlDesign) -> float:
    """Interactive KL distance
    K[x] + alpha1 f(alpha2[1], beta2[1]) + (1 - alpha1) f(alpha2[0], beta2[0]).

    The design must be internally consistent (bit statistics matching its
    thresholds to 1e-12).
    """
    ref = xyx_kl_design(model, design.t_u, design.t_v)
    for name in ("alpha1", "alpha2", "beta2"):
        got = np.asarray(getattr(design, name), dtype=float)
        want = np.asarray(getattr(ref, name), dtype=float)
        if np.any(np.abs(got - want) > 1e-12):
            raise ValueError(f"inconsistent design: {name}={got} does not match thresholds ({want})")
    k_x = 0.5 / (model.sigma_x * model.sigma_x)
    return (
        k_x
        + design.alpha1 * bern_kl(design.alpha2[1], design.beta2[1])
        + (1.0 - design.alpha1) * bern_kl(design.alpha2[0], design.beta2[0])
    )


def maximize_kl_xyx(
    model: GaussianModel, u_points: int = 41, y_points: int = 401
) -> tuple[XyxKlDesign, float]:
    """Maximize the interactive KL distance over (t_u, t_v[0], t_v[1]).

    Direct 3-D grid (ties broken toward the lexicographically first
    threshold tuple) plus per-coordinate golden refinement; no degeneracy of
    the first bit is assumed.
    """
    sx, sy = model.sigma_x, model.sigma_y
    k_x = 0.5 / (sx * sx)
    tus = np.linspace(-3.0 * sx, 3.0 * sx + 1.0, u_points)
    tvs, prof = _y_profile_grid(sy, y_points)
    a1 = q_tail(tus / sx)
    # value[i, j, k] = k_x + a1_i * prof_k + (1 - a1_i) * prof_j
    value = k_x + a1[:, None, None] * prof[None, None, :] + (1.0 - a1)[:, None, None] * prof[None, :, None]
    i, j, k = np.unravel_index(int(np.argmax(value)), value.shape)
    t_u, tv0, tv1 = float(tus[i]), float(tvs[j]), float(tvs[k])

    def value_at(t_u, tv0, tv1):
        a = q_tail(t_u / sx)
        return (
            k_x
            + a * bern_kl(q_tail(tv1 / sy), q_tail((tv1 - 1.0) / sy))
            + (1.0 - a) * bern_kl(q_tail(tv0 / sy), q_tail((tv0 - 1.0) / sy))
        )

    du = tus[1] - tus[0] if u_points > 1 else 1.0
    dv = tvs[1] - tvs[0] if y_points > 1 else 1.0
    for _ in range(2):
        tv0, _ = _golden_max(lambda t: value_at(t_u, t, tv1), tv0 - dv, tv0 + dv)
        tv1, _ = _golden_max(lambda t: value_at(t_u, tv0, t), tv1 - dv, tv1 + dv)
        t_u, _ = _golden_max(lambda t: value_at(t, tv0, tv1), t_u - du, t_u + du)
    design = xyx_kl_design(model, t_u, (tv0, tv1))
    return design, value_at(t_u, tv0, tv1)


@dataclass(frozen=True)
class DirectionSwap:
    """Maximized one-way KL for both choices of the final-decision sensor."""

    k_final_at_x: KlResult
    k_final_at_y: KlResult


def kl_direction_swap(model: GaussianModel) -> DirectionSwap:
    """Compare finishing at X (YX process) with finishing at Y (XY process).

    The XY value is the YX computation on the role-swapped model; for equal
    noise scales the two coincide, otherwise the sensor with the smaller
    noise wins the final-decision seat.
    """
    return DirectionSwap(
        k_final_at_x=maximize_kl_yx(model),
        k_final_at_y=maximize_kl_yx(model.swapped()),
    )
