"""Gaussian unit-shift observation model and its region probabilities.

Two sensors observe a common scalar signal in independent Gaussian noise,

    x = s + z1,   y = s + z2,   z1 ~ N(0, sigma_x^2),  z2 ~ N(0, sigma_y^2),

with s = 0 under H0 and s = 1 under H1.  Every fusion architecture in this
package reduces to Gaussian tail probabilities of threshold regions, so the
Q function and the single-region / intersection-region probabilities live
here.

Thresholds are extended reals: +inf denotes a region of probability 0 under
both hypotheses, -inf a region of probability 1.  Both are legal everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import special

Sensor = Literal["x", "y"]

# Q underflows to subnormals well before |z| = 38; clamping there keeps
# degenerate thresholds exactly at 0/1 and guarantees NaN-free arithmetic.
Z_CLAMP = 38.0

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def q_tail(z):
    """Standard normal tail probability P(Z > z) = erfc(z / sqrt(2)) / 2.

    Accepts a float (including +-inf) or a numpy array.  Strictly decreasing
    on [-38, 38]; clamped to exactly 0 / 1 outside.
    """
    if isinstance(z, np.ndarray):
        out = 0.5 * special.erfc(z / _SQRT2)
        out = np.where(z > Z_CLAMP, 0.0, out)
        out = np.where(z < -Z_CLAMP, 1.0, out)
        return out
    z = float(z)
    if math.isnan(z):
        raise ValueError("q_tail: z is NaN")
    if z > Z_CLAMP:
        return 0.0
    if z < -Z_CLAMP:
        return 1.0
    return 0.5 * math.erfc(z / _SQRT2)


def q_inv(p):
    """Inverse tail: the z with q_tail(z) = p.  q_inv(0) = +inf, q_inv(1) = -inf."""
    if isinstance(p, np.ndarray):
        return _SQRT2 * special.erfcinv(2.0 * p)
    return _SQRT2 * float(special.erfcinv(2.0 * p))


def normal_pdf(x, mean, sigma):
    """Density of N(mean, sigma^2); exact 0 at x = +-inf."""
    z = (np.asarray(x, dtype=float) - mean) / sigma
    return np.exp(-0.5 * z * z) / (sigma * _SQRT2PI)


def _check_hyp(hyp):
    if hyp not in (0, 1):
        raise ValueError(f"hypothesis index must be 0 or 1, got {hyp!r}")


def _check_threshold(name, t):
    t = float(t)
    if math.isnan(t):
        raise ValueError(f"{name} must not be NaN")
    return t


@dataclass(frozen=True)
class GaussianModel:
    """Per-sensor noise scales for the unit-mean-shift test.

    The shift mu1 - mu0 = 1 is hard-coded; an arbitrary shift m is handled
    by rescaling sigma -> sigma / m outside the library.
    """

    sigma_x: float
    sigma_y: float

    def __post_init__(self):
        for name in ("sigma_x", "sigma_y"):
            s = getattr(self, name)
            if not isinstance(s, (int, float)) or isinstance(s, bool):
                raise ValueError(f"{name} must be a real number, got {s!r}")
            if not (math.isfinite(s) and s > 0):
                raise ValueError(f"{name} must be positive and finite, got {s!r}")

    def sigma(self, sensor: Sensor) -> float:
        if sensor == "x":
            return self.sigma_x
        if sensor == "y":
            return self.sigma_y
        raise ValueError(f"sensor must be 'x' or 'y', got {sensor!r}")

    def swapped(self) -> "GaussianModel":
        """Role-swapped problem (used for XY / YXY direction comparisons)."""
        return GaussianModel(sigma_x=self.sigma_y, sigma_y=self.sigma_x)


def tail_prob(model: GaussianModel, t, hyp, sensor: Sensor) -> float:
    """P_i({obs > t}) = Q((t - i) / sigma) for the chosen sensor.

    Equals 1 at t = -inf and 0 at t = +inf under both hypotheses.
    """
    _check_hyp(hyp)
    t = _check_threshold("threshold", t)
    return q_tail((t - hyp) / model.sigma(sensor))


def llr(model: GaussianModel, obs, sensor: Sensor) -> float:
    """Log-likelihood ratio log(p1(obs)/p0(obs)) = (obs - 1/2) / sigma^2."""
    obs = float(obs)
    if not math.isfinite(obs):
        raise ValueError(f"observation must be finite, got {obs!r}")
    s = model.sigma(sensor)
    return (obs - 0.5) / (s * s)


def lrt_threshold(lam: float, sigma: float) -> float:
    """Observation cut equivalent to the LRT p1/p0 > lam: t = sigma^2 log(lam) + 1/2."""
    if lam < 0:
        raise ValueError("LRT level must be nonnegative")
    if lam == 0.0:
        return -math.inf
    if math.isinf(lam):
        return math.inf
    return sigma * sigma * math.log(lam) + 0.5


@dataclass(frozen=True)
class YxThresholds:
    """One-way tandem design: Y's cut t_v, X's per-bit cuts t_w[v].

    Ordering convention (monotone likelihood ratio): t_w[1] <= t_w[0].
    """

    t_v: float
    t_w: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "t_v", _check_threshold("t_v", self.t_v))
        object.__setattr__(
            self,
            "t_w",
            (_check_threshold("t_w[0]", self.t_w[0]), _check_threshold("t_w[1]", self.t_w[1])),
        )
        if not self.t_w[1] <= self.t_w[0]:
            raise ValueError(
                f"ordering violation: t_w[1] <= t_w[0] required, "
                f"got t_w[1]={self.t_w[1]!r} > t_w[0]={self.t_w[0]!r}"
            )


@dataclass(frozen=True)
class XyxThresholds:
    """Interactive design: X's first cut t_u, Y's per-u cuts t_v[u], X's final
    cuts t_w[v][u] applied on the slice the first bit selects.

    Ordering convention (equality allowed):
        t_w[1][u] <= t_w[0][u],   t_w[v][0] <= t_w[v][1],   t_v[1] <= t_v[0].
    """

    t_u: float
    t_v: tuple[float, float]
    t_w: tuple[tuple[float, float], tuple[float, float]]

    def __post_init__(self):
        object.__setattr__(self, "t_u", _check_threshold("t_u", self.t_u))
        object.__setattr__(
            self,
            "t_v",
            (_check_threshold("t_v[0]", self.t_v[0]), _check_threshold("t_v[1]", self.t_v[1])),
        )
        tw = tuple(
            tuple(_check_threshold(f"t_w[{v}][{u}]", self.t_w[v][u]) for u in (0, 1))
            for v in (0, 1)
        )
        object.__setattr__(self, "t_w", tw)
        if not self.t_v[1] <= self.t_v[0]:
            raise ValueError(
                f"ordering violation: t_v[1] <= t_v[0] required, "
                f"got t_v[1]={self.t_v[1]!r} > t_v[0]={self.t_v[0]!r}"
            )
        for u in (0, 1):
            if not tw[1][u] <= tw[0][u]:
                raise ValueError(
                    f"ordering violation: t_w[1][{u}] <= t_w[0][{u}] required, "
                    f"got {tw[1][u]!r} > {tw[0][u]!r}"
                )
        for v in (0, 1):
            if not tw[v][0] <= tw[v][1]:
                raise ValueError(
                    f"ordering violation: t_w[{v}][0] <= t_w[{v}][1] required, "
                    f"got {tw[v][0]!r} > {tw[v][1]!r}"
                )


def xyx_joint_probs(model: GaussianModel, thr: XyxThresholds, hyp) -> np.ndarray:
    """Joint probabilities P_i(R_{w|v} ∩ R_u) of the interactive final rule.

    The final decision applies the (v, u)-indexed cut on the slice selected
    by the first bit: on {x > t_u} the cut is t_w[v][1], on the complement
    t_w[v][0].  Entries come out of Q via max(t, t') interval expressions.

    Returns an array indexed [w, v, u].  For each fixed v the four (w, u)
    entries sum to 1.
    """
    _check_hyp(hyp)
    sx = model.sigma_x

    def qx(t):
        return q_tail((t - hyp) / sx)

    p_u1 = qx(thr.t_u)
    out = np.empty((2, 2, 2), dtype=float)
    for v in (0, 1):
        hi = qx(max(thr.t_u, thr.t_w[v][1]))
        lo = qx(thr.t_w[v][0]) - qx(max(thr.t_w[v][0], thr.t_u))
        out[1, v, 1] = hi
        out[0, v, 1] = p_u1 - hi
        out[1, v, 0] = lo
        out[0, v, 0] = (1.0 - p_u1) - lo
    return np.clip(out, 0.0, 1.0)
