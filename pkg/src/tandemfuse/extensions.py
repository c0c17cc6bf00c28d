"""Desk-scale generalizations: multi-step memoryless interaction and K sensors.

Memoryless interactive fusion (MIF) alternates single-bit exchanges
x, y, x, ..., x; each step sees only its own observation and the previous
bit.  The KL distance of the final step's input (x, last bit) is evaluated
by exact summation over bit histories and quadrature over x; a structured
search then checks numerically that extra rounds buy nothing over the
one-way exponent.

The multi-sensor variants replace Y with K independent peripheral sensors;
conditional independence turns every probability into a per-sensor product.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .asymptotic import _golden_max, _maximize_y_profile, bern_kl, maximize_kl_yx
from .fixed_sample import OperatingPoint
from .gaussian import GaussianModel, _check_threshold, normal_pdf, q_tail

MAX_MIF_STEPS = 7
MAX_SENSORS = 3


@dataclass(frozen=True)
class MifDesign:
    """Per-step threshold tables of an N-step memoryless exchange.

    steps[k-1] is step k's table: step 1 (at X, no incoming bit) holds one
    cut; every later step holds a pair indexed by the previous bit.  Odd
    steps cut x, even steps cut y.  The final step's table only matters for
    simulating (pf, pd); the KL distance of the final-step input ignores it.
    """

    n_steps: int
    steps: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        n = self.n_steps
        if n % 2 == 0 or n < 3:
            raise ValueError(f"n_steps must be an odd integer >= 3, got {n!r}")
        if len(self.steps) != n:
            raise ValueError(f"expected {n} step tables, got {len(self.steps)}")
        packed = []
        for k, table in enumerate(self.steps, start=1):
            want = 1 if k == 1 else 2
            if len(table) != want:
                raise ValueError(f"step {k} table must hold {want} threshold(s), got {len(table)}")
            packed.append(tuple(_check_threshold(f"step {k}", t) for t in table))
        object.__setattr__(self, "steps", tuple(packed))


def _x_step_indices(n_steps):
    """1-based indices of the X steps feeding the final-step KL (1, 3, ..., N-2)."""
    return range(1, n_steps - 1, 2)


def _mif_cells(design: MifDesign):
    """Cell edges cut by every x threshold the pre-final steps use."""
    cuts = set()
    for k in _x_step_indices(design.n_steps):
        cuts.update(t for t in design.steps[k - 1] if math.isfinite(t))
    edges = [-math.inf, *sorted(cuts), math.inf]
    return edges


def _cell_point(lo, hi):
    if math.isinf(lo) and math.isinf(hi):
        return 0.0
    if math.isinf(lo):
        return hi - 1.0
    if math.isinf(hi):
        return lo + 1.0
    return 0.5 * (lo + hi)


def _mif_tables(model: GaussianModel, design: MifDesign):
    """Final-bit distributions p_i(u_{N-1} = b | x in cell).

    Within a cell every X decision is constant, so each Y-bit pattern pins an
    interval of y whose probability is exact in Q; summing patterns by their
    final bit gives the (piecewise-constant) conditional laws.
    """
    n = design.n_steps
    sy = model.sigma_y
    edges = _mif_cells(design)
    n_cells = len(edges) - 1
    n_ybits = (n - 1) // 2
    q = np.zeros((2, n_cells, 2))
    for c in range(n_cells):
        xm = _cell_point(edges[c], edges[c + 1])
        for pattern in range(1 << n_ybits):
            prev = 0
            ylo, yhi = -math.inf, math.inf
            for k in range(1, n):
                table = design.steps[k - 1]
                if k % 2 == 1:
                    cut = table[0] if k == 1 else table[prev]
                    prev = 1 if xm > cut else 0
                else:
                    cut = table[prev]
                    bit = (pattern >> (k // 2 - 1)) & 1
                    if bit:
                        ylo = max(ylo, cut)
                    else:
                        yhi = min(yhi, cut)
                    prev = bit
            if ylo < yhi:
                for i in (0, 1):
                    q[i, c, prev] += q_tail((ylo - i) / sy) - q_tail((yhi - i) / sy)
    return edges, q


def _cell_bit_kl(q, c):
    """sum_b p0(b|cell) log(p0(b|cell)/p1(b|cell)); empty bits contribute 0."""
    return float(
        special.rel_entr(q[0, c, 0], q[1, c, 0]) + special.rel_entr(q[0, c, 1], q[1, c, 1])
    )


def _check_mif_scale(n_steps):
    if n_steps > MAX_MIF_STEPS:
        raise ValueError(
            f"n_steps={n_steps} exceeds the desk-scale cap of {MAX_MIF_STEPS} "
            f"(bit histories grow exponentially)"
        )


def mif_kl(model: GaussianModel, design: MifDesign) -> float:
    """KL distance of the final step's input (x, u_{N-1}).

    Adaptive quadrature over x per cell (absolute tolerance 1e-10) on top of
    the exact bit-history sums; the integrand is smooth inside each cell.
    """
    _check_mif_scale(design.n_steps)
    edges, q = _mif_tables(model, design)
    sx = model.sigma_x
    sx2 = sx * sx
    total = 0.0
    for c in range(len(edges) - 1):
        const = _cell_bit_kl(q, c)

        def integrand(x, const=const):
            return normal_pdf(x, 0.0, sx) * ((0.5 - x) / sx2 + const)

        val, _ = integrate.quad(
            integrand, edges[c], edges[c + 1], epsabs=1e-10, epsrel=1e-11, limit=200
        )
        total += val
    return max(0.0, total)


def _mif_kl_fast(model: GaussianModel, design: MifDesign) -> float:
    """Closed-form evaluation of the same quantity (used inside the search;
    agrees with the quadrature route to its tolerance)."""
    edges, q = _mif_tables(model, design)
    sx = model.sigma_x
    sx2 = sx * sx
    total = 0.0
    for c in range(len(edges) - 1):
        lo, hi = edges[c], edges[c + 1]
        p0c = q_tail(lo / sx) - q_tail(hi / sx)
        ex = sx2 * (normal_pdf(lo, 0.0, sx) - normal_pdf(hi, 0.0, sx))
        total += (0.5 * p0c - ex) / sx2 + p0c * _cell_bit_kl(q, c)
    return max(0.0, float(total))


def lift_mif_design(design: MifDesign) -> MifDesign:
    """Embed an N-step design into N+2 steps without changing the final-bit law.

    Prepends an X step that always answers 0 and a vacuous Y step; the former
    first step is duplicated into a pair that ignores the new bit.
    """
    first = design.steps[0]
    lifted = [(math.inf,), (0.5, 0.5), (first[0], first[0])]
    lifted.extend(design.steps[1:])
    return MifDesign(n_steps=design.n_steps + 2, steps=tuple(lifted))


def _mif_cut_candidates(model: GaussianModel, n_steps: int):
    sx = model.sigma_x
    if n_steps >= 7:
        return (-math.inf, 0.5, math.inf)
    return (-math.inf, 0.5 - sx, 0.5, 0.5 + sx, math.inf)


def mif_kl_search(
    model: GaussianModel,
    n_steps: int,
    cut_candidates: tuple[float, ...] | None = None,
    cycles: int = 2,
    extra_starts: tuple[MifDesign, ...] = (),
) -> tuple[float, MifDesign, dict]:
    """Structured maximization of the N-step KL distance.

    X-side steps range over a finite cut set (their regions carry no
    independent thresholds); Y-side steps are refined by golden-section
    coordinate descent.  Returns (value, design, info); the value is the
    quadrature evaluation of the best design found within the budget.
    """
    if n_steps not in (3, 5, 7):
        raise ValueError(f"n_steps must be one of 3, 5, 7, got {n_steps!r}")
    sy = model.sigma_y
    t_star = maximize_kl_yx(model).t_star
    cuts = cut_candidates or _mif_cut_candidates(model, n_steps)
    x_slots = [1] + [2] * ((n_steps - 3) // 2)
    y_steps = list(range(2, n_steps, 2))
    evaluations = 0

    def build(x_assign, y_values):
        steps = []
        xi = yi = 0
        for k in range(1, n_steps + 1):
            if k == n_steps:
                steps.append((0.5, 0.5))
            elif k % 2 == 1:
                width = x_slots[(k - 1) // 2]
                steps.append(tuple(x_assign[xi : xi + width]))
                xi += width
            else:
                steps.append((y_values[2 * yi], y_values[2 * yi + 1]))
                yi += 1
        return MifDesign(n_steps=n_steps, steps=tuple(steps))

    def value(x_assign, y_values):
        nonlocal evaluations
        evaluations += 1
        return _mif_kl_fast(model, build(x_assign, y_values))

    best_val, best_design = -math.inf, None
    n_ydims = 2 * len(y_steps)
    for x_assign in itertools.product(cuts, repeat=sum(x_slots)):
        y_values = [t_star] * n_ydims
        current = value(x_assign, y_values)
        for _ in range(cycles):
            for d in range(n_ydims):
                lo = y_values[d] - 1.5 * sy
                hi = y_values[d] + 1.5 * sy

                def line(t, d=d):
                    probe = list(y_values)
                    probe[d] = t
                    return value(x_assign, probe)

                t_best, v_best = _golden_max(line, lo, hi, xtol=1e-6)
                if v_best > current:
                    y_values[d] = t_best
                    current = v_best
        if current > best_val:
            best_val, best_design = current, build(x_assign, y_values)
    for start in extra_starts:
        if start.n_steps != n_steps:
            raise ValueError("extra start has the wrong number of steps")
        v = _mif_kl_fast(model, start)
        evaluations += 1
        if v > best_val:
            best_val, best_design = v, start
    info = {"evaluations": evaluations, "fast_value": best_val}
    return mif_kl(model, best_design), best_design, info


def mif_kl_max(model: GaussianModel, n_steps: int, **kwargs) -> float:
    """Best N-step KL distance found by the structured search."""
    value, _, _ = mif_kl_search(model, n_steps, **kwargs)
    return value


# ---------------------------------------------------------------------------
# K peripheral sensors


@dataclass(frozen=True)
class MultiSensorModel:
    """Fusion center X plus K independent peripheral sensors Y_1..Y_K."""

    sigma_x: float
    sigma_ys: tuple[float, ...]

    def __post_init__(self):
        if not (
            isinstance(self.sigma_x, (int, float))
            and math.isfinite(self.sigma_x)
            and self.sigma_x > 0
        ):
            raise ValueError(f"sigma_x must be positive and finite, got {self.sigma_x!r}")
        if len(self.sigma_ys) < 1:
            raise ValueError("at least one peripheral sensor is required")
        for k, s in enumerate(self.sigma_ys):
            if not (isinstance(s, (int, float)) and math.isfinite(s) and s > 0):
                raise ValueError(f"sigma_ys[{k}] must be positive and finite, got {s!r}")
        object.__setattr__(self, "sigma_ys", tuple(float(s) for s in self.sigma_ys))

    @property
    def n_sensors(self):
        return len(self.sigma_ys)


def _check_sensor_scale(model):
    if model.n_sensors > MAX_SENSORS:
        raise ValueError(
            f"K={model.n_sensors} exceeds the desk-scale cap of {MAX_SENSORS} sensors"
        )


@dataclass(frozen=True)
class VecYxThresholds:
    """One-way multi-sensor design: per-sensor cuts and a fusion table.

    t_w is flat over bit vectors with sensor k on bit k, so index
    v_1 + 2 v_2 + 4 v_3.
    """

    t_v: tuple[float, ...]
    t_w: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "t_v", tuple(_check_threshold(f"t_v[{k}]", t) for k, t in enumerate(self.t_v))
        )
        if len(self.t_w) != 1 << len(self.t_v):
            raise ValueError(
                f"t_w must hold {1 << len(self.t_v)} entries for K={len(self.t_v)}, "
                f"got {len(self.t_w)}"
            )
        object.__setattr__(
            self, "t_w", tuple(_check_threshold(f"t_w[{i}]", t) for i, t in enumerate(self.t_w))
        )


@dataclass(frozen=True)
class XVecYxThresholds:
    """Interactive multi-sensor design; pairs are indexed by the first bit u."""

    t_u: float
    t_v: tuple[tuple[float, float], ...]
    t_w: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "t_u", _check_threshold("t_u", self.t_u))
        tv = tuple(
            (
                _check_threshold(f"t_v[{k}][0]", p[0]),
                _check_threshold(f"t_v[{k}][1]", p[1]),
            )
            for k, p in enumerate(self.t_v)
        )
        object.__setattr__(self, "t_v", tv)
        if len(self.t_w) != 1 << len(tv):
            raise ValueError(
                f"t_w must hold {1 << len(tv)} pairs for K={len(tv)}, got {len(self.t_w)}"
            )
        tw = tuple(
            (
                _check_threshold(f"t_w[{i}][0]", p[0]),
                _check_threshold(f"t_w[{i}][1]", p[1]),
            )
            for i, p in enumerate(self.t_w)
        )
        object.__setattr__(self, "t_w", tw)


def _slice_prob(i, sx, t1, cut, u):
    """P_i(w=1 on the u slice) with the final cut applied within the slice."""
    if u == 1:
        return q_tail((max(t1, cut) - i) / sx)
    raw = q_tail((cut - i) / sx) - q_tail((max(cut, t1) - i) / sx)
    return min(1.0, max(0.0, raw))


def multisensor_evaluate(model: MultiSensorModel, arch: str, thr) -> OperatingPoint:
    """Exact (pf, pd) for the vecYX or XvecYX process via per-sensor products."""
    _check_sensor_scale(model)
    K = model.n_sensors
    sx = model.sigma_x

    def bit_probs(i, cuts):
        return [q_tail((cuts[k] - i) / model.sigma_ys[k]) for k in range(K)]

    def rate_vecyx(i):
        if len(thr.t_v) != K:
            raise ValueError(f"t_v holds {len(thr.t_v)} cuts but the model has K={K}")
        p1 = bit_probs(i, thr.t_v)
        total = 0.0
        for idx in range(1 << K):
            prod = 1.0
            for k in range(K):
                bit = (idx >> k) & 1
                prod = prod * p1[k] if bit else (1.0 - p1[k]) * prod
            total += prod * q_tail((thr.t_w[idx] - i) / sx)
        return total

    def rate_xvecyx(i):
        if len(thr.t_v) != K:
            raise ValueError(f"t_v holds {len(thr.t_v)} pairs but the model has K={K}")
        total = 0.0
        for u in (0, 1):
            p1 = bit_probs(i, [thr.t_v[k][u] for k in range(K)])
            subtotal = 0.0
            for idx in range(1 << K):
                prod = 1.0
                for k in range(K):
                    bit = (idx >> k) & 1
                    prod = prod * p1[k] if bit else (1.0 - p1[k]) * prod
                subtotal += prod * _slice_prob(i, sx, thr.t_u, thr.t_w[idx][u], u)
            total += subtotal
        return total

    if arch == "vecyx":
        if not isinstance(thr, VecYxThresholds):
            raise ValueError("vecyx expects VecYxThresholds")
        return OperatingPoint(pf=rate_vecyx(0), pd=rate_vecyx(1))
    if arch == "xvecyx":
        if not isinstance(thr, XVecYxThresholds):
            raise ValueError("xvecyx expects XVecYxThresholds")
        return OperatingPoint(pf=rate_xvecyx(0), pd=rate_xvecyx(1))
    raise ValueError(f"arch must be 'vecyx' or 'xvecyx', got {arch!r}")


@dataclass(frozen=True)
class MultisensorKlMax:
    """Maximized KL distances of both directions plus the achieving designs."""

    k_vecyx: float
    k_xvecyx: float
    vec_thresholds: tuple[float, ...]
    xvec_t_u: float
    xvec_t_v: tuple[tuple[float, float], ...]


def multisensor_kl_max(
    model: MultiSensorModel, u_points: int = 17, y_points: int | None = None
) -> MultisensorKlMax:
    """Maximized asymptotic exponents with K peripheral sensors.

    The one-way value separates into per-sensor one-bit maximizations; the
    interactive value is found by a joint grid over (t_u, per-sensor per-u
    cuts) plus golden refinement, with no separability assumed.
    """
    _check_sensor_scale(model)
    K = model.n_sensors
    sx = model.sigma_x
    k_x = 0.5 / (sx * sx)

    per_sensor = [_maximize_y_profile(s)[0] for s in model.sigma_ys]
    vec_ts = tuple(t for t, _ in per_sensor)
    k_vecyx = k_x + sum(v for _, v in per_sensor)

    def branch_profile(k):
        def f(t):
            s = model.sigma_ys[k]
            return bern_kl(q_tail(t / s), q_tail((t - 1.0) / s))

        return f

    profiles = [branch_profile(k) for k in range(K)]

    m = y_points or (13 if K <= 2 else 7)
    axes = [np.linspace(-3.0 * s, 3.0 * s + 1.0, m) for s in model.sigma_ys]
    branch_sum = np.zeros((1,))
    for k in range(K):
        vals = np.array([profiles[k](t) for t in axes[k]])
        branch_sum = (branch_sum[:, None] + vals[None, :]).ravel()
    tus = np.linspace(-3.0 * sx, 3.0 * sx + 1.0, u_points)
    a1 = q_tail(tus / sx)
    value = (
        k_x
        + a1[:, None, None] * branch_sum[None, None, :]
        + (1.0 - a1)[:, None, None] * branch_sum[None, :, None]
    )
    iu, j0, j1 = np.unravel_index(int(np.argmax(value)), value.shape)

    # branch_sum was built with sensor 0 outermost, so decode from the last axis
    def decode(j):
        coords = [0.0] * K
        for k in reversed(range(K)):
            coords[k] = float(axes[k][j % m])
            j //= m
        return coords

    t_u = float(tus[iu])
    tv0 = decode(int(j0))
    tv1 = decode(int(j1))

    def value_at(t_u, tv0, tv1):
        a = q_tail(t_u / sx)
        return (
            k_x
            + a * sum(profiles[k](tv1[k]) for k in range(K))
            + (1.0 - a) * sum(profiles[k](tv0[k]) for k in range(K))
        )

    for _ in range(2):
        for k in range(K):
            s = model.sigma_ys[k]
            tv0[k], _ = _golden_max(
                lambda t: value_at(t_u, tv0[: k] + [t] + tv0[k + 1 :], tv1), tv0[k] - s, tv0[k] + s
            )
            tv1[k], _ = _golden_max(
                lambda t: value_at(t_u, tv0, tv1[: k] + [t] + tv1[k + 1 :]), tv1[k] - s, tv1[k] + s
            )
        t_u, _ = _golden_max(lambda t: value_at(t, tv0, tv1), t_u - sx, t_u + sx)

    k_xvecyx = value_at(t_u, tv0, tv1)
    return MultisensorKlMax(
        k_vecyx=float(k_vecyx),
        k_xvecyx=float(k_xvecyx),
        vec_thresholds=vec_ts,
        xvec_t_u=t_u,
        xvec_t_v=tuple((tv0[k], tv1[k]) for k in range(K)),
    )
