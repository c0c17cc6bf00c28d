"""Stochastic oracle: simulate the literal bit exchanges and the LLN exponent.

Trials are partitioned into 2^16-trial blocks, each driven by a Philox
counter-based generator keyed on (seed, stream, block), so any block's
randomness is addressable without sequential generation and results are
identical for any worker partitioning.  Gaussian variates come from the
inverse of the same tail function the analytic modules use, keeping the
simulator and the analysis on one model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .extensions import (
    MifDesign,
    MultiSensorModel,
    VecYxThresholds,
    XVecYxThresholds,
    _mif_tables,
)
from .gaussian import GaussianModel, XyxThresholds, YxThresholds, q_inv, q_tail
from .asymptotic import XyxKlDesign

BLOCK_TRIALS = 1 << 16

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class McEstimate:
    """An empirical value with its trial count, seed, and 3-sigma half-width."""

    value: float
    trials: int
    seed: int
    half_width: float


def _binomial_estimate(successes, trials, seed):
    p = successes / trials
    return McEstimate(
        value=p, trials=trials, seed=seed, half_width=3.0 * math.sqrt(p * (1.0 - p) / trials)
    )


def _block_rng(seed, stream, block):
    tag = ((stream & 0xFFFF) << 48) | (block & ((1 << 48) - 1))
    key = np.array([np.uint64(seed & _MASK64), np.uint64(tag)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _blocks(trials):
    start = 0
    block = 0
    while start < trials:
        yield block, min(BLOCK_TRIALS, trials - start)
        start += BLOCK_TRIALS
        block += 1


def _draw_normal(rng, n, mean, sigma):
    # inverse-CDF sampling through the package tail function
    return mean - sigma * q_inv(rng.random(n))


def _mif_step_tables(design):
    return [np.asarray(t, dtype=float) for t in design.steps]


def _run_bits(model, arch, thr, x, ys):
    """Execute the architecture's threshold comparisons; returns the final bit."""
    if arch == "yx":
        v = ys[0] > thr.t_v
        cuts = np.asarray(thr.t_w, dtype=float)
        return x > cuts[v.astype(np.intp)]
    if arch == "xyx":
        u = (x > thr.t_u).astype(np.intp)
        tv = np.asarray(thr.t_v, dtype=float)
        v = (ys[0] > tv[u]).astype(np.intp)
        tw = np.asarray(thr.t_w, dtype=float)
        return x > tw[v, u]
    if arch == "vecyx":
        idx = np.zeros(x.shape, dtype=np.intp)
        for k, t in enumerate(thr.t_v):
            idx |= (ys[k] > t).astype(np.intp) << k
        cuts = np.asarray(thr.t_w, dtype=float)
        return x > cuts[idx]
    if arch == "xvecyx":
        u = (x > thr.t_u).astype(np.intp)
        idx = np.zeros(x.shape, dtype=np.intp)
        for k, pair in enumerate(thr.t_v):
            tv = np.asarray(pair, dtype=float)
            idx |= (ys[k] > tv[u]).astype(np.intp) << k
        tw = np.asarray(thr.t_w, dtype=float)
        return x > tw[idx, u]
    if arch == "mif":
        tables = _mif_step_tables(thr)
        prev = np.zeros(x.shape, dtype=np.intp)
        for k in range(1, thr.n_steps + 1):
            table = tables[k - 1]
            cut = table[0] if k == 1 else table[prev]
            obs = x if k % 2 == 1 else ys[0]
            prev = (obs > cut).astype(np.intp)
        return prev.astype(bool)
    raise ValueError(f"unknown architecture {arch!r}")


def _n_y_streams(model, arch):
    if arch in ("vecyx", "xvecyx"):
        return model.n_sensors
    return 1


def _sigmas(model, arch):
    if arch in ("vecyx", "xvecyx"):
        return model.sigma_x, model.sigma_ys
    return model.sigma_x, (model.sigma_y,)


def simulate_fixed(model, arch: str, thr, trials: int, seed: int):
    """Empirical (pf_hat, pd_hat) of the literal decision process.

    Output is bit-identical for identical (seed, trials, arch, thr, model);
    blocks are reduced in index order.
    """
    _check_arch_thr(arch, thr)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sx, sys_ = _sigmas(model, arch)
    counts = [0, 0]
    for hyp in (0, 1):
        for block, nb in _blocks(trials):
            rng = _block_rng(seed, hyp, block)
            x = _draw_normal(rng, nb, float(hyp), sx)
            ys = [_draw_normal(rng, nb, float(hyp), s) for s in sys_]
            w = _run_bits(model, arch, thr, x, ys)
            counts[hyp] += int(np.count_nonzero(w))
    return (
        _binomial_estimate(counts[0], trials, seed),
        _binomial_estimate(counts[1], trials, seed),
    )


def _check_arch_thr(arch, thr):
    expect = {
        "yx": YxThresholds,
        "xyx": XyxThresholds,
        "vecyx": VecYxThresholds,
        "xvecyx": XVecYxThresholds,
        "mif": MifDesign,
    }
    if arch not in expect:
        raise ValueError(f"unknown architecture {arch!r}")
    if not isinstance(thr, expect[arch]):
        raise ValueError(f"{arch} expects {expect[arch].__name__}, got {type(thr).__name__}")


def _bit_log_ratio(a0, a1):
    """log(P0/P1) for a realized bit branch; vacuous branches contribute 0."""
    if a0 <= 0.0 or a1 <= 0.0:
        return 0.0
    return math.log(a0 / a1)


def estimate_exponent(model: GaussianModel, arch: str, thr, n: int, trials: int, seed: int):
    """Average normalized log-likelihood ratio of (x^n, v^n) under H0.

    Each trial draws n i.i.d. samples, runs the per-sample memoryless
    protocol, and scores log p0(x, v)/p1(x, v) with the analytic per-sample
    joint densities p_i(x, v) = p_i(x) P_i(R_{v|u(x)}); the law of large
    numbers drives the mean to the architecture's KL distance.
    """
    if n < 1 or trials < 1:
        raise ValueError("n and trials must be >= 1")
    if arch == "yx":
        t_v = thr.t_v if isinstance(thr, YxThresholds) else float(thr)
        t_u = None
        tv_pair = (t_v, t_v)
    elif arch == "xyx":
        if isinstance(thr, XyxKlDesign):
            t_u, tv_pair = thr.t_u, thr.t_v
        elif isinstance(thr, XyxThresholds):
            t_u, tv_pair = thr.t_u, thr.t_v
        else:
            raise ValueError("xyx expects XyxKlDesign or XyxThresholds")
    else:
        raise ValueError(f"exponent estimation supports 'yx' and 'xyx', got {arch!r}")

    sx, sy = model.sigma_x, model.sigma_y
    sx2 = sx * sx
    branch = np.empty((2, 2))  # [u, v] -> log P0(R_{v|u}) / P1(R_{v|u})
    for u in (0, 1):
        a0 = q_tail(tv_pair[u] / sy)
        a1 = q_tail((tv_pair[u] - 1.0) / sy)
        branch[u, 1] = _bit_log_ratio(a0, a1)
        branch[u, 0] = _bit_log_ratio(1.0 - a0, 1.0 - a1)

    total = n * trials
    scores = np.empty(total)
    filled = 0
    for block, nb in _blocks(total):
        rng = _block_rng(seed, 2, block)
        x = _draw_normal(rng, nb, 0.0, sx)
        y = _draw_normal(rng, nb, 0.0, sy)
        if t_u is None:
            u = np.zeros(nb, dtype=np.intp)
            tv = np.full(nb, tv_pair[0])
        else:
            u = (x > t_u).astype(np.intp)
            tv = np.asarray(tv_pair, dtype=float)[u]
        v = (y > tv).astype(np.intp)
        scores[filled : filled + nb] = (0.5 - x) / sx2 + branch[u, v]
        filled += nb
    per_trial = scores.reshape(trials, n).mean(axis=1)
    value = float(per_trial.mean())
    spread = float(per_trial.std(ddof=1)) if trials > 1 else 0.0
    return McEstimate(
        value=value, trials=trials, seed=seed, half_width=3.0 * spread / math.sqrt(trials)
    )


def estimate_mif_kl(model: GaussianModel, design: MifDesign, trials: int, seed: int):
    """Monte-Carlo mean of log p0(x, u_{N-1})/p1(x, u_{N-1}) under H0."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    edges, q = _mif_tables(model, design)
    cuts = np.asarray(edges[1:-1], dtype=float)
    sx, sy = model.sigma_x, model.sigma_y
    sx2 = sx * sx
    tables = _mif_step_tables(design)
    scores = np.empty(trials)
    filled = 0
    for block, nb in _blocks(trials):
        rng = _block_rng(seed, 3, block)
        x = _draw_normal(rng, nb, 0.0, sx)
        y = _draw_normal(rng, nb, 0.0, sy)
        prev = np.zeros(nb, dtype=np.intp)
        for k in range(1, design.n_steps):
            table = tables[k - 1]
            cut = table[0] if k == 1 else table[prev]
            obs = x if k % 2 == 1 else y
            prev = (obs > cut).astype(np.intp)
        cell = np.searchsorted(cuts, x, side="left")
        q0 = q[0][cell, prev]
        q1 = q[1][cell, prev]
        scores[filled : filled + nb] = (0.5 - x) / sx2 + np.log(q0 / q1)
        filled += nb
    value = float(scores.mean())
    spread = float(scores.std(ddof=1)) if trials > 1 else 0.0
    return McEstimate(
        value=value, trials=trials, seed=seed, half_width=3.0 * spread / math.sqrt(trials)
    )


# ---------------------------------------------------------------------------
# randomized designs for validation sweeps


def random_yx_thresholds(rng, model: GaussianModel) -> YxThresholds:
    sy, sx = model.sigma_y, model.sigma_x
    t2 = float(rng.uniform(-sy, 1.0 + sy))
    hi, lo = np.sort(rng.uniform(-1.5 * sx, 1.5 + 1.5 * sx, size=2))[::-1]
    return YxThresholds(t_v=t2, t_w=(float(hi), float(lo)))


def random_xyx_thresholds(rng, model: GaussianModel) -> XyxThresholds:
    sy, sx = model.sigma_y, model.sigma_x
    t1 = float(rng.uniform(-sx, 1.0 + sx))
    t20, t21 = np.sort(rng.uniform(-sy, 1.0 + sy, size=2))[::-1]
    c00, c10 = np.sort(rng.uniform(-1.5 * sx, 1.5 + 1.5 * sx, size=2))[::-1]
    e0 = float(rng.uniform(0.0, 0.8 * sx))
    e1 = float(rng.uniform(0.0, e0 + (c00 - c10)))
    return XyxThresholds(
        t_u=t1,
        t_v=(float(t20), float(t21)),
        t_w=((float(c00), float(c00 + e0)), (float(c10), float(c10 + e1))),
    )


def random_vecyx_thresholds(rng, model: MultiSensorModel) -> VecYxThresholds:
    K = model.n_sensors
    t_v = tuple(float(rng.uniform(-s, 1.0 + s)) for s in model.sigma_ys)
    t_w = tuple(
        float(rng.uniform(-1.5 * model.sigma_x, 1.5 + 1.5 * model.sigma_x))
        for _ in range(1 << K)
    )
    return VecYxThresholds(t_v=t_v, t_w=t_w)


def random_xvecyx_thresholds(rng, model: MultiSensorModel) -> XVecYxThresholds:
    K = model.n_sensors
    sx = model.sigma_x
    t_u = float(rng.uniform(-sx, 1.0 + sx))
    t_v = tuple(
        (float(rng.uniform(-s, 1.0 + s)), float(rng.uniform(-s, 1.0 + s)))
        for s in model.sigma_ys
    )
    t_w = tuple(
        (
            float(rng.uniform(-1.5 * sx, 1.5 + 1.5 * sx)),
            float(rng.uniform(-1.5 * sx, 1.5 + 1.5 * sx)),
        )
        for _ in range(1 << K)
    )
    return XVecYxThresholds(t_u=t_u, t_v=t_v, t_w=t_w)


def random_mif_design(rng, model: GaussianModel, n_steps: int) -> MifDesign:
    steps = []
    for k in range(1, n_steps + 1):
        scale = model.sigma_x if k % 2 == 1 else model.sigma_y
        width = 1 if k == 1 else 2
        steps.append(tuple(float(rng.uniform(-scale, 1.0 + scale)) for _ in range(width)))
    return MifDesign(n_steps=n_steps, steps=tuple(steps))
