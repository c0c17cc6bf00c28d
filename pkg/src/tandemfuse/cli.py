"""Command-line front end: figure sweeps, validation runs, single-design queries.

Every command writes a deterministic CSV (17-significant-digit shortest
round-trip floats, single newline terminator), a sidecar config that can be
replayed with --config, and, for the report commands, a companion PNG.

Exit codes: 0 success, 1 validation failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import figures
from .asymptotic import maximize_kl_xyx, maximize_kl_yx
from .extensions import (
    MifDesign,
    MultiSensorModel,
    VecYxThresholds,
    XVecYxThresholds,
    lift_mif_design,
    mif_kl_search,
    multisensor_evaluate,
    multisensor_kl_max,
)
from .fixed_sample import (
    NonConvergenceError,
    SearchConfig,
    centralized,
    evaluate_xyx,
    evaluate_yx,
    optimize_xyx,
    optimize_yx,
)
from .gaussian import GaussianModel, XyxThresholds, YxThresholds
from .montecarlo import (
    estimate_exponent,
    random_xvecyx_thresholds,
    random_xyx_thresholds,
    random_yx_thresholds,
    simulate_fixed,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2

COMMANDS = ("fig3", "fig4", "validate", "mif", "multisensor", "eval")


class ConfigError(ValueError):
    """Unusable configuration (bad value, malformed file, wrong shapes)."""


@dataclass
class ExperimentConfig:
    """Flat record of everything a run depends on; round-trips through the
    on-disk `key = value` format losslessly."""

    command: str = ""
    sigma_x: float = 1.0
    sigma_y: float = 1.0
    sigma_ys: tuple[float, ...] = (1.0, 1.0)
    alpha: float = 0.2
    sweep: tuple[float, float, int] = (0.5, 2.0, 16)
    seed: int = 123456789
    trials: int = 1_000_000
    out: str = "report.csv"
    grid_points: int = 41
    xyx_grid_points: int = 21
    tol: float = 1e-6
    n_steps: int = 5
    arch: str = "yx"
    thresholds: tuple[float, ...] = ()
    exponent_n: int = 2000
    exponent_trials: int = 200
    no_plot: bool = False

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            lines.append(f"{f.name} = {_format_value(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        known = {f.name: f for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in known:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            values[key] = _parse_value(key, value.strip())
        return cls(**values)


def _format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ":".join(_format_value(v) for v in value)
    return str(value)


def _parse_value(key, text):
    kind = ExperimentConfig.__dataclass_fields__[key].type
    try:
        if key == "sweep":
            start, stop, count = text.split(":")
            return (float(start), float(stop), int(count))
        if key in ("sigma_ys", "thresholds"):
            if not text:
                return ()
            return tuple(float(v) for v in text.replace(",", ":").split(":"))
        if key == "no_plot":
            if text.lower() in ("true", "1", "yes"):
                return True
            if text.lower() in ("false", "0", "no"):
                return False
            raise ValueError(text)
        if "int" in kind:
            return int(text)
        if "float" in kind:
            return float(text)
        return text
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {text!r}") from exc


def _sweep_values(sweep):
    start, stop, count = sweep
    if count < 1:
        raise ConfigError(f"sweep count must be >= 1, got {count}")
    return np.sort(np.linspace(start, stop, count))


def _csv_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(row[name]) for name in header))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")


def _search_config(cfg: ExperimentConfig) -> SearchConfig:
    return SearchConfig(
        grid_points=cfg.grid_points,
        xyx_grid_points=cfg.xyx_grid_points,
        constraint_tol=cfg.tol,
    )


# ---------------------------------------------------------------------------
# report builders


def fig3_rows(cfg: ExperimentConfig):
    header = [
        "sigma_x",
        "pd_yx",
        "pd_xyx",
        "pd_centralized",
        "pf_residual_yx",
        "pf_residual_xyx",
        "status",
    ]
    search = _search_config(cfg)
    rows = []
    for sx in _sweep_values(cfg.sweep):
        model = GaussianModel(float(sx), cfg.sigma_y)
        row = {"sigma_x": float(sx), "status": "ok"}
        notes = []
        try:
            _, pt = optimize_yx(model, cfg.alpha, search)
            row["pd_yx"] = pt.pd
            row["pf_residual_yx"] = abs(pt.pf - cfg.alpha)
        except NonConvergenceError as exc:
            row["pd_yx"] = math.nan
            row["pf_residual_yx"] = math.nan
            notes.append(f"yx:{exc}")
        try:
            _, pt = optimize_xyx(model, cfg.alpha, search)
            row["pd_xyx"] = pt.pd
            row["pf_residual_xyx"] = abs(pt.pf - cfg.alpha)
        except NonConvergenceError as exc:
            row["pd_xyx"] = math.nan
            row["pf_residual_xyx"] = math.nan
            notes.append(f"xyx:{exc}")
        row["pd_centralized"] = centralized(model, cfg.alpha).pd
        if notes:
            row["status"] = ";".join(notes).replace(",", ";")
        rows.append(row)
    return header, rows, True


def fig4_rows(cfg: ExperimentConfig):
    header = ["sigma_x", "k_yx", "k_xyx", "k_xy", "k_yxy"]
    rows = []
    for sx in _sweep_values(cfg.sweep):
        model = GaussianModel(float(sx), cfg.sigma_y)
        swapped = model.swapped()
        rows.append(
            {
                "sigma_x": float(sx),
                "k_yx": maximize_kl_yx(model).k_total,
                "k_xyx": maximize_kl_xyx(model)[1],
                "k_xy": maximize_kl_yx(swapped).k_total,
                "k_yxy": maximize_kl_xyx(swapped)[1],
            }
        )
    return header, rows, True


def validate_rows(cfg: ExperimentConfig):
    header = ["check_name", "analytic", "mc_value", "half_width", "pass"]
    model = GaussianModel(cfg.sigma_x, cfg.sigma_y)
    model2 = MultiSensorModel(cfg.sigma_x, cfg.sigma_ys)
    rng = np.random.Generator(np.random.Philox(key=np.uint64(cfg.seed & (2**64 - 1))))
    rows = []
    run_seed = [cfg.seed]

    def add(name, analytic, estimate):
        rows.append(
            {
                "check_name": name,
                "analytic": float(analytic),
                "mc_value": estimate.value,
                "half_width": estimate.half_width,
                "pass": bool(abs(float(analytic) - estimate.value) <= estimate.half_width),
            }
        )

    def next_seed():
        run_seed[0] += 1
        return run_seed[0]

    for i in range(5):
        thr = random_yx_thresholds(rng, model)
        point = evaluate_yx(model, thr)
        pf_hat, pd_hat = simulate_fixed(model, "yx", thr, cfg.trials, next_seed())
        add(f"yx_design{i}_pf", point.pf, pf_hat)
        add(f"yx_design{i}_pd", point.pd, pd_hat)
    for i in range(5):
        thr = random_xyx_thresholds(rng, model)
        point = evaluate_xyx(model, thr)
        pf_hat, pd_hat = simulate_fixed(model, "xyx", thr, cfg.trials, next_seed())
        add(f"xyx_design{i}_pf", point.pf, pf_hat)
        add(f"xyx_design{i}_pd", point.pd, pd_hat)
    for i in range(5):
        thr = random_xvecyx_thresholds(rng, model2)
        point = multisensor_evaluate(model2, "xvecyx", thr)
        pf_hat, pd_hat = simulate_fixed(model2, "xvecyx", thr, cfg.trials, next_seed())
        add(f"xvecyx_design{i}_pf", point.pf, pf_hat)
        add(f"xvecyx_design{i}_pd", point.pd, pd_hat)

    kl = maximize_kl_yx(model)
    est = estimate_exponent(model, "yx", kl.t_star, cfg.exponent_n, cfg.exponent_trials, next_seed())
    add("exponent_yx", kl.k_total, est)
    design, k_xyx = maximize_kl_xyx(model)
    est = estimate_exponent(
        model, "xyx", design, cfg.exponent_n, cfg.exponent_trials, next_seed()
    )
    add("exponent_xyx", k_xyx, est)

    return header, rows, all(row["pass"] for row in rows)


def mif_rows(cfg: ExperimentConfig):
    header = ["n_steps", "k_mif_max", "k_yx_max", "gap"]
    model = GaussianModel(cfg.sigma_x, cfg.sigma_y)
    if cfg.n_steps not in (3, 5, 7):
        raise ConfigError(f"n_steps must be 3, 5, or 7, got {cfg.n_steps}")
    k_yx_max = maximize_kl_yx(model).k_total
    rows = []
    previous = None
    for n in range(3, cfg.n_steps + 1, 2):
        extra = (lift_mif_design(previous),) if previous is not None else ()
        value, design, _ = mif_kl_search(model, n, extra_starts=extra)
        previous = design
        rows.append(
            {"n_steps": n, "k_mif_max": value, "k_yx_max": k_yx_max, "gap": k_yx_max - value}
        )
    return header, rows, True


def multisensor_rows(cfg: ExperimentConfig):
    header = ["n_sensors", "k_vecyx", "k_xvecyx", "gap"]
    model = MultiSensorModel(cfg.sigma_x, cfg.sigma_ys)
    res = multisensor_kl_max(model)
    rows = [
        {
            "n_sensors": model.n_sensors,
            "k_vecyx": res.k_vecyx,
            "k_xvecyx": res.k_xvecyx,
            "gap": res.k_vecyx - res.k_xvecyx,
        }
    ]
    return header, rows, True


def _thresholds_from_config(cfg: ExperimentConfig):
    t = cfg.thresholds
    K = len(cfg.sigma_ys)
    if cfg.arch == "yx":
        if len(t) != 3:
            raise ConfigError("yx needs 3 thresholds: t_v, t_w0, t_w1")
        return YxThresholds(t_v=t[0], t_w=(t[1], t[2]))
    if cfg.arch == "xyx":
        if len(t) != 7:
            raise ConfigError(
                "xyx needs 7 thresholds: t_u, t_v0, t_v1, t_w00, t_w01, t_w10, t_w11"
            )
        return XyxThresholds(t_u=t[0], t_v=(t[1], t[2]), t_w=((t[3], t[4]), (t[5], t[6])))
    if cfg.arch == "vecyx":
        want = K + (1 << K)
        if len(t) != want:
            raise ConfigError(f"vecyx with K={K} needs {want} thresholds")
        return VecYxThresholds(t_v=t[:K], t_w=t[K:])
    if cfg.arch == "xvecyx":
        want = 1 + 2 * K + 2 * (1 << K)
        if len(t) != want:
            raise ConfigError(f"xvecyx with K={K} needs {want} thresholds")
        tv = tuple((t[1 + 2 * k], t[2 + 2 * k]) for k in range(K))
        rest = t[1 + 2 * K :]
        tw = tuple((rest[2 * i], rest[2 * i + 1]) for i in range(1 << K))
        return XVecYxThresholds(t_u=t[0], t_v=tv, t_w=tw)
    if cfg.arch == "mif":
        want = 1 + 2 * (cfg.n_steps - 1)
        if len(t) != want:
            raise ConfigError(f"mif with n_steps={cfg.n_steps} needs {want} thresholds")
        steps = [(t[0],)]
        for k in range(cfg.n_steps - 1):
            steps.append((t[1 + 2 * k], t[2 + 2 * k]))
        return MifDesign(n_steps=cfg.n_steps, steps=tuple(steps))
    raise ConfigError(f"unknown arch {cfg.arch!r}")


def eval_rows(cfg: ExperimentConfig):
    if cfg.arch not in ("yx", "xyx", "vecyx", "xvecyx"):
        raise ConfigError("eval supports arch yx, xyx, vecyx, xvecyx")
    thr = _thresholds_from_config(cfg)
    if cfg.arch in ("vecyx", "xvecyx"):
        model = MultiSensorModel(cfg.sigma_x, cfg.sigma_ys)
        point = multisensor_evaluate(model, cfg.arch, thr)
    else:
        model = GaussianModel(cfg.sigma_x, cfg.sigma_y)
        point = (evaluate_yx if cfg.arch == "yx" else evaluate_xyx)(model, thr)
    row = {"arch": cfg.arch, "pf": point.pf, "pd": point.pd}
    header = ["arch", "pf", "pd"]
    if cfg.trials > 0:
        pf_hat, pd_hat = simulate_fixed(model, cfg.arch, thr, cfg.trials, cfg.seed)
        row.update(
            {
                "pf_mc": pf_hat.value,
                "pf_half_width": pf_hat.half_width,
                "pd_mc": pd_hat.value,
                "pd_half_width": pd_hat.half_width,
            }
        )
        header += ["pf_mc", "pf_half_width", "pd_mc", "pd_half_width"]
    return header, [row], True


_BUILDERS = {
    "fig3": fig3_rows,
    "fig4": fig4_rows,
    "validate": validate_rows,
    "mif": mif_rows,
    "multisensor": multisensor_rows,
    "eval": eval_rows,
}

_FIGURES = {
    "fig3": lambda rows, path, cfg: figures.render_fig3(rows, path, cfg.alpha),
    "fig4": lambda rows, path, cfg: figures.render_fig4(rows, path),
    "mif": lambda rows, path, cfg: figures.render_mif(rows, path),
    "multisensor": lambda rows, path, cfg: figures.render_multisensor(rows, path),
}


def run(cfg: ExperimentConfig) -> int:
    if cfg.command not in _BUILDERS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    header, rows, ok = _BUILDERS[cfg.command](cfg)
    out = Path(cfg.out)
    write_csv(out, header, rows)
    # the sidecar replays the run; search/iteration settings ride along as
    # comments so the full record is kept without widening the config schema
    sidecar = cfg.to_text() + "".join(
        f"# search.{key} = {_format_value(value)}\n"
        for key, value in _search_config(cfg).to_items()
    )
    out.with_suffix(".config").write_text(sidecar, encoding="utf-8")
    if cfg.command in _FIGURES and not cfg.no_plot:
        _FIGURES[cfg.command](rows, out.with_suffix(".png"), cfg)
    return EXIT_OK if ok else EXIT_VALIDATION


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="tandemfuse",
        description="Tandem/interactive fusion designs, exponents, and validation reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("fig3", "detection-probability sweep over sigma_x at fixed alpha"),
        ("fig4", "KL-exponent sweep over sigma_x for both communication directions"),
        ("validate", "Monte-Carlo cross-validation of the analytic modules"),
        ("mif", "multi-step memoryless interaction no-gain report"),
        ("multisensor", "K-sensor exponent no-gain report"),
        ("eval", "evaluate a single design (analytic, optionally Monte-Carlo)"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--sigma-x", type=float, default=None)
        p.add_argument("--sigma-y", type=float, default=None)
        p.add_argument("--sigma-ys", type=str, default=None, help="comma/colon list")
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--sweep", type=str, default=None, help="start:stop:count")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--grid-points", type=int, default=None)
        p.add_argument("--xyx-grid-points", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--n-steps", type=int, default=None)
        p.add_argument("--arch", type=str, default=None)
        p.add_argument("--thresholds", type=str, default=None, help="comma/colon list")
        p.add_argument("--exponent-n", type=int, default=None)
        p.add_argument("--exponent-trials", type=int, default=None)
        p.add_argument("--no-plot", action="store_true", default=None)
    return parser


def build_config(args) -> ExperimentConfig:
    if args.config is not None:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        cfg = ExperimentConfig.from_text(text)
    else:
        cfg = ExperimentConfig()
    overrides = {"command": args.command}
    for flag, key in (
        ("sigma_x", "sigma_x"),
        ("sigma_y", "sigma_y"),
        ("alpha", "alpha"),
        ("seed", "seed"),
        ("trials", "trials"),
        ("out", "out"),
        ("grid_points", "grid_points"),
        ("xyx_grid_points", "xyx_grid_points"),
        ("tol", "tol"),
        ("n_steps", "n_steps"),
        ("arch", "arch"),
        ("exponent_n", "exponent_n"),
        ("exponent_trials", "exponent_trials"),
    ):
        value = getattr(args, flag)
        if value is not None:
            overrides[key] = value
    for flag, key in (("sigma_ys", "sigma_ys"), ("thresholds", "thresholds"), ("sweep", "sweep")):
        value = getattr(args, flag)
        if value is not None:
            overrides[key] = _parse_value(key, value)
    if args.no_plot is not None:
        overrides["no_plot"] = True
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return run(cfg)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
