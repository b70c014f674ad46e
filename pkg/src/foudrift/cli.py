"""Command-line interface: simulation, estimation, constants, densities,
Monte Carlo experiments, and the numerical verification sweeps.

Every subcommand accepts --config FILE (JSON); explicit flags override
file values, which override built-in defaults.  Outputs are CSV/JSON with
deterministic formatting: a fixed (config, seed) reproduces byte-identical
files regardless of --threads.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .constants import assemble_constants, c2_closed_form, internal_consistency_check
from .density import DensityModel, expansion_pdf
from .estimator import BetaSpec, EstimationError, ParamSpace, estimate_from_qt
from .fgn import (
    FgnSimulationError,
    SampleGrid,
    cumulate_to_fbm,
    default_steps,
    simulate_fgn,
)
from .fou import FouSimulationError, ModelParams, integrate_q, simulate_fou
from .kernels import KernelParams, cu2_closed_form, cu2_quadrature, gamma2_finite_T
from .montecarlo import McConfig, McRunError, empirical_variance_check, run_experiment
from .quadrature import QuadratureError, QuadratureSpec

__all__ = ["main"]

# Figure id -> (hurst, horizon) at theta = 2: ids 1-6 are the simulation
# study's six panels, 7-8 fill out the same hurst/horizon grid.
FIGURE_MAP = {
    1: (0.55, 50.0),
    2: (0.55, 100.0),
    3: (0.625, 50.0),
    4: (0.625, 100.0),
    5: (0.7, 100.0),
    6: (0.7, 400.0),
    7: (0.7, 50.0),
    8: (0.625, 400.0),
}

_NUMERICAL_ERRORS = (
    QuadratureError,
    FgnSimulationError,
    FouSimulationError,
    McRunError,
    EstimationError,
)


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


def _fmt(value) -> str:
    return repr(float(value))


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, (int, float, np.floating)) else v
                             for v in row])


def _write_json(path: str | None, payload: dict) -> str:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    return text


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo_s, hi_s, n_s = text.split(":")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except ValueError as exc:
        raise ConfigError(f"grid must be lo:hi:n, got {text!r}") from exc
    if not (hi > lo and n >= 2):
        raise ConfigError(f"grid must satisfy hi > lo and n >= 2, got {text!r}")
    return np.linspace(lo, hi, n)


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc


def _merge(args: argparse.Namespace, config: dict, key: str, default):
    explicit = getattr(args, key, None)
    if explicit is not None:
        return explicit
    if key in config:
        return config[key]
    if default is None:
        raise ConfigError(f"missing required option --{key.replace('_', '-')}")
    return default


def _load_config(args: argparse.Namespace) -> dict:
    if getattr(args, "config", None) is None:
        return {}
    try:
        payload = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {args.config}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError("config file must hold a JSON object")
    return payload


def _model_from(args, cfg, *, sigma_default=1.0, x0_default=1.0) -> ModelParams:
    return ModelParams(
        theta=float(_merge(args, cfg, "theta", None)),
        sigma=float(_merge(args, cfg, "sigma", sigma_default)),
        hurst=float(_merge(args, cfg, "hurst", None)),
        x0=float(_merge(args, cfg, "x0", x0_default)),
    )


def _space_from(args, cfg) -> ParamSpace:
    return ParamSpace(
        theta_lo=float(_merge(args, cfg, "theta_lo", 0.1)),
        theta_hi=float(_merge(args, cfg, "theta_hi", 10.0)),
        theta_star=float(_merge(args, cfg, "theta_star", 1.0)),
    )


def _beta_from(args, cfg) -> BetaSpec:
    return BetaSpec(
        mode=str(_merge(args, cfg, "beta", "zero")),
        value=float(_merge(args, cfg, "beta_value", 0.0)),
    )


def _quad_from(args, cfg) -> QuadratureSpec:
    return QuadratureSpec(
        rel_tol=float(_merge(args, cfg, "rel_tol", 1e-7)),
        abs_tol=float(_merge(args, cfg, "abs_tol", 1e-12)),
        max_subdivisions=int(_merge(args, cfg, "max_subdivisions", 4000)),
        tail_cutoff=float(_merge(args, cfg, "tail_cutoff", 40.0)),
    )


def _constants_payload(constants) -> dict:
    return {
        "theta": constants.theta,
        "sigma": constants.sigma,
        "hurst": constants.hurst,
        "x0": constants.x0,
        "c0": constants.c0,
        "c1": constants.c1,
        "c2": constants.c2,
        "c3": constants.c3,
        "c3_prime": constants.c3_prime,
        "mu_slope": constants.mu_slope,
        "mu_half_curvature": constants.mu_half_curvature,
        "bias_limit": constants.bias_limit,
        "lam": constants.lam,
        "kappa": constants.kappa,
        "tau": constants.tau,
        "c11_plus": constants.c11_plus,
        "c12_plus": constants.c12_plus,
        "q": constants.q,
        "beta_at_theta": constants.beta_at_theta,
        "beta_mode": constants.beta.mode,
    }


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    cfg = _load_config(args)
    kind = _merge(args, cfg, "kind", "fou")
    if kind not in ("fou", "fbm", "fgn"):
        raise ConfigError(f"kind must be fou|fbm|fgn, got {kind!r}")
    horizon = float(_merge(args, cfg, "horizon", None))
    steps = _merge(args, cfg, "steps", 0) or default_steps(horizon)
    seed = int(_merge(args, cfg, "seed", 0))
    grid = SampleGrid(horizon, int(steps))
    out = _merge(args, cfg, "out", None)

    if kind == "fou":
        model = _model_from(args, cfg)
        path = simulate_fou(model, grid, seed)
        times, values = grid.times(), path.values
    else:
        hurst = float(_merge(args, cfg, "hurst", None))
        sample = simulate_fgn(hurst, grid, seed)
        if kind == "fbm":
            fbm = cumulate_to_fbm(sample)
            times, values = grid.times(), fbm.values
        else:
            times, values = grid.times()[1:], sample.increments
    _write_csv(out, ["t", "value"], zip(times, values))
    print(f"simulate {kind}: {values.size} values on [0, {horizon}] -> {out}")
    return 0


def _cmd_estimate(args) -> int:
    cfg = _load_config(args)
    path_file = _merge(args, cfg, "input", None)
    data = np.genfromtxt(path_file, delimiter=",", names=True)
    times = np.asarray(data["t"], dtype=float)
    values = np.asarray(data["value"], dtype=float)
    if times.size < 2:
        raise ConfigError("input path must hold at least two samples")
    dts = np.diff(times)
    if not np.allclose(dts, dts[0], rtol=1e-9, atol=1e-12):
        raise ConfigError("input path must be uniformly sampled")
    horizon = float(times[-1] - times[0])
    sigma = float(_merge(args, cfg, "sigma", 1.0))
    hurst = float(_merge(args, cfg, "hurst", None))
    x0 = float(_merge(args, cfg, "x0", values[0]))
    sq = values * values
    q_t = float(np.trapezoid(sq, dx=float(dts[0])))
    result = estimate_from_qt(
        q_t, horizon, sigma, hurst, x0, _space_from(args, cfg), _beta_from(args, cfg)
    )
    payload = {
        "q_t": result.q_t,
        "theta_tilde": result.theta_tilde,
        "theta_hat": result.theta_hat,
        "clipped": result.clipped,
        "q_exponent": result.q_exponent,
        "horizon": horizon,
    }
    text = _write_json(_merge(args, cfg, "out", ""), payload)
    sys.stdout.write(text)
    return 0


def _cmd_constants(args) -> int:
    cfg = _load_config(args)
    model = _model_from(args, cfg)
    constants = assemble_constants(model, _beta_from(args, cfg), _quad_from(args, cfg))
    violations = internal_consistency_check(constants)
    if violations:
        raise QuadratureError("constants failed self-consistency: " + "; ".join(violations))
    payload = _constants_payload(constants)
    text = _write_json(_merge(args, cfg, "out", ""), payload)
    csv_out = _merge(args, cfg, "csv_out", "")
    if csv_out:
        keys = sorted(payload)
        _write_csv(csv_out, keys, [[payload[k] if payload[k] is not None else "" for k in keys]])
    sys.stdout.write(text)
    return 0


def _cmd_density(args) -> int:
    cfg = _load_config(args)
    model = _model_from(args, cfg)
    horizon = float(_merge(args, cfg, "horizon", None))
    grid = _parse_grid(_merge(args, cfg, "grid", "-4:4:401"))
    out = _merge(args, cfg, "out", None)
    constants = assemble_constants(model, _beta_from(args, cfg), _quad_from(args, cfg))
    rows = zip(
        grid,
        expansion_pdf(DensityModel(constants, horizon, "normal_only"), grid),
        expansion_pdf(DensityModel(constants, horizon, "expansion"), grid),
        expansion_pdf(DensityModel(constants, horizon, "expansion_plus"), grid),
    )
    _write_csv(out, ["x", "normal_pdf", "expansion_pdf", "expansion_plus_pdf"], rows)
    print(f"density: {grid.size} rows for theta={model.theta} H={model.hurst} "
          f"T={horizon} -> {out}")
    return 0


def _mc_outputs(summary, constants, cfg: McConfig, prefix: str,
                overlay_grid: np.ndarray | None, plot: str | None) -> dict:
    import scipy.stats

    prefix_path = Path(prefix)
    prefix_path.parent.mkdir(parents=True, exist_ok=True)
    edges = summary.histogram_edges
    counts = summary.histogram_counts
    total = summary.scaled_errors.size
    widths = np.diff(edges)
    hist_rows = zip(edges[:-1], edges[1:], counts, counts / (total * widths))
    _write_csv(f"{prefix}_histogram.csv", ["bin_lo", "bin_hi", "count", "density"], hist_rows)

    if overlay_grid is None:
        overlay_grid = np.linspace(edges[0], edges[-1], 201)
    kde = scipy.stats.gaussian_kde(summary.scaled_errors)(overlay_grid)
    rows = zip(
        overlay_grid,
        kde,
        expansion_pdf(DensityModel(constants, cfg.horizon, "normal_only"), overlay_grid),
        expansion_pdf(DensityModel(constants, cfg.horizon, "expansion"), overlay_grid),
        expansion_pdf(DensityModel(constants, cfg.horizon, "expansion_plus"), overlay_grid),
    )
    _write_csv(
        f"{prefix}_overlay.csv",
        ["x", "empirical_kde", "normal_pdf", "expansion_pdf", "expansion_plus_pdf"],
        rows,
    )

    payload = {
        "theta": cfg.params.theta,
        "sigma": cfg.params.sigma,
        "hurst": cfg.params.hurst,
        "x0": cfg.params.x0,
        "horizon": cfg.horizon,
        "steps": cfg.grid().steps,
        "replications": cfg.replications,
        "seed": cfg.seed,
        "estimator": cfg.estimator,
        "beta_mode": cfg.beta.mode,
        "mean": summary.mean,
        "variance": summary.variance,
        "skewness": summary.skewness,
        "ks_normal": summary.ks_normal,
        "ks_expansion": summary.ks_expansion,
        "ks_expansion_plus": summary.ks_expansion_plus,
        "clipped_count": summary.clipped_count,
        "failure_count": summary.failure_count,
    }
    _write_json(f"{prefix}_summary.json", payload)
    if plot:
        _plot_overlay(summary, constants, cfg, overlay_grid, plot)
    return payload


def _plot_overlay(summary, constants, cfg: McConfig, grid: np.ndarray, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "foudrift"
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.hist(summary.scaled_errors, bins=summary.histogram_edges, density=True,
            color="0.8", edgecolor="0.5", label="empirical")
    ax.plot(grid, expansion_pdf(DensityModel(constants, cfg.horizon, "normal_only"), grid),
            "b--", label="normal")
    ax.plot(grid, expansion_pdf(DensityModel(constants, cfg.horizon, "expansion"), grid),
            "r-", label="expansion")
    ax.set_xlabel("scaled estimation error")
    ax.set_ylabel("density")
    ax.set_title(f"theta={cfg.params.theta} H={cfg.params.hurst} T={cfg.horizon} "
                 f"N={cfg.replications}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)


def _cmd_mc(args) -> int:
    cfg_file = _load_config(args)
    model = _model_from(args, cfg_file)
    horizon = float(_merge(args, cfg_file, "horizon", None))
    mc_cfg = McConfig(
        params=model,
        horizon=horizon,
        replications=int(_merge(args, cfg_file, "replications", 10_000)),
        seed=int(_merge(args, cfg_file, "seed", 0)),
        space=_space_from(args, cfg_file),
        beta=_beta_from(args, cfg_file),
        steps=int(_merge(args, cfg_file, "steps", 0)) or None,
        bins=int(_merge(args, cfg_file, "bins", 60)),
        estimator=str(_merge(args, cfg_file, "estimator", "hat")),
    )
    constants = assemble_constants(model, mc_cfg.beta, _quad_from(args, cfg_file))
    threads = getattr(args, "threads", None)
    summary = run_experiment(mc_cfg, constants, threads)
    prefix = _merge(args, cfg_file, "out_prefix", "mc")
    grid_text = _merge(args, cfg_file, "overlay_grid", "")
    overlay_grid = _parse_grid(grid_text) if grid_text else None
    payload = _mc_outputs(summary, constants, mc_cfg, prefix,
                          overlay_grid, _merge(args, cfg_file, "plot", ""))
    if _merge(args, cfg_file, "variance_check", False):
        report = empirical_variance_check(mc_cfg, constants, threads)
        payload["variance_ratio"] = report.ratio
    print(
        f"mc: N={mc_cfg.replications} T={horizon} H={model.hurst} "
        f"ks_normal={summary.ks_normal:.5f} ks_expansion={summary.ks_expansion:.5f} "
        f"clipped={summary.clipped_count} -> {prefix}_*"
    )
    return 0


def _cmd_verify_constants(args) -> int:
    cfg = _load_config(args)
    thetas = _parse_float_list(_merge(args, cfg, "thetas", "1,2"))
    hursts = _parse_float_list(_merge(args, cfg, "hursts", "0.55,0.6,0.625,0.7"))
    spec = _quad_from(args, cfg)
    out = _merge(args, cfg, "out", None)
    rows = []
    worst = 0.0
    for theta in thetas:
        for hurst in hursts:
            params = KernelParams(theta=theta, hurst=hurst)
            closed = cu2_closed_form(params)
            quad = cu2_quadrature(params, spec)
            rel = abs(float(quad) - closed) / closed
            worst = max(worst, rel)
            rows.append([theta, hurst, closed, float(quad), rel])
    _write_csv(out, ["theta", "H", "c0_closed", "c0_quad", "rel_err"], rows)
    print(f"verify-constants: {len(rows)} points, worst relative error {worst:.3e} -> {out}")
    return 0


def _cmd_verify_gamma(args) -> int:
    cfg = _load_config(args)
    theta = float(_merge(args, cfg, "theta", None))
    hurst = float(_merge(args, cfg, "hurst", None))
    horizons = _parse_float_list(_merge(args, cfg, "horizons", "50,100,200,400"))
    spec = _quad_from(args, cfg)
    out = _merge(args, cfg, "out", None)
    params = KernelParams(theta=theta, hurst=hurst)
    c0 = cu2_closed_form(params)
    c2 = c2_closed_form(theta, hurst)
    rows = []
    for horizon in horizons:
        g2 = float(gamma2_finite_T(params, horizon, spec))
        residual = (g2 - c0) / horizon ** (4 * hurst - 3)
        rows.append([theta, hurst, horizon, g2, c0, c2, residual])
    _write_csv(out, ["theta", "H", "T", "gamma2", "c0", "c2", "residual_ratio"], rows)
    print(f"verify-gamma: theta={theta} H={hurst} ({len(rows)} horizons) -> {out}")
    return 0


def _cmd_reproduce_figure(args) -> int:
    cfg = _load_config(args)
    fig_id = int(_merge(args, cfg, "id", None))
    if fig_id not in FIGURE_MAP:
        raise ConfigError(f"figure id must be one of {sorted(FIGURE_MAP)}, got {fig_id}")
    hurst, horizon = FIGURE_MAP[fig_id]
    model = ModelParams(
        theta=2.0,
        sigma=float(_merge(args, cfg, "sigma", 1.0)),
        hurst=hurst,
        x0=float(_merge(args, cfg, "x0", 1.0)),
    )
    mc_cfg = McConfig(
        params=model,
        horizon=horizon,
        replications=int(_merge(args, cfg, "replications", 10_000)),
        seed=int(_merge(args, cfg, "seed", 7)),
        beta=_beta_from(args, cfg),
        bins=int(_merge(args, cfg, "bins", 60)),
    )
    constants = assemble_constants(model, mc_cfg.beta, _quad_from(args, cfg))
    summary = run_experiment(mc_cfg, constants, getattr(args, "threads", None))
    outdir = Path(_merge(args, cfg, "outdir", "figures"))
    outdir.mkdir(parents=True, exist_ok=True)
    prefix = str(outdir / f"figure{fig_id}")
    plot = str(outdir / f"figure{fig_id}.svg") if getattr(args, "plot_svg", False) else ""
    _mc_outputs(summary, constants, mc_cfg, prefix, None, plot)
    print(
        f"figure {fig_id} (H={hurst}, T={horizon}): ks_normal={summary.ks_normal:.5f} "
        f"ks_expansion={summary.ks_expansion:.5f} -> {prefix}_*"
    )
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _add_model_flags(sub, with_hurst: bool = True) -> None:
    sub.add_argument("--theta", type=float)
    sub.add_argument("--sigma", type=float)
    if with_hurst:
        sub.add_argument("--hurst", "--H", dest="hurst", type=float)
    sub.add_argument("--x0", type=float)


def _add_estimator_flags(sub) -> None:
    sub.add_argument("--theta-lo", dest="theta_lo", type=float)
    sub.add_argument("--theta-hi", dest="theta_hi", type=float)
    sub.add_argument("--theta-star", dest="theta_star", type=float)
    sub.add_argument("--beta", choices=["zero", "bias_correct", "constant"])
    sub.add_argument("--beta-value", dest="beta_value", type=float)


def _add_quadrature_flags(sub) -> None:
    sub.add_argument("--rel-tol", dest="rel_tol", type=float)
    sub.add_argument("--abs-tol", dest="abs_tol", type=float)
    sub.add_argument("--max-subdivisions", dest="max_subdivisions", type=int)
    sub.add_argument("--tail-cutoff", dest="tail_cutoff", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foudrift",
        description="Fractional Ornstein-Uhlenbeck drift estimation and "
                    "second-order expansion densities",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("simulate", help="simulate fgn/fbm/fou paths to CSV")
    sub.add_argument("--config")
    sub.add_argument("--kind", choices=["fou", "fbm", "fgn"])
    _add_model_flags(sub)
    sub.add_argument("--horizon", "--T", dest="horizon", type=float)
    sub.add_argument("--steps", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=_cmd_simulate)

    sub = subs.add_parser("estimate", help="estimate the drift from a path CSV")
    sub.add_argument("--config")
    sub.add_argument("--input", required=True)
    sub.add_argument("--sigma", type=float)
    sub.add_argument("--hurst", "--H", dest="hurst", type=float)
    sub.add_argument("--x0", type=float)
    _add_estimator_flags(sub)
    sub.add_argument("--out")
    sub.set_defaults(func=_cmd_estimate)

    sub = subs.add_parser("constants", help="emit every expansion constant as JSON/CSV")
    sub.add_argument("--config")
    _add_model_flags(sub)
    _add_estimator_flags(sub)
    _add_quadrature_flags(sub)
    sub.add_argument("--out")
    sub.add_argument("--csv-out", dest="csv_out")
    sub.set_defaults(func=_cmd_constants)

    sub = subs.add_parser("density", help="tabulate the expansion densities on a grid")
    sub.add_argument("--config")
    _add_model_flags(sub)
    _add_estimator_flags(sub)
    _add_quadrature_flags(sub)
    sub.add_argument("--horizon", "--T", dest="horizon", type=float)
    sub.add_argument("--grid")
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=_cmd_density)

    sub = subs.add_parser("mc", help="replicated simulation-estimation experiment")
    sub.add_argument("--config")
    _add_model_flags(sub)
    _add_estimator_flags(sub)
    _add_quadrature_flags(sub)
    sub.add_argument("--horizon", "--T", dest="horizon", type=float)
    sub.add_argument("--steps", type=int)
    sub.add_argument("--replications", "-N", dest="replications", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--bins", type=int)
    sub.add_argument("--estimator", choices=["hat", "tilde"])
    sub.add_argument("--threads", type=int)
    sub.add_argument("--out-prefix", dest="out_prefix")
    sub.add_argument("--overlay-grid", dest="overlay_grid")
    sub.add_argument("--plot")
    sub.add_argument("--variance-check", dest="variance_check", action="store_const",
                     const=True)
    sub.set_defaults(func=_cmd_mc)

    sub = subs.add_parser("verify-constants",
                          help="cross-check the order-2 constant: closed form vs quadrature")
    sub.add_argument("--config")
    sub.add_argument("--thetas")
    sub.add_argument("--hursts")
    _add_quadrature_flags(sub)
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=_cmd_verify_constants)

    sub = subs.add_parser("verify-gamma",
                          help="finite-horizon second moment against its limit expansion")
    sub.add_argument("--config")
    sub.add_argument("--theta", type=float)
    sub.add_argument("--hurst", "--H", dest="hurst", type=float)
    sub.add_argument("--horizons")
    _add_quadrature_flags(sub)
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=_cmd_verify_gamma)

    sub = subs.add_parser("reproduce-figure",
                          help="one-command reproduction of a simulation-study panel")
    sub.add_argument("--config")
    sub.add_argument("--id", type=int)
    sub.add_argument("--replications", "--reps", dest="replications", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--sigma", type=float)
    sub.add_argument("--x0", type=float)
    sub.add_argument("--bins", type=int)
    sub.add_argument("--beta", choices=["zero", "bias_correct", "constant"])
    sub.add_argument("--beta-value", dest="beta_value", type=float)
    _add_quadrature_flags(sub)
    sub.add_argument("--threads", type=int)
    sub.add_argument("--outdir")
    sub.add_argument("--plot-svg", dest="plot_svg", action="store_true")
    sub.set_defaults(func=_cmd_reproduce_figure)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
