"""Command-line front end: seeded experiments with CSV/JSON output.

Subcommands: phase | theta | lambda-c | degree | distance | boxes |
renorm | oracle-check.  Every run writes its CSV files plus a
manifest.json into --out; outputs are byte-identical for a fixed
(config, seed) regardless of --threads.

Exit codes: 0 success, 2 config error, 3 oracle-check failure,
4 resource-budget refusal.
"""

import argparse
import math
import os
import sys

import numpy as np

from . import metrics, oracle, renorm
from .edges import sample_graph
from .params import BoxSpec, classify_phase, make_params, sample_weights
from .rng import substream
from .runio import (
    ConfigError,
    ConfigView,
    ResourceBudgetError,
    RunWriter,
    load_config,
)

try:
    from importlib.metadata import version as _pkg_version

    VERSION = _pkg_version("lrperc")
except Exception:  # not installed; running from a checkout
    VERSION = "0.0.0+local"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ACCEPTANCE = 3
EXIT_BUDGET = 4

DEFAULT_PAIR_BUDGET = 5e8


def _model_params(view: ConfigView, need_lambda: bool = True):
    d = view.get_int("model.d", required=True)
    alpha = view.get_float("model.alpha", required=True)
    beta = view.get_float("model.beta", required=True)
    lam = view.get_float("model.lambda", required=need_lambda, default=1.0)
    return make_params(d=d, alpha=alpha, beta=beta, lam=lam)


def _check_pair_budget(n_vertices: int, budget: float):
    pairs = n_vertices * (n_vertices - 1) / 2
    if pairs > budget:
        raise ResourceBudgetError(
            f"{n_vertices} vertices imply {pairs:.2e} pair evaluations "
            f"(budget {budget:.0e}); shrink the box or raise max_pairs"
        )


def cmd_phase(view: ConfigView, writer: RunWriter, seed: int, threads: int) -> int:
    d = view.get_int("phase.d", required=True)
    alphas = view.get_float_list("phase.alpha_grid", default=[])
    betas = view.get_float_list("phase.beta_grid", default=[])
    view.finish()
    rows = []
    counts = {}
    for alpha in alphas:
        for beta in betas:
            p = make_params(d=d, alpha=alpha, beta=beta, lam=1.0)
            cls = classify_phase(p).value
            rows.append([alpha, beta, alpha * beta, cls])
            counts[cls] = counts.get(cls, 0) + 1
    writer.add_csv("phase.csv", ["alpha", "beta", "alpha_beta", "class"], rows, "phase")
    writer.add_json("phase_summary.json", {"d": d, "counts": counts, "n_points": len(rows)})
    return EXIT_OK


def cmd_theta(view: ConfigView, writer: RunWriter, seed: int, threads: int) -> int:
    params = _model_params(view, need_lambda=False)
    grid = view.get_float_list("theta.lambda_grid", required=True)
    radius = view.get_int("theta.box_radius", required=True)
    replicates = view.get_int("theta.replicates", default=200)
    proxy = view.get_str(
        "theta.proxy", default="BoundaryReach",
        choices=["BoundaryReach", "LargestClusterMembership"],
    )
    rho0 = view.get_float("theta.rho0", default=0.05)
    budget = view.get_float("theta.max_pairs", default=DEFAULT_PAIR_BUDGET)
    view.finish()
    n = (2 * radius + 1) ** params.d
    _check_pair_budget(n, budget)
    zero_rows = []
    positive = [x for x in grid if x > 0]
    if any(x < 0 for x in grid):
        raise ConfigError("lambda grid entries must be >= 0")
    if len(positive) < len(grid):  # lambda = 0 rows are exact
        zero_rows = [[0.0, 0.0, 0.0, 0.0, replicates, radius, proxy]]
    rows = list(zero_rows)
    if positive:
        curve = metrics.theta_curve(
            params, positive, radius, replicates, base_seed=seed,
            proxy=proxy, rho0=rho0, threads=threads,
        )
        for est in curve:
            rows.append(
                [est.lam, est.estimate, est.ci_low, est.ci_high,
                 est.replicates, est.box_radius, est.proxy]
            )
    writer.add_csv(
        "theta.csv",
        ["lambda", "estimate", "ci_low", "ci_high", "replicates", "box_radius", "proxy"],
        rows, "theta",
    )
    return EXIT_OK


def cmd_lambda_c(view: ConfigView, writer: RunWriter, seed: int, threads: int) -> int:
    params = _model_params(view, need_lambda=False)
    radii = view.get_int_list("lambda_c.radii", required=True)
    tol = view.get_float("lambda_c.tol", default=0.05)
    level = view.get_float("lambda_c.crossing_level", default=0.5)
    replicates = view.get_int("lambda_c.replicates", default=200)
    view.finish()
    report = metrics.estimate_lambda_c(
        params, radii, crossing_level=level, tol=tol,
        replicates=replicates, base_seed=seed, threads=threads,
    )
    rows = [
        [r, lo, hi, level, replicates]
        for r, (lo, hi) in zip(report.radii, report.brackets)
    ]
    writer.add_csv(
        "lambda_c.csv",
        ["radius", "bracket_low", "bracket_high", "crossing_level", "replicates"],
        rows, "lambda_c",
    )
    return EXIT_OK


def cmd_degree(view: ConfigView, writer: RunWriter, seed: int, threads: int) -> int:
    params = _model_params(view)
    side = view.get_int("degree.side", required=True)
    n_seeds = view.get_int("degree.seeds", default=1)
    k_top = view.get_int("degree.k_top", default=None)
    mode = view.get_str("degree.mode", default="exact", choices=["exact", "truncated"])
    radius = view.get_float("degree.radius", default=None)
    budget = view.get_float("degree.max_pairs", default=DEFAULT_PAIR_BUDGET)
    view.finish()
    box = BoxSpec.corner((0,) * params.d, side)
    if mode == "exact":
        _check_pair_budget(box.n_vertices, budget)
    deg_rows = []
    tail_rows = []
    for s in range(n_seeds):
        wf = sample_weights(box, params.beta, substream(seed, s, 1))
        el = sample_graph(
            box, wf, params, seed=substream(seed, s, 2), mode=mode, radius=radius
        )
        degrees = metrics.degree_histogram(el)
        for v, dv in enumerate(degrees.tolist()):
            deg_rows.append([s, v, dv])
        try:
            est = metrics.tail_exponent(degrees, k_top=k_top, theoretical_tau=params.tau)
        except ValueError:
            continue  # degenerate sample (e.g. lambda = 0); no tail row
        tail_rows.append(
            [s, est.tau_hat, est.k_top, est.ci_low, est.ci_high, est.theoretical_tau]
        )
    writer.add_csv("degrees.csv", ["seed", "vertex", "degree"], deg_rows, "degrees")
    writer.add_csv(
        "degree_tail.csv",
        ["seed", "tau_hat", "k_top", "ci_low", "ci_high", "theoretical_tau"],
        tail_rows, "degree_tail",
    )
    return EXIT_OK


def cmd_distance(view: ConfigView, writer: RunWriter, seed: int, threads: int) -> int:
    params = _model_params(view)
    radii = view.get_int_list("distance.radii", required=True)
    replicates = view.get_int("distance.replicates", default=100)
    budget = view.get_float("distance.max_pairs", default=DEFAULT_PAIR_BUDGET)
    view.finish()
    if radii:
        _check_pair_budget((4 * max(radii) + 1) ** params.d, budget)
    report = metrics.distance_scaling_report(
        params, radii, replicates, base_seed=seed, threads=threads
    )
    rows = [
        [report.regime, r.radius, r.q25, r.median, r.q75, r.n_conditioned,
         report.theory_upper]
        for r in report.rows
    ]
    writer.add_csv(
        "distance.csv",
        ["regime", "radius", "q25", "median", "q75", "n_conditioned", "theory_upper"],
        rows, "distance",
    )
    return EXIT_OK


def cmd_boxes(view: ConfigView, writer: RunWriter, seed: int, threads: int) -> int:
    params = _model_params(view)
    alpha_prime = view.get_float("boxes.alpha_prime", required=True)
    rho = view.get_float("boxes.rho", required=True)
    m_list = view.get_int_list("boxes.m_list", required=True)
    replicates = view.get_int("boxes.replicates", default=200)
    budget = view.get_float("boxes.max_pairs", default=DEFAULT_PAIR_BUDGET)
    view.finish()
    if m_list:
        _check_pair_budget(max(m_list) ** params.d, budget)
    rows = [
        [r.m, r.rho, r.frequency, r.ci_low, r.ci_high, r.bound, r.flagged]
        for r in metrics.box_theorem_check(
            params, alpha_prime, rho, m_list, replicates,
            base_seed=seed, threads=threads,
        )
    ]
    writer.add_csv(
        "boxes.csv",
        ["m", "rho", "frequency", "ci_low", "ci_high", "bound", "flagged"],
        rows, "boxes",
    )
    return EXIT_OK


def cmd_renorm(view: ConfigView, writer: RunWriter, seed: int, threads: int) -> int:
    params = _model_params(view)
    a0 = view.get_int("renorm.a0", required=True)
    level = view.get_int("renorm.level", default=0)
    replicates = view.get_int("renorm.replicates", default=100)
    budget = view.get_float("renorm.max_pairs", default=DEFAULT_PAIR_BUDGET)
    view.finish()
    schedule = renorm.renorm_schedule(a0, max(level, 1))
    est = renorm.estimate_psi(
        params, schedule, level, replicates,
        base_seed=seed, max_pairs=budget, threads=threads,
    )
    rows = [[est.level, est.a0, est.psi_hat, est.ci_low, est.ci_high,
             est.replicates, renorm.psi_bound(level, params.d)]]
    writer.add_csv(
        "renorm.csv",
        ["level", "a0", "psi_hat", "ci_low", "ci_high", "replicates", "psi_bound"],
        rows, "renorm",
    )
    return EXIT_OK


def cmd_oracle_check(view: ConfigView, writer: RunWriter, seed: int, threads: int) -> int:
    replicates = view.get_int("oracle.replicates", default=20000)
    z_max = view.get_float("oracle.z_max", default=3.0)
    view.finish()
    rows = []
    worst = 0.0
    for idx, (instance, target) in enumerate(oracle.standard_suite()):
        rep = oracle.oracle_vs_mc(
            instance, target, mc_replicates=replicates, seed=substream(seed, idx)
        )
        worst = max(worst, abs(rep.z))
        rows.append(
            [instance.name, target, rep.exact, rep.mc, rep.sigma, rep.z,
             abs(rep.z) <= z_max]
        )
    writer.add_csv(
        "oracle_check.csv",
        ["instance", "target", "exact", "mc", "sigma", "z", "pass"],
        rows, "oracle_check",
    )
    writer.add_json(
        "oracle_summary.json",
        {"replicates": replicates, "z_max": z_max, "worst_abs_z": worst,
         "passed": bool(worst <= z_max)},
    )
    return EXIT_OK if worst <= z_max else EXIT_ACCEPTANCE


_COMMANDS = {
    "phase": cmd_phase,
    "theta": cmd_theta,
    "lambda-c": cmd_lambda_c,
    "degree": cmd_degree,
    "distance": cmd_distance,
    "boxes": cmd_boxes,
    "renorm": cmd_renorm,
    "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lrperc",
        description="Long-range percolation simulations with heavy-tailed weights.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="flat key=value config file")
    parser.add_argument("--seed", type=int, default=0, help="base seed (u64)")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--out", default=".", help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        seed = args.seed
        env_seed = os.environ.get("PERC_SEED")
        if env_seed is not None:
            try:
                seed = int(env_seed)
            except ValueError:
                raise ConfigError(f"PERC_SEED must be an integer, got {env_seed!r}")
        if not 0 <= seed < 1 << 64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        writer = RunWriter(args.out, config, seed, VERSION)
        view = ConfigView(config)
        code = _COMMANDS[args.command](view, writer, seed, args.threads)
        writer.finalize()
        return code
    except ResourceBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
