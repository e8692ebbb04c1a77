"""Command-line interface.

Subcommands: compile, verify, mlp, pde-error, sampler-check, interp-build.
Exit codes: 0 on success, 1 when a requested check fails, 2 on usage errors.
The default seed comes from the PICARDNETS_SEED environment variable when a
--seed flag is omitted (falling back to 0).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .activations import Activation, parse_activation
from .calculus import affine, compose, fan_in, parallelize
from .compiler import (
    CompileInputs,
    compile_mlp,
    prune_zero_blocks,
    report_json,
    size_report,
    verify_equivalence,
)
from .engine import MlpConfig, ProblemFns, mlp_estimate_batch
from .identities import default_identity, monomial_net
from .interp import (
    Grid,
    LipschitzFn,
    approx_net_leaky,
    approx_net_relu,
    approx_net_softplus,
    interp_net_leaky,
    interp_net_relu,
    interp_net_softplus,
)
from .network import Network, load_network, param_count, realize, save_network
from .pde import (
    PdeProblem,
    brownian_moment_check,
    convergence_experiment,
    rows_to_csv,
)
from .sampling import RandomOracle

# Grid used when the squared-norm datum must be approximated per coordinate
# (every activation family except repu:2, which represents it exactly).
QUADRATIC_DATUM_RANGE = 8.0
QUADRATIC_DATUM_CELLS = 160


def _default_seed() -> int:
    raw = os.environ.get("PICARDNETS_SEED", "0")
    try:
        return int(raw)
    except ValueError as exc:
        raise SystemExit(f"PICARDNETS_SEED must be an integer, got {raw!r}") from exc


def _square_net_1d(act: Activation) -> Network:
    """One-hidden-layer approximation of s -> s**2 on the documented grid."""
    pts = np.linspace(-QUADRATIC_DATUM_RANGE, QUADRATIC_DATUM_RANGE, QUADRATIC_DATUM_CELLS + 1)
    grid = Grid(pts)
    values = pts**2
    if act.kind in ("relu", "leaky_relu"):
        if act.kind == "relu":
            return interp_net_relu(grid, values)
        return interp_net_leaky(grid, values, act.alpha)
    # softplus: sharpness from the cell-error target of the underlying grid
    lip = 2.0 * QUADRATIC_DATUM_RANGE
    cell_err = 2.0 * lip * QUADRATIC_DATUM_RANGE / QUADRATIC_DATUM_CELLS
    beta = max(2.0, 2.0 * QUADRATIC_DATUM_CELLS**2 * lip * math.log(2.0) / cell_err)
    return interp_net_softplus(grid, values, beta)


def _quadratic_datum_net(d: int, act: Activation) -> Network:
    if act.kind == "repu":
        if act.gamma != 2:
            raise ValueError("the quadratic datum is exact only for repu:2; use --g file:PATH")
        per_coord = monomial_net(2)
    else:
        per_coord = _square_net_1d(act)
    return compose(fan_in(1, d), parallelize([per_coord] * d))


def _parse_g_net(tag: str, d: int, act: Activation) -> Network:
    if tag == "quadratic":
        return _quadratic_datum_net(d, act)
    kind, _, path = tag.partition(":")
    if kind == "file" and path:
        net, net_act = load_network(path)
        if net_act.tag() != act.tag():
            raise ValueError(
                f"datum network was saved for {net_act.tag()}, not {act.tag()}"
            )
        return net
    raise ValueError(f"--g must be 'quadratic' or 'file:PATH', got {tag!r}")


def _parse_f_net(tag: str, act: Activation) -> Network:
    if tag == "zero":
        return affine([[0.0]], [0.0])
    kind, _, arg = tag.partition(":")
    if kind == "linear" and arg:
        return affine([[float(arg)]], [0.0])
    if kind == "interp" and arg:
        net, net_act = load_network(arg)
        if net_act.tag() != act.tag():
            raise ValueError(
                f"nonlinearity network was saved for {net_act.tag()}, not {act.tag()}"
            )
        return net
    raise ValueError(f"--f must be 'zero', 'linear:LAMBDA', or 'interp:PATH', got {tag!r}")


def _compile_inputs(args: argparse.Namespace) -> CompileInputs:
    act = parse_activation(args.activation)
    g_net = _parse_g_net(args.g, args.d, act)
    f_net = _parse_f_net(args.f, act)
    return CompileInputs(
        n=args.n,
        M=args.m,
        horizon=args.horizon,
        d=args.d,
        g_net=g_net,
        f_net=f_net,
        j_net=default_identity(act),
        activation=act,
        oracle=RandomOracle(args.seed, args.d),
    )


def _add_compile_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--d", type=int, required=True, help="space dimension")
    sub.add_argument("--n", type=int, required=True, help="estimator level")
    sub.add_argument("--m", type=int, required=True, help="branching factor")
    sub.add_argument("--t", type=float, required=True, help="evaluation time")
    sub.add_argument("--horizon", type=float, required=True, help="final time")
    sub.add_argument(
        "--activation",
        required=True,
        help="relu | leaky:ALPHA | softplus | repu:GAMMA",
    )
    sub.add_argument("--g", default="quadratic", help="quadratic | file:PATH")
    sub.add_argument("--f", default="zero", help="zero | linear:LAMBDA | interp:PATH")
    sub.add_argument("--seed", type=int, default=None, help="oracle seed (default: env)")
    sub.add_argument(
        "--allow-large",
        action="store_true",
        help="compile even when the parameter bound exceeds 1e8",
    )


def _cmd_compile(args: argparse.Namespace) -> int:
    inputs = _compile_inputs(args)
    net = compile_mlp(inputs, (0,), args.t, allow_large=args.allow_large)
    report = size_report(inputs, net)
    if args.prune:
        net = prune_zero_blocks(net)
        report = size_report(inputs, net)
    save_network(args.out, net, inputs.activation)
    if args.report:
        Path(args.report).write_text(report_json(report) + "\n")
    if not report.within_bounds():
        print(report_json(report))
        return 1
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    inputs = _compile_inputs(args)
    report = verify_equivalence(
        inputs, (0,), args.t, probes=args.probes, tol=args.tol, allow_large=args.allow_large
    )
    print(report_json(report))
    return 0 if report.passed else 1


def _read_points(path: str, d: int) -> np.ndarray:
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        rows.append([float(v) for v in line.split(",")])
    pts = np.asarray(rows, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != d:
        raise ValueError(f"points file must have {d} comma-separated values per line")
    return pts


def _cmd_mlp(args: argparse.Namespace) -> int:
    pts = _read_points(args.points, args.d)
    seeds = [int(v) for v in args.seeds.split(",") if v]
    if not seeds:
        raise ValueError("--seeds needs at least one integer")
    if args.f == "zero":
        f = lambda v: 0.0  # noqa: E731
    else:
        kind, _, arg = args.f.partition(":")
        if kind != "linear" or not arg:
            raise ValueError(f"--f must be 'zero' or 'linear:LAMBDA', got {args.f!r}")
        lam = float(arg)
        f = lambda v: lam * v  # noqa: E731
    if args.g == "quadratic":
        g = lambda x: float(x @ x)  # noqa: E731
    elif args.g == "gaussian-bump":
        g = lambda x: float(np.exp(-(x @ x)))  # noqa: E731
    else:
        raise ValueError(f"--g must be 'quadratic' or 'gaussian-bump', got {args.g!r}")
    cfg = MlpConfig(n=args.n, M=args.m, horizon=args.horizon, t=args.t, d=args.d)
    table = mlp_estimate_batch(cfg, pts, seeds, ProblemFns(f=f, g=g))
    lines = ["seed,point,value"]
    for i, seed in enumerate(seeds):
        for j in range(pts.shape[0]):
            lines.append(f"{seed},{j},{float(table[i, j])!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _parse_levels(text: str) -> list[tuple[int, int]]:
    levels = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        n_str, _, m_str = chunk.partition(":")
        if not m_str:
            raise ValueError(f"levels entry {chunk!r} must look like N:M")
        levels.append((int(n_str), int(m_str)))
    if not levels:
        raise ValueError("--levels needs at least one N:M entry")
    return levels


def _cmd_pde_error(args: argparse.Namespace) -> int:
    if args.problem != "heat-quadratic":
        raise ValueError(f"unknown problem {args.problem!r}")
    if args.f == "zero":
        f_kind, lam = "zero", 0.0
    else:
        kind, _, arg = args.f.partition(":")
        if kind != "linear" or not arg:
            raise ValueError(f"--f must be 'zero' or 'linear:LAMBDA', got {args.f!r}")
        f_kind, lam = "linear", float(arg)
    lo, _, hi = args.box.partition(",")
    problem = PdeProblem(
        d=args.d,
        horizon=args.horizon,
        c=args.c,
        f_kind=f_kind,
        lam=lam,
        g_kind="quadratic",
        box=(float(lo), float(hi)),
        direction="terminal",
    )
    seeds = [int(v) for v in args.seeds.split(",") if v]
    rows = convergence_experiment(
        problem,
        _parse_levels(args.levels),
        seeds,
        args.samples,
        args.p,
        workers=args.workers,
    )
    Path(args.out).write_text(rows_to_csv(rows))
    return 0


def _cmd_sampler_check(args: argparse.Namespace) -> int:
    report = brownian_moment_check(args.d, args.s, args.gamma, args.samples, args.seed)
    print(json.dumps(report, sort_keys=True, allow_nan=False))
    return 0 if report["passed"] else 1


_AUDIT_GRID = 2001
_AUDIT_SPAN = 50.0


def _audit_interp(
    net: Network, act: Activation, fn, lip: float, q: float, eps: float, factor: float
) -> dict:
    xs = np.linspace(-_AUDIT_SPAN, _AUDIT_SPAN, _AUDIT_GRID)
    got = np.empty_like(xs)
    for start in range(0, xs.size, 256):
        chunk = xs[start : start + 256]
        got[start : start + 256] = realize(net, act, chunk[:, None])[:, 0]
    weight = np.maximum(1.0, np.abs(xs) ** q)
    weighted = np.abs(got - fn(xs)) / weight
    quotients = np.abs(np.diff(got)) / np.diff(xs)
    target = factor * eps * (1.0 + 1.0e-9)
    return {
        "weighted_error": float(weighted.max()),
        "weighted_error_bound": target,
        "lipschitz_sample": float(quotients.max()),
        "lipschitz_bound": lip * (1.0 + 1.0e-9) + 1.0e-12,
    }


_FN_TABLE = {
    "sin": (np.sin, 1.0),
    "cos": (np.cos, 1.0),
    "abs": (np.abs, 1.0),
}


def _cmd_interp_build(args: argparse.Namespace) -> int:
    if args.fn not in _FN_TABLE:
        raise ValueError(f"--fn must be one of {sorted(_FN_TABLE)}, got {args.fn!r}")
    fn, lip = _FN_TABLE[args.fn]
    lip = args.L if args.L is not None else lip
    act = parse_activation(args.activation)
    target = LipschitzFn(fn=fn, lipschitz=lip)
    if act.kind == "relu":
        net, guarantee = approx_net_relu(target, args.q, args.eps)
        factor, width_scale, param_scale = 1.0, 2.0, 12.0
        width_extra = 1.0
    elif act.kind == "leaky_relu":
        net, guarantee = approx_net_leaky(target, args.q, args.eps, act.alpha)
        factor, width_scale, param_scale = 1.0, 4.0, 24.0
        width_extra = 2.0
    elif act.kind == "softplus":
        net, guarantee = approx_net_softplus(target, args.q, args.eps)
        factor, width_scale, param_scale = 2.0, 2.0, 12.0
        width_extra = 1.0
    else:
        raise ValueError("interp-build supports relu, leaky:ALPHA, and softplus only")
    base = max(1.0, 2.0 * lip) ** (args.q / (args.q - 1.0)) * args.eps ** (
        -args.q / (args.q - 1.0)
    )
    audit = _audit_interp(net, act, fn, lip, args.q, args.eps, factor)
    audit.update(
        {
            "eps": guarantee.eps,
            "q": guarantee.q,
            "b": guarantee.b,
            "K": guarantee.K,
            "width": guarantee.width,
            "params": guarantee.params,
            "width_bound": width_scale * base + width_extra,
            "params_bound": param_scale * base,
            "activation": act.tag(),
        }
    )
    passed = (
        audit["weighted_error"] <= audit["weighted_error_bound"]
        and audit["lipschitz_sample"] <= audit["lipschitz_bound"]
        and guarantee.width <= audit["width_bound"]
        and guarantee.params <= audit["params_bound"]
        and param_count(net) == guarantee.params
    )
    audit["passed"] = bool(passed)
    save_network(args.out, net, act)
    if args.report:
        Path(args.report).write_text(json.dumps(audit, sort_keys=True, allow_nan=False) + "\n")
    print(json.dumps(audit, sort_keys=True, allow_nan=False))
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="picardnets", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("compile", help="compile an estimator into one network file")
    _add_compile_flags(sub)
    sub.add_argument("--out", required=True, help="output network JSON path")
    sub.add_argument("--report", default=None, help="optional size report JSON path")
    sub.add_argument("--prune", action="store_true", help="drop zero-wired hidden units")
    sub.set_defaults(handler=_cmd_compile)

    sub = subs.add_parser("verify", help="compile and compare against the estimator")
    _add_compile_flags(sub)
    sub.add_argument("--probes", type=int, default=20, help="number of probe points")
    sub.add_argument("--tol", type=float, default=1.0e-8, help="relative residual tolerance")
    sub.set_defaults(handler=_cmd_verify)

    sub = subs.add_parser("mlp", help="run the estimator over a batch of points")
    sub.add_argument("--d", type=int, required=True)
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--m", type=int, required=True)
    sub.add_argument("--t", type=float, required=True)
    sub.add_argument("--horizon", type=float, required=True)
    sub.add_argument("--f", default="zero", help="zero | linear:LAMBDA")
    sub.add_argument("--g", default="quadratic", help="quadratic | gaussian-bump")
    sub.add_argument("--points", required=True, help="CSV file, one point per line")
    sub.add_argument("--seeds", required=True, help="comma-separated oracle seeds")
    sub.add_argument("--out", default=None, help="output CSV (default: stdout)")
    sub.set_defaults(handler=_cmd_mlp)

    sub = subs.add_parser("pde-error", help="convergence experiment against a reference")
    sub.add_argument("--problem", default="heat-quadratic")
    sub.add_argument("--d", type=int, default=5)
    sub.add_argument("--horizon", type=float, default=1.0)
    sub.add_argument("--c", type=float, default=0.5)
    sub.add_argument("--f", default="zero", help="zero | linear:LAMBDA")
    sub.add_argument("--box", default="0,1", help="LOW,HIGH box for sampling")
    sub.add_argument("--p", type=float, default=2.0)
    sub.add_argument("--levels", required=True, help="comma list of N:M, e.g. 1:1,2:2,3:3")
    sub.add_argument("--seeds", required=True, help="comma-separated oracle seeds")
    sub.add_argument("--samples", type=int, required=True, help="evaluation point count")
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--out", required=True, help="output CSV path")
    sub.set_defaults(handler=_cmd_pde_error)

    sub = subs.add_parser("sampler-check", help="moment test of the Brownian sampler")
    sub.add_argument("--d", type=int, required=True)
    sub.add_argument("--gamma", type=int, required=True)
    sub.add_argument("--s", type=float, default=1.0)
    sub.add_argument("--samples", type=int, default=100_000)
    sub.add_argument("--seed", type=int, default=None)
    sub.set_defaults(handler=_cmd_sampler_check)

    sub = subs.add_parser("interp-build", help="build and audit an approximation network")
    sub.add_argument("--fn", required=True, help=f"one of {sorted(_FN_TABLE)}")
    sub.add_argument("--L", type=float, default=None, help="Lipschitz constant override")
    sub.add_argument("--q", type=float, required=True, help="growth exponent, > 1")
    sub.add_argument("--eps", type=float, required=True, help="error target in (0, 1]")
    sub.add_argument("--activation", required=True, help="relu | leaky:ALPHA | softplus")
    sub.add_argument("--out", required=True, help="output network JSON path")
    sub.add_argument("--report", default=None, help="optional audit JSON path")
    sub.set_defaults(handler=_cmd_interp_build)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "seed") and args.seed is None:
        args.seed = _default_seed()
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
