"""Command-line entry point: ``boxball <command> [flags]``.

Exit codes: 0 success or check passed, 1 a check failed its tolerance,
2 usage error.  Every output starts with ``#`` header lines recording the
command, flags, seed and version unless ``--no-header`` is given.
"""
from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.12g}"


def _number(text: str):
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    return float(text)


def _densities(args) -> tuple:
    """Resolve --p / --p1 / --uniform / --q into p_0..p_kappa."""
    given = [x for x in ("p", "p1", "uniform", "q") if getattr(args, x, None) not in (None, False)]
    if len(given) != 1:
        raise UsageError("give exactly one of --p, --p1, --uniform, --q")
    kappa = getattr(args, "kappa", None)
    if args.p is not None:
        p = tuple(_number(v) for v in args.p.split(","))
    elif args.p1 is not None:
        p1 = _number(args.p1)
        p = (1 - p1, p1)
    elif args.uniform:
        if kappa is None:
            raise UsageError("--uniform needs --kappa")
        p = (Fraction(1, kappa + 1),) * (kappa + 1)
    else:
        if kappa is None:
            raise UsageError("--q needs --kappa")
        q = float(args.q)
        if not 0 < q < 1:
            raise UsageError("--q must lie in (0, 1)")
        norm = sum(q**a for a in range(kappa + 1))
        p = tuple(q**a / norm for a in range(kappa + 1))
    if kappa is not None and len(p) != kappa + 1:
        raise UsageError(f"--kappa {kappa} needs {kappa + 1} densities, got {len(p)}")
    if any(v <= 0 for v in p):
        raise UsageError("densities must be positive")
    if abs(float(sum(p)) - 1) > 1e-12:
        raise UsageError(f"densities sum to {float(sum(p))}, not 1")
    return p


def _add_density_flags(sp, kappa_required: bool = False):
    sp.add_argument("--kappa", type=int, required=kappa_required, help="number of ball colors")
    g = sp.add_argument_group("densities (exactly one)")
    g.add_argument("--p", help="comma list p0,...,pkappa; fractions like 1/3 allowed")
    g.add_argument("--p1", help="kappa=1 ball density")
    g.add_argument("--uniform", action="store_true", help="p_i = 1/(kappa+1)")
    g.add_argument("--q", help="principal densities p_a proportional to q^a")


def _header(args, seed=None) -> str:
    if getattr(args, "no_header", False):
        return ""
    flags = " ".join(
        f"{k}={v}" for k, v in sorted(vars(args).items())
        if k not in ("func", "command", "no_header", "seed") and v not in (None, False)
    )
    return f"# boxball {__version__} command={args.command} {flags} seed={seed if seed is not None else '-'}\n"


def _read_config(args):
    from .bbs import parse_configuration

    text = args.config
    if text is None:
        raise UsageError("--config is required")
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    try:
        return parse_configuration(text, args.kappa)
    except ValueError as e:
        raise UsageError(f"cannot parse configuration: {e}") from None


def cmd_evolve(args, out) -> int:
    from .bbs import format_configuration, trajectory

    if args.steps < 0:
        raise UsageError("--steps must be >= 0")
    x = _read_config(args)
    out.write(_header(args))
    traj = trajectory(x, args.steps)
    width = args.width
    for t, y in enumerate(traj):
        line = format_configuration(y, width=width)
        out.write((f"t={t}: " if args.label else "") + line + "\n")
    return EXIT_OK


def cmd_energy(args, out) -> int:
    from .carrier import (energy_matrix, energy_matrix_csv, vacancies, young_csv,
                          young_diagrams, young_svg)

    x = _read_config(args)
    out.write(_header(args))
    if x.total_balls == 0:
        out.write("c\n\na,i,rho,E,m\n")
        return EXIT_OK
    E = energy_matrix(x)
    Y = young_diagrams(E)
    out.write(energy_matrix_csv(E))
    out.write("\n")
    vac = None
    if args.n is not None:
        if args.n < len(x.normalized()):
            raise UsageError(f"--n {args.n} is shorter than the configuration")
        vac = vacancies(Y, args.n, check=False)
    out.write(young_csv(Y, vac))
    if vac is not None and min(min(r) for r in vac.values + (vac.at_infinity,)) < 0:
        out.write("# negative vacancies: not a highest state\n")
    if args.svg:
        for a in range(1, Y.kappa + 1):
            Path(f"{args.svg}_{a}.svg").write_text(young_svg(Y.rows(a)))
    return EXIT_OK


def cmd_shape(args, out) -> int:
    from .mc import empirical_shape, shape_curve, shape_distance, shape_svg
    from .rng import resolve_seed

    p = _densities(args)
    limit = shape_curve(p, args.imax)
    seed = resolve_seed(args.seed) if args.n else None
    out.write(_header(args, seed))
    out.write("a,i,eta\n")
    for a, pts in limit.items():
        for x, i in pts:
            out.write(f"{a},{i},{_fmt(x)}\n")
    curves = {f"limit a={a}": pts for a, pts in limit.items()}
    status = EXIT_OK
    if args.n:
        emp = empirical_shape(args.n, p, seed, args.imax)
        out.write("\na,i,rho_over_n\n")
        for a, pts in emp.items():
            for x, i in pts:
                out.write(f"{a},{i},{_fmt(x)}\n")
            curves[f"empirical a={a}"] = pts
        d = shape_distance(emp, limit)
        out.write(f"# sup distance {_fmt(d)}\n")
        if args.tol is not None and d > args.tol:
            status = EXIT_FAIL
    if args.svg:
        Path(args.svg).write_text(shape_svg(curves))
    return status


def cmd_ldp(args, out) -> int:
    from .ldp import (Lambda_prime_at_zero, build_joint_kernel, build_single_kernel, g_energy,
                      g_row, rate_csv, rate_function)

    p = _densities(args)
    if args.functional == "energy":
        P = build_single_kernel(args.c, args.a, p)
        g = g_energy(P.space)
    else:
        P = build_joint_kernel(args.c, args.a, p)
        g = g_row(P.space)
    anchor = Lambda_prime_at_zero(P, g)
    t_grid = np.arange(args.tmin, args.tmax + 1e-12, args.tstep)
    u_grid = np.arange(args.umin, args.umax + 1e-12, args.ustep)
    # the zero of the rate sits at the anchor, so always sample it
    u_grid = np.unique(np.append(u_grid, anchor))
    rf = rate_function(P, g, t_grid, u_grid)
    out.write(_header(args))
    out.write(f"# Lambda'(0) {_fmt(anchor)}; finite rate observed on u in {rf.finite_range()}\n")
    out.write(rate_csv(rf))
    if not args.check:
        return EXIT_OK
    at_anchor = float(rf.rate[np.searchsorted(rf.u, anchor)])
    second = np.diff(rf.Lambda, 2)
    ok = at_anchor <= 1e-8 and (second >= -1e-9).all() and (rf.rate >= -1e-12).all()
    out.write(f"# rate at anchor {_fmt(at_anchor)}; min second difference {_fmt(second.min())}\n")
    out.write(f"# check {'PASS' if ok else 'FAIL'}\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_tba(args, out) -> int:
    from .tba import (PrincipalParams, deq_residual, equation_of_state_residual,
                      q_system_residual, tba_csv, y_system_residual)

    if args.kappa is None or args.q is None:
        raise UsageError("tba needs --kappa and --q")
    try:
        params = PrincipalParams(float(args.q), args.kappa)
    except ValueError as e:
        raise UsageError(str(e)) from None
    out.write(_header(args))
    out.write(tba_csv(params, args.imax))
    if not args.check:
        return EXIT_OK
    worst = 0.0
    for a in range(1, args.kappa + 1):
        for i in range(1, args.imax + 1):
            worst = max(worst, abs(q_system_residual(i, a, params)),
                        abs(y_system_residual(i, a, params)), abs(deq_residual(i, a, params)))
    worst = max([worst] + [abs(r) for r in equation_of_state_residual(params.p)])
    ok = worst < 1e-10
    out.write(f"# max residual {_fmt(worst)}\n# check {'PASS' if ok else 'FAIL'}\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_ballot(args, out) -> int:
    from .highest import ballot_count, in_chamber

    try:
        m = [int(v) for v in args.m.split(",")]
    except ValueError:
        raise UsageError(f"--m expects comma-separated integers, got {args.m!r}") from None
    if not in_chamber(m):
        print(f"note: {tuple(m)} is outside the Weyl chamber", file=sys.stderr)
        out.write("0\n")
        return EXIT_OK
    out.write(f"{ballot_count(m)}\n")
    return EXIT_OK


def cmd_mc(args, out) -> int:
    from .mc import estimate_rows
    from .rng import resolve_seed

    p = _densities(args)
    seed = resolve_seed(args.seed)
    rows = [int(v) for v in args.rows.split(",")]
    rep = estimate_rows(args.n, p, args.a, rows, trials=args.trials, seed=seed,
                        conditioned=args.conditioned, tol=args.tol)
    out.write(_header(args, seed))
    out.write(rep.to_csv())
    for line in rep.summary().splitlines():
        out.write(f"# {line}\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_persistence(args, out) -> int:
    from .mc import persistence_experiment
    from .rng import resolve_seed

    p = _densities(args)
    seed = resolve_seed(args.seed)
    grid = [int(v) for v in args.n_grid.split(",")]
    rep = persistence_experiment(args.c, args.a, p, grid, args.trials, seed)
    out.write(_header(args, seed))
    out.write(rep.to_csv())
    ex = rep.extra
    for k in ("slope", "gamma2", "epsilon", "prefactor", "prefactor_ratio"):
        out.write(f"# {k} {_fmt(ex[k])}\n")
    if not args.check:
        return EXIT_OK
    ok_slope = -0.6 <= ex["slope"] <= -0.4
    ok_level = abs(ex["prefactor_ratio"] - 1) <= 0.25
    out.write(f"# slope check {'PASS' if ok_slope else 'FAIL'}; prefactor check {'PASS' if ok_level else 'FAIL'}\n")
    return EXIT_OK if ok_slope and ok_level else EXIT_FAIL


def cmd_highest(args, out) -> int:
    from .highest import decay_exponent, highest_frequency, prob_highest_exact, sample_highest
    from .bbs import format_configuration
    from .rng import resolve_seed

    p = _densities(args)
    seed = resolve_seed(args.seed)
    out.write(_header(args, seed))
    try:
        out.write(f"# decay exponent {decay_exponent(p)}\n")
    except ValueError:
        out.write("# decay exponent undefined (densities not weakly decreasing)\n")
    if args.sample:
        try:
            s = sample_highest(args.n, p, seed=seed, count=args.sample)
        except ValueError as e:
            raise UsageError(str(e)) from None
        out.write(f"# acceptance rate {_fmt(s.acceptance_rate)} over {s.draws} draws\n")
        for cfg in s.configs:
            out.write(format_configuration(cfg) + "\n")
        return EXIT_OK
    out.write("n,method,probability,stderr\n")
    if args.trials:
        f, se = highest_frequency(args.n, p, args.trials, seed)
        out.write(f"{args.n},monte_carlo,{_fmt(f)},{_fmt(se)}\n")
    else:
        try:
            v = prob_highest_exact(args.n, p)
        except OverflowError as e:
            raise UsageError(f"{e}; pass --trials for a Monte Carlo estimate") from None
        out.write(f"{args.n},exact,{_fmt(v)},0\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="boxball", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=f"boxball {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--no-header", action="store_true", help="omit the # provenance lines")

    sp = sub.add_parser("evolve", help="time evolution of a configuration")
    sp.add_argument("--config", help="digits like '1121401', or @file")
    sp.add_argument("--steps", type=int, default=1)
    sp.add_argument("--kappa", type=int)
    sp.add_argument("--width", type=int, help="pad or cut every line to this many sites")
    sp.add_argument("--label", action="store_true", help="prefix lines with t=")
    common(sp)
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("energy", help="energy matrix and invariant Young diagrams")
    sp.add_argument("--config", help="digits like '1121401', or @file")
    sp.add_argument("--kappa", type=int)
    sp.add_argument("--n", type=int, help="system size for the vacancy column")
    sp.add_argument("--svg", help="write PREFIX_a.svg diagram outlines")
    common(sp)
    sp.set_defaults(func=cmd_energy)

    sp = sub.add_parser("shape", help="limit shape curves, optionally against one sample")
    _add_density_flags(sp)
    sp.add_argument("--imax", type=int, default=20)
    sp.add_argument("--n", type=int, help="also sample one configuration of this length")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--tol", type=float, help="fail if the sup distance exceeds this")
    sp.add_argument("--svg")
    common(sp)
    sp.set_defaults(func=cmd_shape)

    sp = sub.add_parser("ldp", help="Lambda(t) and its Legendre transform")
    _add_density_flags(sp)
    sp.add_argument("--c", type=int, default=1)
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--functional", choices=["energy", "row"], default="energy",
                    help="energy: E_c on the single chain; row: rho_{c+1} on the joint chain")
    sp.add_argument("--tmin", type=float, default=-10)
    sp.add_argument("--tmax", type=float, default=10)
    sp.add_argument("--tstep", type=float, default=0.5)
    sp.add_argument("--umin", type=float, default=0.0)
    sp.add_argument("--umax", type=float, default=1.0)
    sp.add_argument("--ustep", type=float, default=0.05)
    sp.add_argument("--check", action="store_true", help="convexity and zero at the anchor")
    common(sp)
    sp.set_defaults(func=cmd_ldp)

    sp = sub.add_parser("tba", help="closed-form TBA table at principal densities")
    sp.add_argument("--kappa", type=int)
    sp.add_argument("--q")
    sp.add_argument("--imax", type=int, default=20)
    sp.add_argument("--check", action="store_true", help="Q/Y-system, difference equation, equation of state")
    common(sp)
    sp.set_defaults(func=cmd_tba)

    sp = sub.add_parser("ballot", help="lattice paths to a Weyl chamber point")
    sp.add_argument("--m", required=True, help="comma list m1,...,mr")
    sp.set_defaults(func=cmd_ballot)

    sp = sub.add_parser("mc", help="row lengths of random configurations against their limits")
    _add_density_flags(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--rows", default="1", help="comma list of row indices")
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--conditioned", action="store_true", help="condition on highest states")
    sp.add_argument("--tol", type=float, help="absolute tolerance; default 3 standard errors")
    common(sp)
    sp.set_defaults(func=cmd_mc)

    sp = sub.add_parser("persistence", help="probability a centered row stays nonnegative")
    _add_density_flags(sp)
    sp.add_argument("--c", type=int, default=1)
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--n-grid", default="250,500,1000,2000")
    sp.add_argument("--trials", type=int, default=10**5)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--check", action="store_true", help="slope in [-0.6,-0.4], level within 25%%")
    common(sp)
    sp.set_defaults(func=cmd_persistence)

    sp = sub.add_parser("highest", help="probability of, or samples from, highest states")
    _add_density_flags(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--trials", type=int, help="Monte Carlo instead of exact enumeration")
    sp.add_argument("--sample", type=int, help="print this many conditioned samples")
    sp.add_argument("--seed", type=int)
    common(sp)
    sp.set_defaults(func=cmd_highest)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args, out)
    except (UsageError, ValueError) as e:
        print(f"boxball {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
