"""Command-line experiment runner.

Every subcommand writes three artifacts into the output directory: a
``results.csv`` with a header row and 9-significant-digit values, a
``summary.txt`` with the headline numbers and pairing constants, and a
``config.json`` echo of the parsed arguments (seed included).  Identical
configurations produce byte-identical outputs.

Exit codes: 0 on success, 1 when a precondition or construction fails,
2 when an input file cannot be parsed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import constructions as cons
from .errors import ConstructionError, DomainError, PreconditionError, SpecParseError
from .exponent import load_spec
from .grid import Cube, GridDomain, GridFunction, MeasurableSet, as_box
from .k0 import CubeFamily, k0alpha_constant, norm_harmonic_sandwich
from .norms import (
    duality_constant,
    holder_constant,
    interval_indicator_modular,
    interval_indicator_norm,
    luxemburg_norm,
    modular,
)
from .operators import (
    DYADIC,
    EXACT,
    czo_pair_lower_bound,
    fractional_maximal,
    kernel_threshold,
    make_tu_pair,
    maximal_pair_lower_bound,
    riesz_kernel,
    riesz_potential,
)


def _fmt(x):
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.9g" % float(x)


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_text(path, lines):
    with open(path, "w") as fh:
        for line in lines:
            fh.write(line + "\n")


def _echo_config(outdir, args):
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    with open(os.path.join(outdir, "config.json"), "w") as fh:
        json.dump(config, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _constant_lines(p):
    return [
        "pairing constant K = %.9g" % holder_constant(p),
        "duality constant k = %.9g" % duality_constant(p),
        "exponent bounds = (%s, %s)" % tuple(_fmt(b) for b in p.bounds()),
    ]


def _load_exponent(args, required=True):
    if args.spec is None:
        if required:
            raise PreconditionError("this subcommand needs --spec")
        return None
    return load_spec(args.spec)


def _parse_box(text):
    axes = []
    for part in text.split(";"):
        bits = part.split(",")
        if len(bits) != 2:
            raise SpecParseError(f"box axis needs 'lo,hi', got {part!r}")
        axes.append((float(bits[0]), float(bits[1])))
    return as_box(axes)


def _function_on_grid(args, p):
    """Grid function from --csv, or the --box indicator on a fresh grid."""
    if args.csv is not None:
        return GridFunction.from_csv(args.csv)
    if args.box is None:
        raise PreconditionError("provide a function via --csv or --box")
    box = _parse_box(args.box)
    domain = p.domain if p is not None else box
    cells = tuple(max(int(args.cells), 16) for _ in domain)
    grid = GridDomain(domain, cells)
    return GridFunction.indicator(grid, MeasurableSet.from_box(box))


# -- subcommands -------------------------------------------------------------


def _run_norm(args, outdir):
    p = _load_exponent(args)
    if args.box is not None and args.csv is None and p.dimension == 1:
        a, b = _parse_box(args.box)[0]
        value = interval_indicator_norm(p, a, b)
        route = "interval"
    else:
        f = _function_on_grid(args, p)
        value = luxemburg_norm(f, p)
        route = "grid"
    print("%.7f" % value)
    _write_csv(os.path.join(outdir, "results.csv"), ["quantity", "value"],
               [("norm", value)])
    _write_text(
        os.path.join(outdir, "summary.txt"),
        ["norm = %.9g" % value, "route = " + route, "seed = %d" % args.seed]
        + _constant_lines(p),
    )
    return 0


def _run_modular(args, outdir):
    p = _load_exponent(args)
    lam = float(args.lam)
    if args.box is not None and args.csv is None and p.dimension == 1:
        a, b = _parse_box(args.box)[0]
        value = interval_indicator_modular(p, a, b, lam)
        route = "interval"
    else:
        f = _function_on_grid(args, p)
        scaled = GridFunction(f.domain, f.values / lam)
        value = modular(scaled, p)
        route = "grid"
    print("%.7f" % value)
    _write_csv(os.path.join(outdir, "results.csv"), ["quantity", "value"],
               [("modular", value), ("lambda", lam)])
    _write_text(
        os.path.join(outdir, "summary.txt"),
        ["modular = %.9g at lambda = %.9g" % (value, lam), "route = " + route,
         "seed = %d" % args.seed] + _constant_lines(p),
    )
    return 0


def _run_maximal(args, outdir):
    p = _load_exponent(args, required=False)
    f = _function_on_grid(args, p)
    policy = EXACT if args.policy == "exact" else DYADIC
    mf = fractional_maximal(f, args.alpha, radii=policy)
    pts = mf.domain.points()
    rows = [tuple(pt) + (v,) for pt, v in zip(pts, mf.values.ravel())]
    header = ["x%d" % (i + 1) for i in range(mf.domain.dimension)] + ["value"]
    _write_csv(os.path.join(outdir, "results.csv"), header, rows)
    lines = [
        "policy = " + args.policy,
        "alpha = %.9g" % args.alpha,
        "max value = %.9g" % float(mf.values.max()),
        "integral = %.9g" % mf.integral(),
        "seed = %d" % args.seed,
    ]
    if p is not None:
        lines += _constant_lines(p)
    _write_text(os.path.join(outdir, "summary.txt"), lines)
    return 0


def _run_riesz(args, outdir):
    p = _load_exponent(args, required=False)
    f = _function_on_grid(args, p)
    pot = riesz_potential(f, args.alpha)
    pts = pot.domain.points()
    rows = [tuple(pt) + (v,) for pt, v in zip(pts, pot.values.ravel())]
    header = ["x%d" % (i + 1) for i in range(pot.domain.dimension)] + ["value"]
    _write_csv(os.path.join(outdir, "results.csv"), header, rows)
    lines = [
        "alpha = %.9g" % args.alpha,
        "max value = %.9g" % float(pot.values.max()),
        "integral = %.9g" % pot.integral(),
        "seed = %d" % args.seed,
    ]
    if p is not None:
        lines += _constant_lines(p)
    _write_text(os.path.join(outdir, "summary.txt"), lines)
    return 0


def _run_k0scan(args, outdir):
    p = _load_exponent(args)
    if p.dimension != 1:
        raise PreconditionError("the scan subcommand is one-dimensional")
    volumes = np.geomspace(args.vol_min, args.vol_max, args.num)
    anchor = float(args.anchor)
    centers = [anchor + v / 2.0 for v in volumes]
    radii = [v / 2.0 for v in volumes]
    family = CubeFamily.from_cubes(
        [Cube((c,), r) for c, r in zip(centers, radii)]
    )
    report = k0alpha_constant(p, args.alpha, family)
    rows = [
        (c, r, s.value)
        for c, r, s in zip(centers, radii, report.samples)
    ]
    _write_csv(os.path.join(outdir, "results.csv"),
               ["center", "radius", "sample_value"], rows)
    sandwich = norm_harmonic_sandwich(p, family)
    _write_text(
        os.path.join(outdir, "summary.txt"),
        [
            "alpha = %.9g" % args.alpha,
            "best sample = %.9g at index %d" % (report.best_value, report.best_index),
            "sandwich holds = %s" % sandwich.all_ok,
            "seed = %d" % args.seed,
        ]
        + _constant_lines(p),
    )
    return 0


def _run_paircheck(args, outdir):
    rng = np.random.default_rng(args.seed)
    cells = max(int(args.cells), 64)
    grid = GridDomain(((0.0, 1.0),), (cells,))
    h = grid.h
    rows = []
    lines = []
    kernel = riesz_kernel(args.alpha, 1) if args.mode == "czo" else None
    t0 = kernel_threshold(kernel) if kernel is not None else None
    t_hi = 10.0 if t0 is None else t0 + 6.0
    mcap = max(2, int((cells - 4) / (t_hi + 3.0)))
    for index in range(int(args.count)):
        vals = rng.uniform(0.0, 1.0, cells)
        f = GridFunction(grid, vals)
        m = int(rng.integers(2, mcap + 1))
        t_raw = float(rng.uniform(4.0, 10.0)) if t0 is None else float(
            rng.uniform(t0, t0 + 6.0)
        )
        t = math.ceil(t_raw * m) / m
        span = int(round(t * m)) + 2 * m
        corner = int(rng.integers(0, cells - span))
        base = Cube((corner * h + m * h,), m * h)
        pair = make_tu_pair(base, t)
        if args.mode == "maximal":
            rep = maximal_pair_lower_bound(f, pair, args.alpha)
            rows.append((index, t, m * h, rep.lhs_min, rep.rhs, rep.holds))
        else:
            rep = czo_pair_lower_bound(kernel, f, pair)
            rows.append((index, t, m * h, rep.lhs_min, rep.rhs, rep.holds))
    _write_csv(os.path.join(outdir, "results.csv"),
               ["index", "t", "radius", "lhs", "rhs", "holds"], rows)
    ok = all(bool(r[-1]) for r in rows)
    lines += [
        "mode = " + args.mode,
        "alpha = %.9g" % args.alpha,
        "all bounds hold = %s" % ok,
        "seed = %d" % args.seed,
    ]
    if t0 is not None:
        lines.append("kernel threshold = %.9g" % t0)
    _write_text(os.path.join(outdir, "summary.txt"), lines)
    return 0 if ok else 1


def _run_example(args, outdir):
    name = args.name.upper()
    lines = ["example = " + name, "seed = %d" % args.seed]
    if name == "L1_FAILURE":
        out = cons.build_l1_failure(args.alpha, r_max=args.rmax)
        rows = list(zip(out["ladder"], out["partial_modulars"], out["analytic_partials"]))
        _write_csv(os.path.join(outdir, "results.csv"),
                   ["window", "measured", "analytic"], rows)
        lines += [
            "alpha = %.9g" % args.alpha,
            "measured slope = %.9g" % out["slope"],
            "analytic slope = %.9g" % out["analytic_slope"],
        ]
    elif name == "EX61":
        spec = cons.build_ex61(args.alpha)
        chk = cons.ex61_divergence_check(spec, args.k)
        rows = [
            (k + 1, wp, wo, mp, mo, hn)
            for k, (wp, wo, mp, mo, hn) in enumerate(
                zip(chk["weight_partials"], chk["weight_oracle"],
                    chk["maximal_partials"], chk["maximal_oracle"],
                    chk["harmonic_numbers"])
            )
        ]
        _write_csv(
            os.path.join(outdir, "results.csv"),
            ["k", "rho_p_partial", "rho_p_oracle", "rho_q_partial",
             "rho_q_oracle", "harmonic"],
            rows,
        )
        scan = cons.ex61_interval_constant_scan(spec, min(args.k, 50))
        window_ok = all(w["holds"] for w in chk["window_reports"])
        lines += [
            "alpha = %.9g" % args.alpha,
            "scan best = %.9g over %d samples" % (scan["best"], len(scan["samples"])),
            "window floors hold = %s" % window_ok,
        ] + _constant_lines(spec.exponent)
    elif name in ("EX62", "EX63", "EX64"):
        if name == "EX62":
            spec = cons.build_ex62()
        elif name == "EX63":
            spec = cons.build_ex63(args.alpha, args.p_minus, args.p_plus)
        else:
            spec = cons.build_ex64(args.alpha, args.p_minus, args.p_plus)
        rows_raw = cons.witness_check(spec, range(2, args.j_max + 1))
        rows = [
            (r["j"], r["measure"], r["mean"], r["lambda"], r["modular"],
             r["mean_ok"], r["norm_beats_lambda"])
            for r in rows_raw
        ]
        _write_csv(
            os.path.join(outdir, "results.csv"),
            ["j", "measure", "mean", "lambda", "modular", "mean_ok", "beats"],
            rows,
        )
        lines += [
            "all witnesses beat their scale = %s"
            % all(r["norm_beats_lambda"] for r in rows_raw),
        ] + _constant_lines(spec.exponent)
        if name == "EX62":
            two = cons.two_sided_interval_check(spec, seed=args.seed)
            lines += [
                "two-sided lower = %.9g (holds = %s)" % (two["lower"], two["lower_holds"]),
                "two-sided measured upper = %.9g" % two["measured_upper"],
                "long-interval cap = %.9g (holds = %s)"
                % (two["long_interval_cap"], two["long_cap_holds"]),
            ]
    elif name == "HM_COUNTER":
        spec = cons.hm_counterexample()
        w = spec.witnesses
        _write_csv(
            os.path.join(outdir, "results.csv"),
            ["quantity", "computed", "closed_form"],
            [("containing_mean", w["mean_big"], w["formula_big"]),
             ("subcube_mean", w["mean_sub"], w["formula_sub"])],
        )
        lines += [
            "containing-cube mean = %.9g" % w["mean_big"],
            "subcube mean = %.9g" % w["mean_sub"],
            "monotonicity fails = %s" % w["monotone_fails"],
        ]
    else:
        raise PreconditionError(
            f"unknown example {args.name!r}; choose from {cons.EXAMPLE_NAMES}"
        )
    _write_text(os.path.join(outdir, "summary.txt"), lines)
    return 0


def _run_blowup(args, outdir):
    p = load_spec(args.spec) if args.spec else cons.default_blowup_exponent()
    fam = cons.build_blowup(p, args.alpha, args.t, args.k,
                            cells_per_radius=args.cells_per_radius)
    geo = cons.check_blowup_geometry(fam)
    series = cons.blowup_modular_growth(fam, args.c_scale)
    k0_family = cons.blowup_family_k0(fam)
    floor = cons.blowup_growth_floor(fam, args.c_scale, family_k0=k0_family)
    rows = [
        (lv.k, s, s / lv.k, floor)
        for lv, s in zip(fam.levels, series)
    ]
    _write_csv(os.path.join(outdir, "results.csv"),
               ["k", "series", "series_over_k", "floor"], rows)
    lines = [
        "alpha = %.9g, t = %.9g, scale C = %.9g" % (args.alpha, args.t, args.c_scale),
        "family interval constant = %.9g" % k0_family,
        "certified floor = %.9g" % floor,
        "geometry ok = %s" % geo["ok"],
        "seed = %d" % args.seed,
    ]
    for row in geo["levels"]:
        status = "ok" if row["ok"] else "; ".join(row["issues"])
        lines.append("level %d: %s" % (row["k"], status))
    lines += _constant_lines(p)
    _write_text(os.path.join(outdir, "summary.txt"), lines)
    return 0 if geo["ok"] else 1


# -- argument parsing --------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="varlp",
        description="Variable-exponent norms, maximal operators, and worked constructions.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp, needs_alpha=True):
        sp.add_argument("--spec", default=None, help="exponent spec JSON path")
        sp.add_argument("--out", default="varlp-out", help="output directory")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized parts")
        sp.add_argument("--cells", type=int, default=256,
                        help="grid resolution per axis (minimum 16)")
        if needs_alpha:
            sp.add_argument("--alpha", type=float, default=0.0,
                            help="fractional order")

    sp = sub.add_parser("norm", help="Luxemburg norm of a function")
    common(sp, needs_alpha=False)
    sp.add_argument("--csv", default=None, help="grid function CSV")
    sp.add_argument("--box", default=None, help="indicator box 'lo,hi[;lo,hi]'")
    sp.set_defaults(func=_run_norm)

    sp = sub.add_parser("modular", help="modular of a scaled function")
    common(sp, needs_alpha=False)
    sp.add_argument("--csv", default=None)
    sp.add_argument("--box", default=None)
    sp.add_argument("--lam", type=float, default=1.0, help="scale in rho(f/lam)")
    sp.set_defaults(func=_run_modular)

    sp = sub.add_parser("maximal", help="fractional maximal function")
    common(sp)
    sp.add_argument("--csv", default=None)
    sp.add_argument("--box", default=None)
    sp.add_argument("--policy", choices=("exact", "dyadic"), default="exact")
    sp.set_defaults(func=_run_maximal)

    sp = sub.add_parser("riesz", help="fractional integral of a grid function")
    common(sp)
    sp.add_argument("--csv", default=None)
    sp.add_argument("--box", default=None)
    sp.set_defaults(func=_run_riesz)

    sp = sub.add_parser("k0scan", help="normalized norm-product samples over intervals")
    common(sp)
    sp.add_argument("--vol-min", type=float, default=1e-3)
    sp.add_argument("--vol-max", type=float, default=1e3)
    sp.add_argument("--num", type=int, default=50)
    sp.add_argument("--anchor", type=float, default=0.0)
    sp.set_defaults(func=_run_k0scan)

    sp = sub.add_parser("paircheck", help="translate-pair lower bounds on random data")
    common(sp)
    sp.add_argument("--count", type=int, default=25)
    sp.add_argument("--mode", choices=("maximal", "czo"), default="maximal")
    sp.set_defaults(func=_run_paircheck)

    sp = sub.add_parser("example", help="build a named construction and its checks")
    common(sp)
    sp.add_argument("name", help="one of %s" % ", ".join(cons.EXAMPLE_NAMES))
    sp.add_argument("--k", type=int, default=50, help="partial series length")
    sp.add_argument("--j-max", type=int, default=6, help="last witness index")
    sp.add_argument("--rmax", type=float, default=1000.0, help="largest window")
    sp.add_argument("--p-minus", type=float, default=1.2)
    sp.add_argument("--p-plus", type=float, default=2.0)
    sp.set_defaults(func=_run_example)

    sp = sub.add_parser("blowup", help="build the chain family and its growth series")
    common(sp)
    sp.add_argument("--t", type=float, default=5.0, help="pair separation parameter")
    sp.add_argument("--k", type=int, default=4, help="deepest chain level")
    sp.add_argument("--cells-per-radius", type=int, default=4)
    sp.add_argument("--c-scale", type=float, default=10.0)
    sp.set_defaults(func=_run_blowup)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "cells", 256) < 16:
        print("error: --cells must be at least 16", file=sys.stderr)
        return 1
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    try:
        _echo_config(outdir, args)
        return args.func(args, outdir)
    except SpecParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PreconditionError, DomainError, ConstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
