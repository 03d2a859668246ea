"""Command-line front end.

Every computation in the package is exposed as a subcommand that
writes CSV or JSON to stdout (or ``--out``), so experiments can be
driven from shell scripts and their outputs piped into external
plotting.  Numbers are printed with 17 significant digits and every
numeric row carries its truncation/stderr certificate, which makes
output files byte-reproducible for fixed flags and seed.

Filters are described by a small mini-language shared by all
subcommands::

    explicit:1,0.5,-0.25        finite coefficient list
    geom:base=2                 c_j = base^{-j}
    hyper:beta=1.2,sign=alt,c0=zsum
                                c_j = (+-1)^j j^{-beta}; sign is
                                'const' (default) or 'alt'; c0 is a
                                number (default 1) or 'zsum' for the
                                zero-sum completion

Exit codes: 0 success, 2 invalid input (bad flag, filter spec, or
precondition), 1 numerical failure (certificate or unstable
estimate).
"""

import argparse
import io
import json
import math
import os
import sys

import numpy as np

from .exceptions import NumericalError, ValidationError
from .integrals import (
    OUParams,
    ou_codifference,
    ou_codifference_normalized,
    ou_rho,
    ou_rho_normalized,
)
from .linear_field import Product
from .linear_process import (
    C0_VALUE,
    C0_ZERO_SUM,
    SIGN_ALTERNATING,
    SIGN_CONSTANT,
    Explicit,
    Geometric,
    Hyperbolic,
    dependence_batch,
)
from .linear_field import field_batch
from .memory import (
    InnovationLaw,
    LevyPolarMeasure,
    classify_directional,
    classify_memory,
    estimate_growth_exponent,
    exact_norm_A_alpha,
    loglog_slope,
    q_covariance,
)
from .spectral import (
    SpectralMeasure,
    alpha_correlation,
    alpha_covariance,
    estimate_spectral_from_samples,
)

_FMT = "%.17g"


def _num(x):
    return "" if x is None else _FMT % float(x)


def parse_filter(spec, alpha):
    """Build a Filter1D from a mini-language string."""
    name, _, body = spec.partition(":")
    name = name.strip().lower()
    if name == "explicit":
        try:
            coeffs = [float(v) for v in body.split(",")]
        except ValueError:
            raise ValidationError("bad explicit coefficient list %r" % body)
        return Explicit(coeffs, alpha)
    if name not in ("geom", "hyper"):
        raise ValidationError(
            "unknown filter family %r (explicit, geom, hyper)" % name
        )
    opts = {}
    if body:
        for item in body.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise ValidationError(
                    "filter option %r is not key=value" % item
                )
            opts[key.strip().lower()] = val.strip()
    if name == "geom":
        try:
            base = float(opts.pop("base", "2"))
        except ValueError:
            raise ValidationError("geom base must be a number")
        if opts:
            raise ValidationError("unknown geom options %r" % sorted(opts))
        return Geometric(base, alpha)
    if name == "hyper":
        if "beta" not in opts:
            raise ValidationError("hyper filter needs beta=<value>")
        try:
            beta = float(opts.pop("beta"))
        except ValueError:
            raise ValidationError("hyper beta must be a number")
        sign_word = opts.pop("sign", "const")
        signs = {"const": SIGN_CONSTANT, "constant": SIGN_CONSTANT,
                 "alt": SIGN_ALTERNATING, "alternating": SIGN_ALTERNATING}
        if sign_word not in signs:
            raise ValidationError("sign must be 'const' or 'alt'")
        c0_word = opts.pop("c0", "1")
        if opts:
            raise ValidationError("unknown hyper options %r" % sorted(opts))
        if c0_word == "zsum":
            return Hyperbolic(beta, alpha, sign=signs[sign_word],
                              c0_mode=C0_ZERO_SUM)
        try:
            c0 = float(c0_word)
        except ValueError:
            raise ValidationError("c0 must be a number or 'zsum'")
        return Hyperbolic(beta, alpha, sign=signs[sign_word],
                          c0_mode=C0_VALUE, c0=c0)


def _parse_pair(text, what):
    lo, sep, hi = text.partition(":")
    if not sep:
        raise ValidationError("%s must look like A:B" % what)
    try:
        return int(lo), int(hi)
    except ValueError:
        raise ValidationError("%s bounds must be integers" % what)


def parse_lags(text):
    """Inclusive integer range ``A:B``."""
    lo, hi = _parse_pair(text, "lag range")
    if hi < lo:
        raise ValidationError("empty lag range %r" % text)
    return list(range(lo, hi + 1))


def parse_grid(text):
    """Doubling grid ``A:B``: A, 2A, 4A, ... capped and closed at B."""
    lo, hi = _parse_pair(text, "grid")
    if lo < 1 or hi < lo:
        raise ValidationError("grid must satisfy 1 <= A <= B")
    grid = [lo]
    while grid[-1] * 2 <= hi:
        grid.append(grid[-1] * 2)
    if grid[-1] != hi:
        grid.append(hi)
    return grid


def _csv(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_dict(report):
    return {
        "class": report.memory_class,
        "delta_hat": report.delta_hat,
        "exponent_hat": report.exponent_hat,
        "stderr": report.stderr,
        "n_grid": list(report.n_grid),
        "replications": report.replications,
        "note": report.note,
    }


def _scale_rows(scales, values, bounds):
    rows = []
    for n, v, b in zip(scales, values, bounds):
        rows.append({"n": int(n), "scale": v, "log_n": math.log(n),
                     "log_scale": math.log(v), "tail_bound": b})
    return rows


def _memory_output(report, rows, fmt):
    if fmt == "json":
        return json.dumps({"report": _report_dict(report), "rows": rows},
                          indent=2) + "\n"
    header = ["n", "scale", "log_n", "log_scale", "tail_bound"]
    body = [[str(r["n"]), _num(r["scale"]), _num(r["log_n"]),
             _num(r["log_scale"]), _num(r["tail_bound"])] for r in rows]
    return _csv(header, body)


def _load_table(path, what, columns):
    try:
        data = np.atleast_2d(np.loadtxt(path, delimiter=",", comments="#"))
    except (OSError, ValueError) as exc:
        raise ValidationError("could not read %s from %r: %s"
                              % (what, path, exc))
    if data.shape[1] != columns:
        raise ValidationError("%s needs %d comma-separated columns"
                              % (what, columns))
    return data


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------


def _cmd_process_deps(args):
    f = parse_filter(args.filter, args.alpha)
    rows = dependence_batch(f, parse_lags(args.lags), args.tol, args.threads)
    if args.format == "json":
        return json.dumps({"rows": rows}, indent=2) + "\n"
    header = ["n", "rho", "rho_tilde", "codifference", "covariation",
              "tail_bound"]
    body = [[str(r["n"]), _num(r["rho"]), _num(r["rho_tilde"]),
             _num(r["codifference"]), _num(r["covariation"]),
             _num(r["tail_bound"])] for r in rows]
    return _csv(header, body)


def _cmd_field_deps(args):
    f = Product(parse_filter(args.filter_a, args.alpha),
                parse_filter(args.filter_b, args.alpha))
    pairs = [(n, m) for n in parse_lags(args.lags_n)
             for m in parse_lags(args.lags_m)]
    rows = field_batch(f, pairs, args.tol, args.threads)
    if args.format == "json":
        return json.dumps({"rows": rows}, indent=2) + "\n"
    header = ["n", "m", "rho", "rho_tilde", "tail_bound"]
    body = [[str(r["n"]), str(r["m"]), _num(r["rho"]), _num(r["rho_tilde"]),
             _num(r["tail_bound"])] for r in rows]
    return _csv(header, body)


def _cmd_ou(args):
    p = OUParams(args.lam, args.alpha)
    if args.steps < 2:
        raise ValidationError("steps must be at least 2")
    if not args.tmax > 0.0:
        raise ValidationError("tmax must be positive")
    ts = np.linspace(0.0, args.tmax, args.steps)
    rows = []
    for t in ts:
        rows.append({
            "t": float(t),
            "rho": ou_rho(t, p),
            "rho_normalized": ou_rho_normalized(t, p),
            "codifference": ou_codifference(t, p),
            "codifference_normalized": ou_codifference_normalized(t, p),
            "tail_bound": 0.0,  # closed forms are exact
        })
    if args.format == "json":
        return json.dumps({"rows": rows}, indent=2) + "\n"
    header = ["t", "rho", "rho_normalized", "codifference",
              "codifference_normalized", "tail_bound"]
    body = [[_num(r[k]) for k in header] for r in rows]
    return _csv(header, body)


def _exact_scale_fit(f, alpha, grid, tol):
    values, bounds = [], []
    for g in grid:
        v, b = exact_norm_A_alpha(f, g, alpha, tol=tol, full_output=True)
        scale = v ** (1.0 / alpha)
        values.append(scale)
        bounds.append(scale * b / (alpha * v) if v > 0.0 else b)
    slope, stderr = loglog_slope(np.log(np.asarray(grid, float)),
                                 np.log(np.asarray(values)))
    return slope, stderr, values, bounds


def _cmd_memory_exact(args):
    f = parse_filter(args.filter, args.alpha)
    grid = parse_grid(args.grid)
    slope, stderr, values, bounds = _exact_scale_fit(f, args.alpha, grid,
                                                     args.tol)
    report = classify_memory(slope, stderr, args.alpha, band=args.band,
                             n_grid=grid, replications=0)
    return _memory_output(report, _scale_rows(grid, values, bounds),
                          args.format)


def _cmd_memory_sim(args):
    f = parse_filter(args.filter, args.alpha)
    grid = parse_grid(args.grid)
    if args.law == "sas":
        law = InnovationLaw.sas(args.alpha)
    elif args.law == "gaussian":
        law = InnovationLaw.gaussian()
    else:
        law = InnovationLaw.symmetric_pareto(args.alpha)
    fit = estimate_growth_exponent(f, law, grid,
                                   replications=args.replications,
                                   seed=args.seed, j_trunc=args.j_trunc,
                                   tol=args.tol)
    exact = law.kind == "gaussian" or (law.kind == "sas"
                                       and law.alpha == 2.0)
    reps = 0 if exact else args.replications
    report = classify_memory(fit.slope, fit.stderr, law.alpha,
                             band=args.band, n_grid=grid,
                             replications=reps)
    return _memory_output(report,
                          _scale_rows(fit.scales, fit.values, fit.bounds),
                          args.format)


def _cmd_memory_field(args):
    f = Product(parse_filter(args.filter_a, args.alpha),
                parse_filter(args.filter_b, args.alpha))
    grid = parse_grid(args.grid)
    (rep_n, rep_m), profiles = classify_directional(
        f, grid, band=args.band, tol=args.tol, full_output=True)
    axis_rows = []
    for axis, profile in zip(("n", "m"), profiles):
        for g, v, b in profile:
            axis_rows.append({"axis": axis, "n": int(g), "scale": v,
                              "log_n": math.log(g), "log_scale": math.log(v),
                              "tail_bound": b})
    if args.format == "json":
        return json.dumps({"report_n": _report_dict(rep_n),
                           "report_m": _report_dict(rep_m),
                           "rows": axis_rows}, indent=2) + "\n"
    header = ["axis", "n", "scale", "log_n", "log_scale", "tail_bound"]
    body = [[r["axis"], str(r["n"]), _num(r["scale"]), _num(r["log_n"]),
             _num(r["log_scale"]), _num(r["tail_bound"])]
            for r in axis_rows]
    return _csv(header, body)


def _cmd_spectral_estimate(args):
    samples = _load_table(args.input, "samples", 2)
    measure = estimate_spectral_from_samples(samples, k=args.k)
    if args.format == "json":
        return json.dumps({
            "alpha": measure.alpha,
            "atoms": len(measure.weights),
            "rho": alpha_covariance(measure),
            "rho_tilde": alpha_correlation(measure),
        }, indent=2) + "\n"
    buf = io.StringIO()
    measure.to_csv(buf)
    return buf.getvalue()


def _cmd_qcov(args):
    if (args.atoms is None) == (args.spectral is None):
        raise ValidationError("pass exactly one of --atoms or --spectral")
    if args.atoms is not None:
        table = _load_table(args.atoms, "atoms", 3)
        measure = LevyPolarMeasure.from_atoms(table[:, :2], table[:, 2])
        kappa = q_covariance(measure)
        x1, x2 = table[:, 0], table[:, 1]
        mass = np.abs(x1 * x2) / np.maximum(1.0, x1 * x1 + x2 * x2)
        certificate = 4.0 * np.finfo(float).eps * float(
            np.sum(mass * np.abs(table[:, 2])))
        method = "atoms"
    else:
        with open(args.spectral, encoding="utf-8") as fh:
            spectral = SpectralMeasure.from_csv(fh)
        measure = LevyPolarMeasure.polar(spectral.alpha, spectral)
        kappa = q_covariance(measure)
        certificate = 0.0  # closed form
        method = "polar"
    if args.format == "json":
        return json.dumps({"kappa": kappa, "certificate": certificate,
                           "method": method}, indent=2) + "\n"
    return _csv(["kappa", "certificate", "method"],
                [[_num(kappa), _num(certificate), method]])


def _cmd_experiment(args):
    grid = parse_grid(args.grid)
    if args.name == "zero-sum-decay":
        sign = SIGN_ALTERNATING if args.sign == "alt" else SIGN_CONSTANT
        f = Hyperbolic(args.beta, args.alpha, sign=sign,
                       c0_mode=C0_ZERO_SUM)
        if args.alpha == 2.0:
            slope, stderr, values, bounds = _exact_scale_fit(
                f, args.alpha, grid, args.tol)
            reps = 0
        else:
            fit = estimate_growth_exponent(
                f, InnovationLaw.sas(args.alpha), grid,
                replications=args.replications, seed=args.seed,
                tol=args.tol)
            slope, stderr = fit.slope, fit.stderr
            values, bounds = fit.values, fit.bounds
            reps = args.replications
        note = ("decay of zero-sum filters below alpha=2 is a conjecture; "
                "this reports the fitted slope without asserting it")
    else:  # sign-pattern
        pattern = args.pattern
        if not pattern or any(ch not in "+-" for ch in pattern):
            raise ValidationError("pattern must be a nonempty +/- string")
        j = np.arange(1, args.length + 1, dtype=float)
        signs = np.array([1.0 if pattern[(k - 1) % len(pattern)] == "+"
                          else -1.0 for k in range(1, args.length + 1)])
        coeffs = np.concatenate(([args.c0], signs * j ** -args.beta))
        f = Explicit(coeffs, args.alpha)
        slope, stderr, values, bounds = _exact_scale_fit(
            f, args.alpha, grid, args.tol)
        reps = 0
        note = ("user-supplied sign pattern %r cycled over j^-beta "
                "coefficients" % pattern)
    rows = _scale_rows(grid, values, bounds)
    if args.format == "json":
        return json.dumps({"experiment": args.name, "slope": slope,
                           "stderr": stderr, "replications": reps,
                           "note": note, "rows": rows}, indent=2) + "\n"
    header = ["n", "scale", "log_n", "log_scale", "tail_bound"]
    body = [[str(r["n"]), _num(r["scale"]), _num(r["log_n"]),
             _num(r["log_scale"]), _num(r["tail_bound"])] for r in rows]
    return _csv(header, body)


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------


def _add_common(sub, fmt_default):
    sub.add_argument("--out", help="output path (default: stdout)")
    sub.add_argument("--format", choices=("csv", "json"),
                     default=fmt_default, help="output format")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="stablecov",
        description="Dependence and memory diagnostics for stable "
                    "processes; emits CSV/JSON data only.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("process-deps",
                        help="dependence measures of a linear process")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--filter", required=True,
                   help="explicit:...|geom:...|hyper:...")
    p.add_argument("--lags", required=True, help="inclusive range A:B")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--threads", type=int, default=1)
    _add_common(p, "csv")
    p.set_defaults(handler=_cmd_process_deps)

    p = subs.add_parser("field-deps",
                        help="rho and rho~ of a product lattice field")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--filter-a", required=True)
    p.add_argument("--filter-b", required=True)
    p.add_argument("--lags-n", required=True, help="inclusive range A:B")
    p.add_argument("--lags-m", required=True,
                   help="inclusive range A:B (use --lags-m=-4:4 for "
                        "negative bounds)")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--threads", type=int, default=1)
    _add_common(p, "csv")
    p.set_defaults(handler=_cmd_field_deps)

    p = subs.add_parser("ou", help="Ornstein-Uhlenbeck dependence curves")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    _add_common(p, "csv")
    p.set_defaults(handler=_cmd_ou)

    p = subs.add_parser("memory-exact",
                        help="memory class from exact partial-sum scales")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--filter", required=True)
    p.add_argument("--grid", required=True, help="doubling grid A:B")
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--band", type=float, default=0.05)
    _add_common(p, "json")
    p.set_defaults(handler=_cmd_memory_exact)

    p = subs.add_parser("memory-sim",
                        help="memory class from simulated partial sums")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--filter", required=True)
    p.add_argument("--grid", required=True, help="doubling grid A:B")
    p.add_argument("--law", choices=("sas", "gaussian", "pareto"),
                   default="sas")
    p.add_argument("--replications", type=int, default=400)
    p.add_argument("--seed", type=int, default=None,
                   help="default: STABLECOV_SEED env var, else 0")
    p.add_argument("--j-trunc", type=int, default=None,
                   help="filter truncation lag (default: advisory rule)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--band", type=float, default=0.05)
    _add_common(p, "json")
    p.set_defaults(handler=_cmd_memory_sim)

    p = subs.add_parser("memory-field",
                        help="per-axis memory classes of a product field")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--filter-a", required=True)
    p.add_argument("--filter-b", required=True)
    p.add_argument("--grid", required=True, help="doubling grid A:B")
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--band", type=float, default=0.05)
    _add_common(p, "json")
    p.set_defaults(handler=_cmd_memory_field)

    p = subs.add_parser("spectral-estimate",
                        help="empirical spectral measure from 2-d samples")
    p.add_argument("--input", required=True,
                   help="CSV of x,y sample rows")
    p.add_argument("--k", type=int, default=None,
                   help="tail order statistics (default: n^0.6)")
    _add_common(p, "csv")
    p.set_defaults(handler=_cmd_spectral_estimate)

    p = subs.add_parser("qcov",
                        help="quadratic covariation of a Levy measure")
    p.add_argument("--atoms", help="CSV of x1,x2,mass rows")
    p.add_argument("--spectral",
                   help="spectral-measure CSV (polar closed form)")
    _add_common(p, "json")
    p.set_defaults(handler=_cmd_qcov)

    p = subs.add_parser("experiment",
                        help="exploratory runs with no pass/fail meaning")
    p.add_argument("name", choices=("zero-sum-decay", "sign-pattern"))
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--sign", choices=("const", "alt"), default="const")
    p.add_argument("--pattern", default="+-",
                   help="sign-pattern experiment: +/- string cycled over j")
    p.add_argument("--c0", type=float, default=1.0)
    p.add_argument("--length", type=int, default=1 << 15)
    p.add_argument("--grid", default="64:4096", help="doubling grid A:B")
    p.add_argument("--replications", type=int, default=400)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-5)
    _add_common(p, "json")
    p.set_defaults(handler=_cmd_experiment)

    return parser


def run(argv=None):
    """Parse argv, dispatch, and return the process exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None and hasattr(args, "seed"):
        args.seed = int(os.environ.get("STABLECOV_SEED", "0"))
    try:
        text = args.handler(args)
        _emit(text, args.out)
    except ValidationError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except NumericalError as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 1
    return 0


def main():
    return run()


if __name__ == "__main__":
    sys.exit(main())
