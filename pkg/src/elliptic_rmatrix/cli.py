"""Command-line front end for kernel evaluation and identity verification.

Subcommands:

  eval        print one kernel value or 4x4 r-matrix
  verify      run a randomized identity suite and emit its report
  degenerate  scaling-limit error ladder with fitted decay rates
  average     lattice-averaging residual table against closed targets

Complex arguments are written "a+bi" (examples: 0.3, -0.1i, 0.3-0.1i,
1e-2+2.5e-3i); outputs use the same format.  JSON output is
deterministic byte-for-byte for fixed inputs and seed (stable key
order, no timestamps); CSV splits complex values into re/im columns.

Exit codes: 0 success (verify: suite passed), 1 verify suite failure,
2 usage or domain errors.  Domain violations name the violated
constraint on stderr instead of raising a traceback.
"""

import argparse
import json
import re
import sys

import numpy as np

from . import averaging, degenerations, kernels, rmatrix
from . import verify as verify_mod
from .theta import DomainError, EllipticParams, TruncationOverflowError, theta


# ---------------------------------------------------------------------------
# Complex argument round-tripping
# ---------------------------------------------------------------------------


def parse_complex(text):
    """Parse "a+bi" (also plain reals, "i", "-0.4i", exponent forms)."""
    s = str(text).strip().lower().replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    s = re.sub(r"(?<![0-9.])i$", "1j", s)  # bare i, +i, -i
    s = re.sub(r"i$", "j", s)
    try:
        return complex(s)
    except ValueError:
        raise ValueError(
            f"cannot parse {text!r} as a complex number; expected forms like "
            "0.3, -0.1i or 0.3-0.1i"
        )


def format_complex(z):
    """Shortest exact decimal form "a+bi"; round-trips through parse_complex."""
    z = complex(z)
    if z.imag == 0.0:
        return repr(z.real)
    if z.real == 0.0:
        return repr(z.imag) + "i"
    sign = "+" if z.imag >= 0.0 else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def _jsonable(value):
    if isinstance(value, complex):
        return format_complex(value)
    if isinstance(value, (np.complexfloating,)):
        return format_complex(complex(value))
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def _print_json(obj):
    print(json.dumps(_jsonable(obj), indent=2))


def _print_csv(header, rows):
    print(",".join(header))
    for row in rows:
        print(",".join(str(c) for c in row))


def _complex_columns(z):
    z = complex(z)
    return [repr(z.real), repr(z.imag)]


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

EVAL_KERNELS = (
    "theta", "g0", "g_lambda", "gamma", "phi", "psi_tilde", "psi_cth",
    "psi_mu", "r_elliptic", "r_a", "r_b", "r_c",
)


def _require(args, names, kernel):
    values = []
    for name in names:
        val = getattr(args, name.replace("lambda", "lam"))
        if val is None:
            flags = " ".join(f"--{n}" for n in names)
            raise DomainError(f"kernel {kernel!r} requires {flags}")
        values.append(val)
    return values


def _elliptic_params(tau, truncation):
    if truncation is None:
        return EllipticParams(tau)
    return EllipticParams(tau, max_terms=truncation)


def _cmd_eval(args):
    kernel = args.kernel
    inputs = {}

    def note(**kw):
        inputs.update(kw)

    if kernel == "theta":
        (u, tau) = _require(args, ("u", "tau"), kernel)
        value = theta(u, _elliptic_params(tau, args.truncation))
        note(u=u, tau=tau)
    elif kernel == "g0":
        (w, tau) = _require(args, ("w", "tau"), kernel)
        value = kernels.g0(w, _elliptic_params(tau, args.truncation))
        note(w=w, tau=tau)
    elif kernel == "g_lambda":
        (w, lam, tau) = _require(args, ("w", "lambda", "tau"), kernel)
        value = kernels.g_lambda(w, lam, _elliptic_params(tau, args.truncation))
        note(w=w, **{"lambda": lam}, tau=tau)
    elif kernel == "gamma":
        (w, tau) = _require(args, ("w", "tau"), kernel)
        value = kernels.fourier_gamma(w, _elliptic_params(tau, args.truncation))
        note(w=w, tau=tau)
    elif kernel == "phi":
        (w,) = _require(args, ("w",), kernel)
        value = degenerations.phi(w, args.sign)
        note(w=w, sign=args.sign)
    elif kernel == "psi_tilde":
        (w,) = _require(args, ("w",), kernel)
        value = degenerations.psi_tilde(w, args.sign)
        note(w=w, sign=args.sign)
    elif kernel == "psi_cth":
        (w, eta) = _require(args, ("w", "eta"), kernel)
        value = degenerations.psi_cth(w, eta)
        note(w=w, eta=eta)
    elif kernel == "psi_mu":
        (w, mu, eta) = _require(args, ("w", "mu", "eta"), kernel)
        value = degenerations.psi_mu(w, args.sign, mu, eta)
        note(w=w, sign=args.sign, mu=mu, eta=eta)
    elif kernel == "r_elliptic":
        (u, v, lam, tau) = _require(args, ("u", "v", "lambda", "tau"), kernel)
        value = rmatrix.build_r(u, v, lam, _elliptic_params(tau, args.truncation))
        note(u=u, v=v, **{"lambda": lam}, tau=tau)
    elif kernel in ("r_a", "r_b"):
        (u, v) = _require(args, ("u", "v"), kernel)
        kind = f"{kernel[-1]}_{args.family}"
        value = degenerations.build_degenerate_r(kind, u, v)
        note(u=u, v=v, family=args.family)
    elif kernel == "r_c":
        (u, v, mu, eta) = _require(args, ("u", "v", "mu", "eta"), kernel)
        value = degenerations.build_degenerate_r("c_cyl", u, v, mu=mu, eta=eta)
        note(u=u, v=v, mu=mu, eta=eta)
    else:
        raise DomainError(f"unknown kernel {kernel!r}; choose from {', '.join(EVAL_KERNELS)}")

    is_matrix = isinstance(value, np.ndarray)
    if args.output == "json":
        _print_json({"kernel": kernel, "inputs": inputs, "value": value})
        return 0
    input_names = list(inputs)
    input_cols = [
        format_complex(v) if isinstance(v, (complex, float, int)) else str(v)
        for v in inputs.values()
    ]
    if is_matrix:
        rows = [
            input_cols + [i, j] + _complex_columns(value[i, j])
            for i in range(4)
            for j in range(4)
        ]
        _print_csv(["kernel"] + input_names + ["row", "col", "value_re", "value_im"],
                   [[kernel] + r for r in rows])
    else:
        _print_csv(["kernel"] + input_names + ["value_re", "value_im"],
                   [[kernel] + input_cols + _complex_columns(value)])
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _cmd_verify(args):
    if args.list_suites:
        for name in verify_mod.SUITE_NAMES:
            print(f"{name}: {verify_mod.SUITES[name].header}")
        return 0
    if args.suite is None:
        raise DomainError("verify requires --suite (or --list-suites)")
    if args.samples < 1:
        raise DomainError(f"--samples must be >= 1, got {args.samples}")
    if not args.tol > 0.0:
        raise DomainError(f"--tol must be positive, got {args.tol}")
    try:
        report = verify_mod.run_suite(
            args.suite, samples=args.samples, seed=args.seed, tol=args.tol,
            nodes=args.nodes,
        )
    except ValueError as exc:
        raise DomainError(str(exc))
    if args.output == "json":
        _print_json({
            "suite": report.suite,
            "header": report.header,
            "samples": report.samples,
            "seed": report.seed,
            "tolerance": report.tolerance,
            "max_residual": report.max_residual,
            "mean_residual": report.mean_residual,
            "failures": [
                {"inputs": inputs, "residual": residual}
                for inputs, residual in report.failures
            ],
            "passed": report.passed,
        })
    else:
        _print_csv(
            ["suite", "samples", "seed", "tolerance", "max_residual",
             "mean_residual", "failure_count", "passed"],
            [[report.suite, report.samples, report.seed, repr(report.tolerance),
              repr(report.max_residual), repr(report.mean_residual),
              len(report.failures), report.passed]],
        )
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# degenerate
# ---------------------------------------------------------------------------


def _parse_number_list(text, what, cast=float):
    try:
        values = [cast(part) for part in str(text).split(",") if part.strip()]
    except ValueError:
        raise DomainError(f"{what} must be a comma-separated list of numbers, got {text!r}")
    if len(values) < 2:
        raise DomainError(f"{what} needs at least two entries, got {text!r}")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise DomainError(f"{what} must be strictly increasing, got {text!r}")
    return values


def _cmd_degenerate(args):
    scales = _parse_number_list(args.scales, "--scales")
    w = args.w if args.w is not None else 0.3 - 0.2j
    case = args.case
    kwargs = {}
    if case == "a":
        tau = args.tau if args.tau is not None else 0.9j
        kwargs["p"] = EllipticParams(tau)
        kwargs["lam"] = args.lam if args.lam is not None else 0.3 - 0.2j
    elif case == "b":
        kwargs["lam"] = args.lam if args.lam is not None else 0.3 - 0.2j
    else:
        eta = args.eta if args.eta is not None else 1.0
        kwargs["eta"] = eta
        kwargs["mu"] = args.mu if args.mu is not None else 0.3
        # any fixed lam with -1/eta < Im lam < 0 keeps the shrinking
        # lambda-band valid at every scale in the ladder
        kwargs["lam"] = args.lam if args.lam is not None else -0.4j / eta
    table = {}
    for scale in scales:
        errors = degenerations.limit_error(case, scale, w, **kwargs)
        for kernel_id, err in errors.items():
            table.setdefault(kernel_id, []).append(float(err))

    log_scales = np.log(np.asarray(scales))
    rates = {}
    for kernel_id, errs in table.items():
        log_err = np.log(np.asarray(errs))
        if case == "b":
            rates[kernel_id] = float(np.polyfit(np.asarray(scales), log_err, 1)[0])
        else:
            rates[kernel_id] = float(np.polyfit(log_scales, log_err, 1)[0])

    rows = []
    for i, scale in enumerate(scales):
        for kernel_id in table:
            rows.append({
                "scale": scale,
                "kernel_id": kernel_id,
                "max_error": table[kernel_id][i],
                "fitted_rate": rates[kernel_id],
            })
    if args.output == "json":
        _print_json({
            "case": case,
            "w": w,
            "rate_model": "log-linear in scale" if case == "b" else "log-log slope",
            "rows": rows,
        })
    else:
        _print_csv(
            ["scale", "kernel_id", "max_error", "fitted_rate"],
            [[row["scale"], row["kernel_id"], repr(row["max_error"]),
              repr(row["fitted_rate"])] for row in rows],
        )
    return 0


# ---------------------------------------------------------------------------
# average
# ---------------------------------------------------------------------------

AVERAGE_IDENTITIES = (
    "avctg", "avctg-p", "avctg-m", "rmatrix-elliptic", "rational-to-trig",
    "rmatrix-c",
)


def _cmd_average(args):
    n_list = _parse_number_list(args.n_list, "--n-list", cast=int)
    identity = args.identity
    u = args.u if args.u is not None else 0.3 - 0.2j
    paired = args.tail_mode == "paired"

    if identity in ("avctg", "avctg-p", "avctg-m", "rmatrix-elliptic"):
        tau = args.tau if args.tau is not None else 0.8j
        p = EllipticParams(tau)
        lam = args.lam if args.lam is not None else 0.15 - 0.25j
        if identity == "avctg":
            target = kernels.g0(u, p)
            def residual(cfg):
                return abs(averaging.vp_ctg_sum(u, p, cfg) - target)
        elif identity == "avctg-p":
            target = kernels.g_lambda(u, lam, p)
            def residual(cfg):
                return abs(averaging.vp_glambda_sum(u, lam, "+", p, cfg) - target)
        elif identity == "avctg-m":
            target = kernels.g_lambda(u, -lam, p)
            def residual(cfg):
                return abs(averaging.vp_glambda_sum(u, lam, "-", p, cfg) - target)
        else:
            target = rmatrix.build_r(u, 0.0, lam, p)
            def residual(cfg):
                avg = averaging.average_rmatrix_elliptic(u, lam, p, cfg)
                return float(np.max(np.abs(avg - target)))
    else:
        mu = args.mu if args.mu is not None else 0.5
        eta = args.eta if args.eta is not None else 1.0
        if identity == "rational-to-trig":
            target = 2.0 * np.pi * eta * np.exp(2.0 * np.pi * eta * mu * u) / (
                np.exp(2.0 * np.pi * eta * u) - 1.0
            )
            def residual(cfg):
                return abs(averaging.vp_rational_to_trig(u, mu, eta, cfg) - target)
        else:
            target = degenerations.build_degenerate_r("c_cyl", u, 0.0, mu=mu, eta=eta)
            def residual(cfg):
                avg = averaging.average_rmatrix_c(u, mu, eta, cfg)
                return float(np.max(np.abs(avg - target)))

    rows = []
    for n in n_list:
        cfg = averaging.AveragingConfig(n, args.tail_mode)
        rows.append({"N": n, "residual": float(residual(cfg)), "paired": paired})
    if args.output == "json":
        _print_json({"identity": identity, "rows": rows})
    else:
        _print_csv(
            ["N", "residual", "paired"],
            [[row["N"], repr(row["residual"]), row["paired"]] for row in rows],
        )
    return 0


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def _add_common_values(sub):
    sub.add_argument("--u", type=parse_complex, default=None)
    sub.add_argument("--v", type=parse_complex, default=None)
    sub.add_argument("--w", type=parse_complex, default=None)
    sub.add_argument("--tau", type=parse_complex, default=None)
    sub.add_argument("--lambda", dest="lam", type=parse_complex, default=None)
    sub.add_argument("--mu", type=parse_complex, default=None)
    sub.add_argument("--eta", type=parse_complex, default=None)
    sub.add_argument("--output", choices=("json", "csv"), default="json")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="elliptic-rmatrix",
        description="Elliptic dynamical r-matrix kernels, identities and limits.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_eval = subs.add_parser("eval", help="evaluate one kernel or r-matrix")
    p_eval.add_argument("--kernel", required=True, choices=EVAL_KERNELS)
    _add_common_values(p_eval)
    p_eval.add_argument("--sign", choices=("+", "-"), default="+")
    p_eval.add_argument("--family", choices=("k0", "cyl"), default="k0",
                        help="domain family for r_a / r_b")
    p_eval.add_argument("--truncation", type=int, default=None,
                        help="theta series term cap (max_terms)")
    p_eval.set_defaults(func=_cmd_eval)

    p_verify = subs.add_parser("verify", help="run one identity suite")
    p_verify.add_argument("--suite", choices=verify_mod.SUITE_NAMES, default=None)
    p_verify.add_argument("--samples", type=int, default=verify_mod.DEFAULT_SAMPLES)
    p_verify.add_argument("--seed", type=int, default=verify_mod.DEFAULT_SEED)
    p_verify.add_argument("--tol", type=float, default=verify_mod.DEFAULT_TOL)
    p_verify.add_argument("--nodes", type=int, default=kernels.DEFAULT_QUAD_NODES)
    p_verify.add_argument("--list-suites", action="store_true")
    p_verify.add_argument("--output", choices=("json", "csv"), default="json")
    p_verify.set_defaults(func=_cmd_verify)

    p_degen = subs.add_parser("degenerate", help="scaling-limit error ladder")
    p_degen.add_argument("--case", required=True, choices=("a", "b", "c"))
    p_degen.add_argument("--scales", required=True,
                         help="comma-separated strictly increasing ladder")
    _add_common_values(p_degen)
    p_degen.set_defaults(func=_cmd_degenerate)

    p_avg = subs.add_parser("average", help="lattice-averaging residual table")
    p_avg.add_argument("--identity", required=True, choices=AVERAGE_IDENTITIES)
    p_avg.add_argument("--n-list", required=True,
                       help="comma-separated strictly increasing truncation widths")
    p_avg.add_argument("--tail-mode", choices=("plain", "paired"), default="paired")
    _add_common_values(p_avg)
    p_avg.set_defaults(func=_cmd_average)

    return parser


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, TruncationOverflowError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
