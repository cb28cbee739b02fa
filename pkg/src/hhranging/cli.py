"""Batch command-line interface emitting CSV tables.

Subcommands: exponents, bounds, simulate, wishart-oracle, ctr-exact.
Configuration comes from an optional flat key=value file (--config) with
command-line flags taking precedence.  CSV goes to stdout, or atomically
to --out; diagnostics go to stderr.

Exit codes: 0 success, 2 parameter error, 3 numerical-convergence error,
4 statistical-floor error.
"""

from __future__ import annotations

import argparse
import io
import math
import os
import sys
import tempfile

import numpy as np

from . import analytics, harness, oracles
from .analytics import CctRegime
from .errors import NumericalError, ParameterError, StatisticalFloorError
from .model import Mode, ProtocolParams

PARALLELISM_ENV = "HHRANGING_PARALLELISM"

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_NUMERICAL = 3
EXIT_STATISTICAL = 4


def _default_parallelism() -> int:
    value = os.environ.get(PARALLELISM_ENV, "")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def _parse_m_grid(spec: str) -> list[int]:
    """Parse 'a:b:step' (inclusive of b when hit) or a comma list."""
    try:
        if ":" in spec:
            a, b, step = (int(v) for v in spec.split(":"))
            if step < 1 or b < a:
                raise ValueError
            return list(range(a, b + 1, step))
        return [int(v) for v in spec.split(",")]
    except ValueError:
        raise ParameterError(f"bad m-grid {spec!r}; expected a:b:step or a comma list")


def _parse_d_list(spec: str) -> list[int]:
    try:
        return [int(v) for v in spec.split(",")]
    except ValueError:
        raise ParameterError(f"bad d list {spec!r}; expected comma-separated integers")


def _fmt(value) -> str:
    """Shortest representation that parses back exactly."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(rows: list[list], header: list[str], out_path: str | None) -> None:
    buf = io.StringIO()
    buf.write(",".join(header) + "\r\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\r\n")
    data = buf.getvalue()
    if out_path is None:
        sys.stdout.write(data)
        return
    directory = os.path.dirname(os.path.abspath(out_path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(data)
        os.replace(tmp, out_path)  # atomic: no partial file on failure
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _log_scale(args) -> float:
    return 1.0 if args.log_base == "e" else math.log(10.0)


def _protocol_params(args, d: int, m: int) -> ProtocolParams:
    return ProtocolParams(
        kappa=args.kappa,
        n_s=args.n_s,
        n_b=args.n_b,
        d=d,
        m_pulses=m,
        mode=Mode(args.mode),
    )


def cmd_exponents(args) -> None:
    header = [
        "d", "kappa", "n_s", "n_b", "xi_ctr", "xi_qtr", "xi_hh", "xi_hh_asym",
        "xi_cct_large_idler", "xi_cct_equal_small", "ratio_hh_ctr",
    ]
    rows = []
    for d in _parse_d_list(args.d):
        rep = analytics.exponent_report(d, args.kappa, args.n_s, args.n_b)
        rows.append([
            d, args.kappa, args.n_s, args.n_b,
            rep.xi_ctr, rep.xi_qtr, rep.xi_hh, rep.xi_hh_large_d,
            analytics.xi_cct(args.kappa, args.n_s, args.n_b, CctRegime.LARGE_IDLER),
            analytics.xi_cct(args.kappa, args.n_s, args.n_b, CctRegime.EQUAL_SMALL),
            rep.ratio_hh_over_ctr,
        ])
    _write_csv(rows, header, args.out)


def cmd_bounds(args) -> None:
    scale = _log_scale(args)
    d = int(args.d)
    rows = []
    for m, lq, lc, ratio in analytics.ratio_curve(
        d, args.kappa, args.n_s, args.n_b, _parse_m_grid(args.m_grid),
        include_prefactor=args.include_prefactor,
    ):
        rows.append([int(m), lq / scale, lc / scale, ratio])
    _write_csv(rows, ["m", "log_qtr_bound", "log_ctr_exact", "ratio"], args.out)


def cmd_simulate(args) -> None:
    if (args.m is None) == (args.m_grid is None):
        raise ParameterError("simulate needs exactly one of --m or --m-grid")
    m_grid = [args.m] if args.m is not None else _parse_m_grid(args.m_grid)
    d = int(args.d)
    params = _protocol_params(args, d, m_grid[0])
    sweep = harness.sweep_qtr_vs_ctr(
        params, m_grid, args.trials, args.seed, parallelism=args.parallelism
    )
    scale = _log_scale(args)
    rows = []
    for point in sweep:
        e = point.estimate
        log_p = math.log(e.p_hat) / scale if e.p_hat > 0 else float("-inf")
        rows.append([
            point.m, e.trials, e.errors, e.p_hat, e.ci_low, e.ci_high,
            log_p, point.log_bound_qtr / scale,
        ])
    _write_csv(
        rows,
        ["m", "trials", "errors", "p_hat", "ci_low", "ci_high", "log_p_hat", "log_qtr_bound"],
        args.out,
    )


def cmd_wishart_oracle(args) -> None:
    rows = []
    for d in _parse_d_list(args.d):
        rng = np.random.Generator(np.random.SFC64(np.random.SeedSequence((args.seed, d))))
        res = oracles.wishart_lambda_max_mean_mc(d, args.trials, rng)
        closed = analytics.wishart_lambda_max_mean_closed(d)
        rows.append([
            d, res.n_samples, res.estimate, res.standard_error, closed,
            abs(res.estimate - closed) / closed,
        ])
    _write_csv(
        rows, ["d", "n_samples", "mc_mean", "mc_stderr", "closed_form", "rel_err"], args.out
    )


def cmd_ctr_exact(args) -> None:
    scale = _log_scale(args)
    d = int(args.d)
    rows = []
    for m in _parse_m_grid(args.m_grid):
        log_p = analytics.ctr_exact_log_error(d, args.kappa, args.n_s, args.n_b, m)
        z = analytics.ctr_signal_strength(args.kappa, args.n_s, args.n_b, m)
        rows.append([m, z, log_p / scale])
    _write_csv(rows, ["m", "z", "log_ctr_exact"], args.out)


def _add_common(parser: argparse.ArgumentParser, default_d: str = "2") -> None:
    parser.add_argument("--kappa", type=float, default=0.01, help="target reflectivity")
    parser.add_argument("--n-s", type=float, default=0.1, help="mean signal photon number")
    parser.add_argument("--n-b", type=float, default=600.0, help="mean background photon number")
    parser.add_argument("--d", default=default_d, help="candidate position count")
    parser.add_argument("--mode", choices=["exact", "asymptotic"], default="asymptotic")
    parser.add_argument("--log-base", choices=["e", "10"], default="e")
    parser.add_argument(
        "--include-prefactor",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="include the (d-1)/2 union-bound prefactor in log bounds",
    )
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument(
        "--parallelism",
        type=int,
        default=None,
        help=f"worker processes (default: ${PARALLELISM_ENV} or 1)",
    )
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    parser.add_argument("--config", default=None, help="key=value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hhranging",
        description="Quantum target ranging with a hetero-homodyne receiver: "
        "closed-form exponents, error-probability curves, and Monte Carlo simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponents", help="closed-form error exponents per d")
    _add_common(p)
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("bounds", help="QTR bound vs exact CTR error over an m grid")
    _add_common(p)
    p.add_argument("--m-grid", required=True, help="a:b:step or comma list")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="Monte Carlo receiver error probability")
    _add_common(p)
    p.add_argument("--m", type=int, default=None, help="pulse count")
    p.add_argument("--m-grid", default=None, help="a:b:step or comma list")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("wishart-oracle", help="Monte Carlo check of E lambda_max")
    _add_common(p)
    p.set_defaults(func=cmd_wishart_oracle)

    p = sub.add_parser("ctr-exact", help="exact classical baseline error over an m grid")
    _add_common(p)
    p.add_argument("--m-grid", required=True, help="a:b:step or comma list")
    p.set_defaults(func=cmd_ctr_exact)

    return parser


def _load_config(path: str) -> dict[str, str]:
    config = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ParameterError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, value = line.split("=", 1)
                config[key.strip().replace("_", "-")] = value.strip()
    except OSError as exc:
        raise ParameterError(f"cannot read config {path}: {exc}")
    return config


_TRUE_VALUES = {"1", "true", "yes", "on"}
_FLAG_KEYS = {"include-prefactor"}


def _merge_config_argv(argv: list[str]) -> list[str]:
    """Expand --config into flags placed before the explicit ones.

    Later occurrences win in argparse, so command-line flags override the
    file.
    """
    if not argv or argv[0].startswith("-"):
        return argv
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv[1:])
    if known.config is None:
        return argv
    flags: list[str] = []
    for key, value in _load_config(known.config).items():
        if key in _FLAG_KEYS:
            if value.lower() in _TRUE_VALUES:
                flags.append(f"--{key}")
            else:
                flags.append(f"--no-{key}")
        else:
            flags.extend([f"--{key}", value])
    return [argv[0], *flags, *argv[1:]]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _merge_config_argv(argv)
        args = build_parser().parse_args(argv)
        if getattr(args, "parallelism", None) is None:
            args.parallelism = _default_parallelism()
        args.func(args)
        return EXIT_OK
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except StatisticalFloorError as exc:
        print(f"statistical floor: {exc}", file=sys.stderr)
        return EXIT_STATISTICAL


if __name__ == "__main__":
    sys.exit(main())
