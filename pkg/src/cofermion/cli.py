"""``cofermion`` command line: verify, sweep, figure1, figure2, oracle.

Exit codes: 0 success, 1 a checked condition failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import experiments as ex
from .composite import STATE_LEVELS, write_family_csv
from .oracle import run_oracle

log = logging.getLogger("cofermion")

LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


class UsageError(Exception):
    pass


def _setup_logging() -> None:
    name = os.environ.get("COFERMION_LOG", "quiet").strip().lower()
    level = LOG_LEVELS.get(name, logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    if name not in LOG_LEVELS:
        log.warning("COFERMION_LOG=%r not one of %s; using quiet", name, "/".join(LOG_LEVELS))


def _add_family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=ex.FAMILIES, default="two-mode")
    p.add_argument("--family-file", help="read the family from an alpha,mu,nu,re,im CSV instead")
    p.add_argument("--chi", help="linear | quasiboson:m,kappa | table:FILE | chi2:VALUE")
    p.add_argument("--chi2", type=float, help="shorthand for --chi chi2:VALUE")
    for name in ("theta", "theta1", "theta2", "theta3", "phi1", "phi2", "phi3", "psi", "phi"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--mu0", type=int, choices=(1, 2), default=1)
    p.add_argument("--u", type=complex, help="SU(2) entry u, e.g. 0.6+0.0j")
    p.add_argument("--v", type=complex, help="SU(2) entry v, e.g. 0.8j")
    p.add_argument("--m", type=int, default=1, help="Schmidt rank of the coboson family")
    p.add_argument("--dim", type=int, help="modes per constituent species for coboson/general/random")
    p.add_argument("--random-uv", action="store_true",
                   help="draw the outer unitaries (and u, v) from --seed")
    p.add_argument("--nmax", type=int, default=3, help="boson occupation cutoff")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="key=value file supplying defaults for the flags above")


def read_config(path: str | Path) -> dict[str, str]:
    """``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _apply_config(sub: argparse.ArgumentParser, path: str) -> None:
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
    defaults = {}
    for key, text in read_config(path).items():
        action = actions.get(key)
        if action is None:
            raise UsageError(f"{path}: unknown key {key!r}")
        if action.const is True and action.nargs == 0:  # store_true flag
            defaults[key] = text.lower() in ("1", "true", "yes", "on")
            continue
        try:
            value = action.type(text) if action.type else text
        except ValueError as exc:
            raise UsageError(f"{path}: bad value for {key}: {exc}") from None
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"{path}: {key} must be one of {list(action.choices)}")
        defaults[key] = value
    sub.set_defaults(**defaults)


def _chi_spec(args) -> str:
    if args.chi and args.chi2 is not None:
        raise UsageError("give either --chi or --chi2, not both")
    if args.chi2 is not None:
        return f"chi2:{args.chi2!r}"
    return args.chi or ex.default_chi_spec(args.family)


def _request(args) -> ex.FamilyRequest:
    kw = {k: getattr(args, k) for k in ("theta", "theta1", "theta2", "theta3", "phi1", "phi2",
                                        "phi3", "psi", "phi", "u", "v", "dim")
          if getattr(args, k) is not None}
    return ex.FamilyRequest(args.family, mu0=args.mu0, m=args.m, random_uv=args.random_uv,
                            seed=args.seed, **kw)


def _states(text: str) -> tuple[str, ...]:
    states = tuple(s.strip() for s in text.split(",") if s.strip())
    bad = [s for s in states if s not in STATE_LEVELS]
    if bad or not states:
        raise UsageError(f"--states takes a comma list from {', '.join(STATE_LEVELS)}")
    return states


def cmd_verify(args) -> int:
    job = ex.VerifyJob(_request(args), _chi_spec(args), args.nmax, _states(args.states),
                       args.tol, args.family_file)
    fam, chi, rep = job.run()
    if args.export_family:
        write_family_csv(fam, args.export_family)
    ex.write_csv(("condition", "residual", "passed"), rep.rows(), args.out)
    if not rep.ok:
        print(f"realization fails: {', '.join(rep.failed())} (chi = {chi.label})", file=sys.stderr)
        return 1
    return 0


def cmd_sweep(args) -> int:
    params = dict(ex.parse_sweep_param(t) for t in args.param)
    spec = ex.SweepSpec(params, args.family, _chi_spec(args), args.out, args.nmax, args.tol,
                        args.seed, base=_request(args))
    header, rows = ex.run_sweep(spec)
    ex.write_csv(header, rows, spec.out)
    n_fail = sum(not r[header.index("passed")] for r in rows)
    log.info("%d of %d sweep points fail", n_fail, len(rows))
    return 0


def _write_plot_script(path, text) -> None:
    if path:
        Path(path).write_text(text)


def cmd_figure1(args) -> int:
    ex.write_csv(ex.FIGURE1_HEADER, ex.figure1_rows(args.steps), args.out)
    _write_plot_script(args.plot_script, ex.FIGURE1_PLOT)
    return 0


def cmd_figure2(args) -> int:
    ex.write_csv(ex.FIGURE2_HEADER, ex.figure2_rows(args.steps), args.out)
    _write_plot_script(args.plot_script, ex.FIGURE2_PLOT)
    return 0


def cmd_oracle(args) -> int:
    chi = ex.parse_chi(args.chi, args.nmax) if args.chi else None
    results = run_oracle(args.seed, args.trials, chi)
    ex.write_csv(("check", "max_residual", "tol", "passed"),
                 [(r.name, r.residual, r.tol, r.passed) for r in results], args.out)
    for r in results:
        if r.detail:
            log.info("%s: %s", r.name, r.detail)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"failing checks: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cofermion", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subparsers = sub.choices

    p = sub.add_parser("verify", help="check the realization conditions for one family")
    _add_family_args(p)
    p.add_argument("--states", default="vacuum,one,two")
    p.add_argument("--out", help="report CSV (default: stdout)")
    p.add_argument("--export-family", help="also write the family as CSV")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="verify a family over a parameter grid")
    _add_family_args(p)
    p.add_argument("--param", action="append", required=True, metavar="NAME=START,STOP,STEPS")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure1", help="two-mode entropy and purity versus theta")
    p.add_argument("--steps", type=int, default=201)
    p.add_argument("--out")
    p.add_argument("--plot-script", help="write a matplotlib script for the CSV here")
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("figure2", help="three-mode equi-entropic data on two constrained slices")
    p.add_argument("--steps", type=int, default=32, help="grid points per axis (>= 16)")
    p.add_argument("--out")
    p.add_argument("--plot-script")
    p.set_defaults(func=cmd_figure2)

    p = sub.add_parser("oracle", help="run the brute-force invariant suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--chi", help="extra structure function to include in the checks")
    p.add_argument("--nmax", type=int, default=3)
    p.add_argument("--out", help="summary CSV (default: stdout)")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            # config values become defaults, so explicit flags still win
            _apply_config(parser.subparsers[args.command], args.config)
            args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"cofermion {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
