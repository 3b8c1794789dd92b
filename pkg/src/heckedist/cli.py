"""Command line interface.

Exit codes: 0 success, 1 domain/numeric error, 2 data-integrity error,
3 transport error, 64 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .chebyshev import CDF_TOL, MeasureP, cdf, cheb_eval, density, integrate, moment_closed_form, sample
from .dataset import DatasetFile, DatasetHeader, atomic_write, parse_dataset, write_dataset
from .equidist import DEFAULT_NMAX, build_report, report_to_json, trace_ratio_prediction
from .errors import DomainError, HeckeDistError
from .numtheory import beta_psi_f, main_term_trace, predicted_moment, psi, psi_new
from .spectra import EigenRecord

EX_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _int_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("-")
    try:
        lo_i = int(lo)
        return lo_i, int(hi) if hi else lo_i
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or range a-b, got {text!r}")


def cmd_psi(args, out):
    if args.func == "psi":
        print(fmt(psi(args.n if args.n is not None else args.N)), file=out)
    elif args.func == "beta":
        print(fmt(beta_psi_f(args.n if args.n is not None else args.N, args.f)), file=out)
    else:
        print(fmt(psi_new(args.N, args.f)), file=out)


def cmd_predict(args, out):
    if args.N is None:
        print(fmt(predicted_moment(args.n, args.p)), file=out)
        return
    if args.m is not None:
        print(fmt(main_term_trace(args.m, args.N, args.f, args.k)), file=out)
        return
    predicted, num, den = trace_ratio_prediction(args.N, args.f, args.k, args.p, args.n)
    print("predicted,main_term_numerator,main_term_denominator", file=out)
    print(f"{fmt(predicted)},{fmt(num)},{fmt(den)}", file=out)


def cmd_moments(args, out):
    mu = MeasureP(args.p)
    print("n,quadrature,closed_form,abs_error", file=out)
    for n in range(args.nmax + 1):
        q = integrate(lambda x, n=n: cheb_eval(n, x), mu, args.tol)
        exact = moment_closed_form(n, args.p)
        print(f"{n},{fmt(q)},{fmt(exact)},{fmt(abs(q - float(exact)))}", file=out)


def cmd_table(args, out):
    mu = MeasureP.parse(args.p)
    xs = np.linspace(-2.0, 2.0, args.points)
    if args.command == "density":
        ys = density(mu, xs)
    else:
        ys = cdf(mu, xs, args.tol)
    print(f"x,{args.command}", file=out)
    for x, y in zip(xs, ys):
        print(f"{fmt(x)},{fmt(y)}", file=out)


def cmd_sample(args, out):
    mu = MeasureP.parse(args.p)
    draws = sample(mu, args.count, args.seed)
    if args.dataset:
        if mu.is_infinite:
            raise DomainError("synthetic datasets need a finite prime p")
        records = tuple(
            EigenRecord(args.level, args.weight, None, mu.p, lam=float(v), form_id=f"synthetic.{args.seed}.{i}")
            for i, v in enumerate(draws)
        )
        header = DatasetHeader(source=f"synthetic mu_{mu.p} seed={args.seed}", complete=True)
        write_dataset(DatasetFile(header, records), args.dataset)
        print(f"wrote {len(records)} records to {args.dataset}", file=out)
        return
    for v in draws:
        print(fmt(v), file=out)


def cmd_analyze(args, out):
    ds = parse_dataset(args.input)
    family = [ms for ms in ds.multisets() if ms.p == args.p]
    if not family:
        raise DomainError(f"no records for p={args.p} in {args.input}")
    report = build_report(family, args.p, args.nmax, workers=args.workers)
    text = report_to_json(report)
    if args.out:
        atomic_write(args.out, text + "\n")
    else:
        print(text, file=out)
    if args.csv:
        atomic_write(f"{args.csv}_moments.csv", report.moments_csv())
        atomic_write(f"{args.csv}_ks.csv", report.ks_csv())
    for s in report.family:
        err = "-" if s.moments is None else fmt(s.moments.max_abs_error)
        print(f"N={s.level} k={s.weight} chi={s.char_label or '1'} dim={s.dimension} ks={fmt(s.ks)} max_moment_err={err}",
              file=sys.stderr)


def cmd_fetch(args, out):
    from .characters import DirichletCharacter
    from .remote import SpaceQuery, fetch_remote, load_config

    cfg = load_config(args.config)
    if args.offline:
        cfg.offline = True
    if args.cache_dir:
        cfg.cache_dir = Path(args.cache_dir)
    character = DirichletCharacter.from_json(json.loads(args.character)) if args.character else None
    query = SpaceQuery(args.levels, args.weights, args.p, args.conductor, character)
    ds = fetch_remote(query, cfg)
    for note in ds.header.notes:
        print(f"advisory: {note}", file=sys.stderr)
    if args.out:
        write_dataset(ds, args.out)
        print(f"wrote {len(ds.records)} records to {args.out}", file=out)
    else:
        from .dataset import serialize_dataset

        out.write(serialize_dataset(ds))


def cmd_check(args, out):
    from .check import run_checks

    failed = 0
    for name, ok, detail in run_checks(args.full):
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}", file=out)
        failed += not ok
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="heckedist", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("psi", help="psi, beta*psi_f and psi_new values")
    p.add_argument("--func", choices=("new", "psi", "beta"), default="new")
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--f", type=int, default=1)
    p.add_argument("--n", type=int)
    p.set_defaults(run=cmd_psi)

    p = sub.add_parser("predict", help="limiting moments and trace main terms")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--N", type=int)
    p.add_argument("--f", type=int, default=1)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--m", type=int, help="print the trace main term at T_m instead")
    p.set_defaults(run=cmd_predict)

    p = sub.add_parser("moments", help="quadrature vs closed-form X_n moments of mu_p")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--nmax", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(run=cmd_moments)

    for name in ("density", "cdf"):
        p = sub.add_parser(name, help=f"{name} table of mu_p as CSV")
        p.add_argument("--p", required=True, help="prime or 'inf'")
        p.add_argument("--points", type=int, default=101)
        p.add_argument("--tol", type=float, default=CDF_TOL)
        p.set_defaults(run=cmd_table)

    p = sub.add_parser("sample", help="synthetic mu_p draws")
    p.add_argument("--p", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dataset", help="write a JSONL dataset instead of printing values")
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--weight", type=int, default=2)
    p.set_defaults(run=cmd_sample)

    p = sub.add_parser("analyze", help="dataset -> equidistribution report")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--nmax", type=int, default=DEFAULT_NMAX)
    p.add_argument("--out")
    p.add_argument("--csv", help="prefix for <prefix>_moments.csv and <prefix>_ks.csv")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(run=cmd_analyze)

    p = sub.add_parser("fetch", help="download eigenvalue data into a dataset")
    p.add_argument("--levels", type=_int_range, required=True)
    p.add_argument("--weights", type=_int_range, default=(2, 2))
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--conductor", type=int)
    p.add_argument("--character", help='serialized character, e.g. \'{"modulus": 5, "images": [[2, 1, 4]]}\'')
    p.add_argument("--config")
    p.add_argument("--cache-dir")
    p.add_argument("--offline", action="store_true")
    p.add_argument("--out")
    p.set_defaults(run=cmd_fetch)

    p = sub.add_parser("check", help="run the invariant suite")
    p.add_argument("--full", action="store_true", help="exhaustive acceptance ranges")
    p.set_defaults(run=cmd_check)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        code = args.run(args, out)
    except HeckeDistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except json.JSONDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
