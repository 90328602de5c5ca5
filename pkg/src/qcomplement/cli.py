"""Command-line front end: figure datasets, single-state measures, the audit, acceptance.

Exit codes: 0 success, 1 acceptance failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .acceptance import CRITERIA, run_acceptance
from .correlations import average_discord, correlation_report
from .errors import DomainError
from .machines import (
    bh_clone,
    clone1N_then_deleteNM,
    clone_then_delete,
    delete_2to1,
    delete_then_clone,
    deleteN1_then_clone1M,
    gm_clone,
)
from .measurements import OptimizerConfig
from .qmat import DensityMatrix, QubitState
from .sweep import FIGURES, SweepConfig, compat_report, figure_data

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _parse_spec(spec: str) -> tuple[str, dict[str, str]]:
    kind, _, rest = spec.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise UsageError(f"expected key=value in state spec, got {item!r}")
        params[key.strip()] = value.strip()
    return kind.strip(), params


def _take(params: dict[str, str], key: str, cast=float, default=None):
    if key not in params:
        if default is None:
            raise UsageError(f"state spec is missing {key}=")
        return default
    try:
        return cast(params.pop(key))
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {exc}") from None


def build_state(spec: str) -> DensityMatrix:
    """Final state named by a spec such as ``clone:xi=0.2,alpha=0.6`` or ``dc:N=3,M=2,alpha=0.5``."""
    kind, p = _parse_spec(spec)
    psi = QubitState.from_real(_take(p, "alpha"))
    multi = "N" in p
    if kind == "clone":
        rho = bh_clone(psi, _take(p, "xi")).rho_ab
    elif kind == "delete":
        rho = delete_2to1(psi).rho_ab
    elif kind == "cd" and multi:
        rho = clone1N_then_deleteNM(psi, _take(p, "N", int), _take(p, "M", int)).rho
    elif kind == "cd":
        rho = clone_then_delete(psi, _take(p, "xi")).rho_prime
    elif kind == "dc" and multi:
        rho = deleteN1_then_clone1M(psi, _take(p, "N", int), _take(p, "M", int)).rho_f
    elif kind == "dc":
        out = delete_then_clone(psi, _take(p, "xi"))
        branch = _take(p, "branch", str, "aa")
        if branch not in ("aa", "bb"):
            raise UsageError(f"branch must be aa or bb, got {branch!r}")
        rho = out.rho_aa if branch == "aa" else out.rho_bb
    elif kind == "gm":
        n = _take(p, "N", int)
        m = _take(p, "M", int, 0)
        rho = clone1N_then_deleteNM(psi, n, m).rho if m else gm_clone(psi, n).clones
    else:
        raise UsageError(f"unknown state kind {kind!r}; expected clone, delete, cd, dc or gm")
    if p:
        raise UsageError(f"unused keys in state spec: {', '.join(sorted(p))}")
    return rho


def _sweep_config(args, *, accept: bool = False) -> SweepConfig:
    opt = OptimizerConfig()
    if args.starts is not None:
        opt = replace(opt, starts=args.starts)
    if args.tol is not None and not accept:
        opt = replace(opt, tol=args.tol)
    return SweepConfig(
        alpha_steps=args.alpha_steps,
        param_steps=args.param_steps,
        optimizer=opt,
        seed=args.seed,
        out_dir=Path(args.out),
        criterion_tol=args.tol if accept else None,
    )


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha-steps", type=int, default=None, help="alpha grid resolution")
    p.add_argument("--param-steps", type=int, default=None, help="machine-parameter grid resolution")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--starts", type=int, default=None, help="simplex starts per discord search")
    p.add_argument("--tol", type=float, default=None,
                   help="optimizer tolerance; for 'accept' it overrides every criterion tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcomplement", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    fig = sub.add_parser("figure", help="write the dataset of one figure as CSV")
    fig.add_argument("figure", choices=FIGURES)
    meas = sub.add_parser("measures", help="correlation measures of one machine output")
    meas.add_argument("state")
    sub.add_parser("compat", help="audit printed closed forms against numerics")
    acc = sub.add_parser("accept", help="run the acceptance criteria")
    acc.add_argument("--criteria", default=None, help="comma-separated criterion numbers")
    for p in (fig, meas, sub.choices["compat"], acc):
        _common(p)
    return parser


def _fmt(v: float) -> str:
    return f"{v + 0.0:.12g}"


def _measures(args) -> int:
    cfg = _sweep_config(args)
    rho = build_state(args.state)
    if rho.dims == (2, 2):
        rep = correlation_report(rho, cfg.opt)
        for key in ("negativity", "log_negativity", "discord", "geometric_discord"):
            print(f"{key}={_fmt(getattr(rep, key))}")
        print(f"evaluations={rep.evaluations}")
    else:
        res = average_discord(rho, cfg.opt)
        print(f"delta={_fmt(res.value)}")
        for r in res.per_qubit:
            print(f"D({r.kept}|rest)={_fmt(r.value)}")
        print(f"evaluations={res.evaluations}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "figure":
            cfg = _sweep_config(args)
            path = figure_data(args.figure, cfg).write(cfg.out_dir)
            print(path)
            return EXIT_OK
        if args.command == "measures":
            return _measures(args)
        if args.command == "compat":
            cfg = _sweep_config(args)
            report = compat_report(cfg)
            report.write(cfg.out_dir)
            sys.stdout.write(report.to_csv())
            return EXIT_OK
        cfg = _sweep_config(args, accept=True)
        numbers = None
        if args.criteria:
            numbers = [int(k) for k in args.criteria.split(",")]
            unknown = [k for k in numbers if k not in CRITERIA]
            if unknown:
                raise UsageError(f"unknown criteria {unknown}")
        results = run_acceptance(cfg, numbers)
        failed = sum(not r.passed for r in results)
        print(f"{len(results) - failed}/{len(results)} criteria passed")
        return EXIT_FAIL if failed else EXIT_OK
    except (UsageError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
