"""Command-line front end.

Subcommands::

    threshold  recovery threshold and symbol counts for one code
    run        encode, compute, decode one round (optionally with stragglers)
    simulate   seeded Monte-Carlo sweep over worker counts
    tradeoff   PolyDot threshold vs. fusion traffic for every factor pair of m
    verify     exhaustive exponent-map / coefficient-isolation check

Exit codes: 0 success, 2 usage error, 3 threshold failure, 4 invariant violation.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .codec import Code
from .errors import CodedMMError, CorrectnessViolation, InvalidParameter
from .field_poly import DEFAULT_PRIME, FieldConfig
from .matdot import MatDot
from .matrix_core import FieldMatrix
from .multilinear import ChainLayout, verify_isolation
from .nmatrix import VARIANTS, NMatrix, verify_coefficient_isolation, nmat_threshold
from .polydot import RULES, PolyDot, tradeoff_csv, tradeoff_table, verify_exponent_map
from .straggler_sim import StragglerModel, simulate_round, sweep

EXIT_OK, EXIT_USAGE, EXIT_THRESHOLD, EXIT_INVARIANT = 0, 2, 3, 4
FAMILIES = ("matdot", "sysmatdot", "polydot", "nmat")


class UsageError(Exception):
    pass


def _add_code_args(p: argparse.ArgumentParser, multi_p: bool = False) -> None:
    p.add_argument("family_pos", nargs="?", choices=FAMILIES, metavar="FAMILY",
                   help="code family (same as --family)")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--m", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--n", type=int, default=2, help="chain length (nmat only)")
    p.add_argument("--variant", choices=VARIANTS, default="basic")
    p.add_argument("--rule", choices=RULES, default="paper")
    p.add_argument("--N", type=int, help="matrix size")
    if multi_p:
        p.add_argument("--P", type=int, nargs="+", help="worker counts to sweep")
    else:
        p.add_argument("--P", type=int, help="number of workers (default: threshold)")
    p.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    p.add_argument("--seed", type=int, default=0)


def _family(args) -> str:
    fam = args.family or args.family_pos
    if fam is None:
        raise UsageError("a code family is required")
    if args.family and args.family_pos and args.family != args.family_pos:
        raise UsageError(f"conflicting families {args.family_pos!r} and {args.family!r}")
    return fam


def build_code(args, P: int | None = None) -> Code:
    """Instantiate the code described by ``args`` with ``P`` workers (default: threshold)."""
    fam = _family(args)
    field = FieldConfig(args.prime)
    m, s, t = args.m, args.s, args.t

    def make(workers, field=field):
        if fam in ("matdot", "sysmatdot"):
            if m is None:
                raise UsageError(f"{fam} needs --m")
            return MatDot(m, workers, systematic=fam == "sysmatdot", field=field, N=args.N)
        if fam == "polydot":
            ss, tt = s, t
            if ss is None and tt is None:
                raise UsageError("polydot needs --s and --t")
            if ss is None or tt is None:
                if m is None:
                    raise UsageError("polydot needs --s and --t (or --m with one of them)")
                ss = ss if ss is not None else m // tt
                tt = tt if tt is not None else m // ss
            if m is not None and ss * tt != m:
                raise UsageError(f"s*t must equal m: {ss}*{tt} != {m}")
            return PolyDot(ss, tt, workers, args.rule, field=field, N=args.N)
        return NMatrix(args.n, workers, variant=args.variant, m=m, s=s, t=t,
                       field=field, N=args.N)

    # thresholds do not depend on the field, so probe in the default one
    try:
        probe = make(_BIG, FieldConfig())
    except CodedMMError as exc:
        raise UsageError(str(exc)) from exc
    workers = probe.threshold if P is None else P
    try:
        field.check_capacity(workers)
        return make(workers)
    except CodedMMError as exc:
        raise UsageError(str(exc)) from exc


_BIG = 1 << 16


def _default_n(code: Code) -> int:
    m = getattr(code, "m", 1)
    return max(m, 2)


def _cost_header() -> str:
    return ("family,k,P,N,per_worker_in_symbols,per_worker_out_symbols,"
            "fusion_in_symbols,master_out_symbols,worker_mult_count")


def _cost_row(code: Code, n: int) -> str:
    c = code.costs(n)
    return (f"{code.family},{code.threshold},{code.P},{n},{c.per_worker_in_symbols},"
            f"{c.per_worker_out_symbols},{c.fusion_in_symbols},{c.master_out_symbols},"
            f"{c.worker_mult_count}")


def cmd_threshold(args, out) -> int:
    code = build_code(args, args.P)
    n = args.N or _default_n(code)
    out.write(_cost_header() + "\n")
    out.write(_cost_row(code, n) + "\n")
    return EXIT_OK


def _load_inputs(args, code: Code, rng) -> tuple[FieldMatrix, ...]:
    if args.inputs:
        mats = tuple(FieldMatrix.load(p) for p in args.inputs)
        if len(mats) != code.arity:
            raise UsageError(f"{code.family} needs {code.arity} input files, got {len(mats)}")
        if any(mat.p != code.p for mat in mats):
            raise UsageError(f"input matrices must be over GF({code.p})")
        return mats
    n = args.random or args.N or _default_n(code)
    return code.random_inputs(n, rng)


def cmd_run(args, out) -> int:
    code = build_code(args, args.P)
    if args.inputs and args.N is None:
        args.N = FieldMatrix.load(args.inputs[0]).rows
    rng = np.random.default_rng(args.seed)
    inputs = _load_inputs(args, code, rng)
    model = StragglerModel(args.shift, args.rate, args.fail_prob, args.seed)
    outcome = simulate_round(code, inputs, model, forced_failures=args.kill or (), rng=rng)
    out.write(f"family={code.family}\n")
    out.write(f"k={outcome.threshold}\n")
    out.write(f"P={code.P}\n")
    out.write(f"survivors={outcome.survivors}\n")
    out.write("completion_order=" + " ".join(str(w) for w, _ in outcome.completion_order) + "\n")
    out.write("used_workers=" + " ".join(str(w) for w in outcome.used_workers) + "\n")
    out.write(f"status={outcome.decode_status}\n")
    if args.oracle_out:
        code.oracle(inputs).save(args.oracle_out)
    if not outcome.success:
        return EXIT_THRESHOLD
    if args.out:
        outcome.decoded.save(args.out)
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    ps = args.P or [None]
    codes = [build_code(args, P) for P in ps]
    n = args.N or _default_n(codes[0])
    model = StragglerModel(args.shift, args.rate, args.fail_prob, args.seed)
    points = sweep(codes, model, args.trials, n)
    lines = ["family,P,k,trials,successes,success_rate"]
    lines += [f"{pt.label},{pt.P},{pt.threshold},{pt.trials},{pt.successes},"
              f"{pt.success_rate:.6f}" for pt in points]
    text = "\n".join(lines) + "\n"
    _emit(text, args.out, out)
    return EXIT_OK


def cmd_tradeoff(args, out) -> int:
    if args.m is None or args.m < 1:
        raise UsageError("tradeoff needs --m >= 1")
    n = args.N or args.m
    text = tradeoff_csv(tradeoff_table(args.m, n, args.rule))
    _emit(text, args.out, out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    code = build_code(args, args.P)
    fam = code.family
    if isinstance(code, PolyDot):
        rep = verify_exponent_map(code.s, code.t, code.rule)
        ok, violations = rep.ok, rep.collisions
    elif isinstance(code, NMatrix):
        nmat_threshold(code)
        rep = verify_coefficient_isolation(code)
        ok, violations = rep.ok, rep.violations
    else:
        m = code.m
        rep = verify_isolation(ChainLayout(((1, m), (m, 1)), (1, 1, 1)))
        ok, violations = rep.ok, rep.violations
    out.write(f"family={fam}\nk={code.threshold}\nviolations={len(violations)}\n")
    for v in violations[:20]:
        out.write(f"  {v}\n")
    out.write(f"status={'ok' if ok else 'violation'}\n")
    return EXIT_OK if ok else EXIT_INVARIANT


def _emit(text: str, path, out) -> None:
    if path:
        Path(path).write_text(text)
    else:
        out.write(text)


def _model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shift", type=float, default=1.0)
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--fail-prob", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="codedmm", description="Coded distributed matrix multiplication.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("threshold", help="recovery threshold and symbol counts")
    _add_code_args(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("run", help="one encode/compute/decode round")
    _add_code_args(p)
    _model_args(p)
    p.add_argument("--inputs", nargs="+", help="input matrix files (text format)")
    p.add_argument("--random", type=int, help="use random N x N inputs")
    p.add_argument("--kill", type=int, nargs="+", help="worker ids that never finish")
    p.add_argument("--out", help="write the decoded matrix here")
    p.add_argument("--oracle-out", help="write the uncoded product here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("simulate", help="seeded straggler sweep")
    _add_code_args(p, multi_p=True)
    _model_args(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tradeoff", help="PolyDot threshold vs. communication table")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--N", type=int)
    p.add_argument("--rule", choices=RULES, default="paper")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_tradeoff)

    p = sub.add_parser("verify", help="exhaustive coefficient-isolation check")
    _add_code_args(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, InvalidParameter) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except CorrectnessViolation as exc:
        sys.stderr.write(f"invariant violation: {exc}\n")
        return EXIT_INVARIANT
    except CodedMMError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVARIANT


if __name__ == "__main__":
    raise SystemExit(main())
