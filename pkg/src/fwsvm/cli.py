"""Command-line interface: train, predict, eval, bench, synth.

Exit codes: 0 success (training certified its gap tolerance), 1 usage
error, 2 I/O or parse error, 3 iteration cap reached without a certificate.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .data import Dataset, SvmlightParseError, load_svmlight, save_svmlight, synth_blobs
from .losses import LossFamily, LossSpec, TOP_K_FAMILIES, WEIGHTED_FAMILIES, default_rho
from .metrics import topk_error
from .model import ModelFormatError, load_model, predict_topk, save_model
from .pg import PgConfig, pg_train
from .solver import (
    SolverConfig,
    StepRule,
    TrainResult,
    TRACE_HEADER,
    train,
    write_trace,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NO_CERTIFICATE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise UsageError(message)


def _parse_lambda(text: str, n: int) -> float:
    """A float, or '<float>/n' resolved against the training set size."""
    text = text.strip()
    if text.endswith("/n"):
        head = text[:-2]
        try:
            return float(head) / n if head else 1.0 / n
        except ValueError:
            raise UsageError(f"bad --lambda value {text!r}") from None
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"bad --lambda value {text!r}") from None


def _build_loss_spec(args, m: int) -> LossSpec:
    family = LossFamily(args.loss)
    k = None
    rho = None
    if family in TOP_K_FAMILIES:
        if args.k is None:
            raise UsageError(f"--loss {args.loss} requires --k")
        if args.rho is not None:
            raise UsageError(f"--loss {args.loss} does not take --rho")
        k = args.k
    elif family in WEIGHTED_FAMILIES:
        if args.rho is None:
            raise UsageError(f"--loss {args.loss} requires --rho")
        if args.k is not None:
            raise UsageError(f"--loss {args.loss} does not take --k")
        if args.rho == "paper-default":
            rho = default_rho(m)
        else:
            try:
                rho = np.array([float(v) for v in args.rho.split(",")])
            except ValueError:
                raise UsageError(f"bad --rho value {args.rho!r}") from None
    else:
        if args.k is not None or args.rho is not None:
            raise UsageError("--loss mh takes neither --k nor --rho")
    try:
        return LossSpec(family=family, m=m, k=k, rho=rho)
    except ValueError as e:
        raise UsageError(f"infeasible loss spec: {e}") from None


def _add_loss_flags(p: _Parser):
    p.add_argument("--loss", required=True,
                   choices=[f.value for f in LossFamily],
                   help="loss family: mh, utk, uu, wtk, wu")
    p.add_argument("--k", type=int, default=None,
                   help="k for the top-k families (utk, uu)")
    p.add_argument("--rho", default=None,
                   help="comma-separated weights for wtk/wu, or 'paper-default'")


def _add_solver_flags(p: _Parser):
    p.add_argument("--lambda", dest="lam", default="1/n",
                   help="regularization constant; a float or '<float>/n'")
    p.add_argument("--gamma-sm", type=float, default=0.0,
                   help="smoothing parameter (0 disables smoothing)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--deterministic", action="store_true",
                   help="serial reductions and zeroed elapsed times; "
                        "byte-identical reruns")


def build_parser() -> _Parser:
    parser = _Parser(prog="fwsvm", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a classifier", cls=_Parser)
    p.add_argument("--data", required=True, help="svmlight training file")
    _add_loss_flags(p)
    _add_solver_flags(p)
    p.add_argument("--eps", type=float, default=1e-5,
                   help="duality-gap tolerance for termination")
    p.add_argument("--max-iters", type=int, default=10000)
    p.add_argument("--step", choices=[r.value for r in StepRule],
                   default="linesearch")
    p.add_argument("--out", required=True, help="model output path")
    p.add_argument("--trace", default=None, help="trace CSV output path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="write top-k labels per example",
                       cls=_Parser)
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--topk", type=int, default=1)
    p.add_argument("--out", default=None, help="default: stdout")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="top-k error table", cls=_Parser)
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--topk", default=None,
                   help="comma-separated k values (default 1,3,5,10 clipped to m)")
    p.add_argument("--out", default=None, help="default: stdout")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="compare optimizers on one dataset",
                       cls=_Parser)
    p.add_argument("--data", required=True)
    _add_loss_flags(p)
    _add_solver_flags(p)
    p.add_argument("--methods", default="lsfw,stdfw,pg",
                   help="comma-separated subset of lsfw, stdfw, pg")
    p.add_argument("--iters", type=int, default=1000,
                   help="fixed iteration budget for every method")
    p.add_argument("--out-prefix", required=True,
                   help="prefix for <prefix><method>.csv and <prefix>summary.csv")
    p.add_argument("--ref-eps", type=float, default=1e-5,
                   help="gap tolerance of the reference solution")
    p.add_argument("--ref-max-iters", type=int, default=100000)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="write a synthetic svmlight dataset",
                       cls=_Parser)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d0", type=int, required=True)
    p.add_argument("--n-per-class", type=int, required=True)
    p.add_argument("--sep", type=float, default=4.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    return parser


def _solver_config(args, data: Dataset) -> SolverConfig:
    return SolverConfig(
        lam=_parse_lambda(args.lam, data.n),
        gamma_sm=args.gamma_sm,
        epsilon=args.eps,
        max_iters=args.max_iters,
        step_rule=StepRule(args.step),
        seed=args.seed,
        n_threads=args.threads,
        deterministic=args.deterministic,
    )


def cmd_train(args) -> int:
    data = load_svmlight(args.data)
    spec = _build_loss_spec(args, data.m)
    config = _solver_config(args, data)
    result = train(data, spec, config)
    save_model(result.model, args.out)
    if args.trace:
        write_trace(args.trace, result.trace)
    last = result.trace[-1]
    print(f"iterations={result.iterations} primal={last.primal!r} "
          f"dual={last.dual!r} gap={last.gap!r} certified={result.certified}")
    return EXIT_OK if result.certified else EXIT_NO_CERTIFICATE


def _open_out(path):
    return open(path, "w", encoding="utf-8") if path else sys.stdout


def cmd_predict(args) -> int:
    model = load_model(args.model)
    data = load_svmlight(args.data, min_dim=model.d0)
    if data.d0 > model.d0:
        raise UsageError(
            f"data has {data.d0} features but the model expects {model.d0}")
    if not 1 <= args.topk <= model.m:
        raise UsageError(f"--topk must be in [1, {model.m}]")
    out = _open_out(args.out)
    try:
        for i in range(data.n):
            labels = predict_topk(model, data.example(i), args.topk)
            out.write("\t".join(str(v) for v in labels) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_eval(args) -> int:
    model = load_model(args.model)
    data = load_svmlight(args.data, min_dim=model.d0)
    if data.d0 > model.d0:
        raise UsageError(
            f"data has {data.d0} features but the model expects {model.d0}")
    if args.topk is None:
        ks = [k for k in (1, 3, 5, 10) if k <= model.m]
    else:
        try:
            ks = [int(v) for v in args.topk.split(",")]
        except ValueError:
            raise UsageError(f"bad --topk value {args.topk!r}") from None
        for k in ks:
            if not 1 <= k <= model.m:
                raise UsageError(f"--topk entry {k} out of range [1, {model.m}]")
    try:
        errors = topk_error(model, data, ks)
    except ValueError as e:
        raise UsageError(str(e)) from None
    out = _open_out(args.out)
    try:
        out.write("k,error\n")
        for k in ks:
            out.write(f"{k},{errors[k]!r}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _write_bench_trace(path: str, result: TrainResult, ref_primal: float):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(TRACE_HEADER + ",obj_err\n")
        for r in result.trace:
            obj_err = r.primal - ref_primal
            fh.write(f"{r.iteration},{r.elapsed_sec!r},{r.primal!r},"
                     f"{r.dual!r},{r.gap!r},{obj_err!r}\n")


def cmd_bench(args) -> int:
    methods = [v.strip() for v in args.methods.split(",") if v.strip()]
    known = {"lsfw", "stdfw", "pg"}
    for name in methods:
        if name not in known:
            raise UsageError(f"unknown method {name!r}; pick from {sorted(known)}")
    if not methods:
        raise UsageError("--methods is empty")

    data = load_svmlight(args.data)
    spec = _build_loss_spec(args, data.m)
    lam = _parse_lambda(args.lam, data.n)

    def fw_config(rule: StepRule, gamma_sm: float) -> SolverConfig:
        return SolverConfig(lam=lam, gamma_sm=gamma_sm, epsilon=None,
                            max_iters=args.iters, step_rule=rule,
                            seed=args.seed, n_threads=args.threads,
                            deterministic=args.deterministic)

    ref_cfg = SolverConfig(lam=lam, gamma_sm=args.gamma_sm, epsilon=args.ref_eps,
                           max_iters=args.ref_max_iters, seed=args.seed,
                           n_threads=args.threads,
                           deterministic=args.deterministic)
    ref = train(data, spec, ref_cfg)
    if not ref.certified:
        print(f"warning: reference run hit {args.ref_max_iters} iterations "
              f"with gap {ref.trace[-1].gap!r}", file=sys.stderr)
    ref_primal = ref.trace[-1].primal
    if args.gamma_sm > 0 and "pg" in methods:
        plain_cfg = SolverConfig(lam=lam, gamma_sm=0.0, epsilon=args.ref_eps,
                                 max_iters=args.ref_max_iters, seed=args.seed,
                                 n_threads=args.threads,
                                 deterministic=args.deterministic)
        ref_primal_plain = train(data, spec, plain_cfg).trace[-1].primal
    else:
        ref_primal_plain = ref_primal

    summary_rows = []
    for name in methods:
        if name == "lsfw":
            result = train(data, spec, fw_config(StepRule.LINE_SEARCH, args.gamma_sm))
            ref_p = ref_primal
        elif name == "stdfw":
            result = train(data, spec, fw_config(StepRule.SCHEDULE, args.gamma_sm))
            ref_p = ref_primal
        else:
            result = pg_train(data, spec, PgConfig(
                lam=lam, max_iters=args.iters, n_threads=args.threads,
                deterministic=args.deterministic))
            ref_p = ref_primal_plain
        _write_bench_trace(f"{args.out_prefix}{name}.csv", result, ref_p)
        last = result.trace[-1]
        summary_rows.append((name, result.iterations, last))

    with open(f"{args.out_prefix}summary.csv", "w", encoding="utf-8") as fh:
        fh.write("method,iters,elapsed_sec,primal,dual,gap\n")
        for name, iters, last in summary_rows:
            fh.write(f"{name},{iters},{last.elapsed_sec!r},{last.primal!r},"
                     f"{last.dual!r},{last.gap!r}\n")
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        data = synth_blobs(m=args.m, d0=args.d0, n_per_class=args.n_per_class,
                           separation=args.sep, sigma=args.sigma, seed=args.seed)
    except ValueError as e:
        raise UsageError(str(e)) from None
    save_svmlight(data, args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, SvmlightParseError, ModelFormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
