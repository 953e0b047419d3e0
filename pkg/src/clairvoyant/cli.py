"""Command-line front end.

Exit codes: 0 ok (or BLOCKED), 1 runtime error, 2 usage error,
3 lemma violation (TOP_ESCAPE), 4 inconclusive after widening.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__
from .certificates import VerdictKind, build_certificate, certify
from .errors import ClairvoyantError, WideningExhausted
from .experiments import (
    TAIL_PROXY_CAVEAT,
    TrialConfig,
    estimate_event_probs,
    estimate_reach,
    estimate_reach_and_tail,
    event_chain_probe,
    planted_instance,
    tail_sweep,
)
from .model import write_sequence
from .patterns import AnalyticBounds, choose_k, holds_E, holds_F, prob_E_exact, prob_F_lower

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, EXIT_VIOLATION, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4

CSV_HEADER = ["m", "n", "k", "s", "trials", "successes", "p_hat", "ci_lo", "ci_hi", "seed"]

# parameters that never change results and stay out of the manifest
_EXECUTION_ONLY = {"threads", "func", "command"}


def manifest(args) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in _EXECUTION_ONLY}
    return {
        "subcommand": args.command,
        "params": params,
        "master_seed": args.seed,
        "version": __version__,
        "outputs": [args.out] if isinstance(args.out, str) else args.out,
    }


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _resolve_k(args, parser) -> int:
    if args.k is not None:
        if args.k < 0:
            parser.error("--k must be >= 0")
        return args.k
    if args.s is None:
        parser.error("one of --k or --s is required")
    if args.s <= 0:
        parser.error("--s must be > 0")
    if args.n < 2:
        parser.error("--s needs --n >= 2 (k grows with log n)")
    return choose_k(args.s, args.n, args.m)


def cmd_simulate(args, parser) -> int:
    if args.n < 0:
        parser.error("--n must be >= 0")
    big_n = args.N if args.N is not None else args.N_factor * args.n
    if big_n < args.n:
        parser.error("--N must be >= --n")
    cfg = TrialConfig(m=args.m, n=args.n, trials=args.trials, master_seed=args.seed,
                      N=big_n, threads=args.threads)
    doc = {"manifest": manifest(args)}
    if big_n > args.n:
        reach, tail = estimate_reach_and_tail(cfg)
        doc["reach"] = reach.to_dict()
        doc["tail"] = tail.to_dict()
        doc["caveats"] = [TAIL_PROXY_CAVEAT]
    else:
        doc["reach"] = estimate_reach(cfg).to_dict()
        doc["tail"] = None
        doc["caveats"] = ["N == n: tail event is empty and was not estimated"]
    _emit(_dump_json(doc), args.out)
    return EXIT_OK


def cmd_events(args, parser) -> int:
    if args.n < 1:
        parser.error("--n must be >= 1")
    k = _resolve_k(args, parser)
    cfg = TrialConfig(m=args.m, n=args.n, k=k, trials=args.trials, master_seed=args.seed,
                      threads=args.threads, planted_E=args.planted_E)
    res_e, res_f = estimate_event_probs(cfg)
    bounds = AnalyticBounds.for_m(args.m)
    analytic = {
        "p1": bounds.p1,
        "alpha": bounds.alpha,
        "prob_E_exact": prob_E_exact(args.m, k),
        "prob_F_lower": prob_F_lower(args.m, args.n, k),
    }
    if args.s is not None:
        analytic["prob_E_floor"] = bounds.prob_E_floor(args.n, args.s)
        analytic["prob_F_target"] = 1 - args.n ** (-args.s)
    doc = {"manifest": manifest(args), "k": k, "analytic": analytic,
           "E": res_e.to_dict(), "F": res_f.to_dict()}
    if args.chain:
        doc["chain"] = event_chain_probe(cfg).to_dict()
    _emit(_dump_json(doc), args.out)
    return EXIT_OK


def cmd_verify_lemma(args, parser) -> int:
    if args.n < 1:
        parser.error("--n must be >= 1")
    k = _resolve_k(args, parser)
    if k < 1:
        parser.error("verify-lemma needs k >= 1")
    X, Y = planted_instance(args.m, args.n, k, args.seed)
    code = EXIT_OK
    try:
        cert = certify(X, Y, args.n, k)
        verdict = cert.verdict
    except WideningExhausted as exc:
        cert = build_certificate(X, Y, args.n, k)
        cert.verdict = exc.verdict
        verdict = exc.verdict
        code = EXIT_INCONCLUSIVE
    if verdict.kind is VerdictKind.TOP_ESCAPE:
        code = EXIT_VIOLATION
    doc = {"manifest": manifest(args), "certificate": cert.to_dict(),
           "window": verdict.to_dict()}
    _emit(_dump_json(doc), args.out)
    return code


def cmd_plant(args, parser) -> int:
    if args.n < 1:
        parser.error("--n must be >= 1")
    k = _resolve_k(args, parser)
    if k < 1:
        parser.error("plant needs k >= 1")
    paths = args.out.split(",") if args.out else []
    if len(paths) != 2:
        parser.error("--out must name two files: X,Y")
    X, Y = planted_instance(args.m, args.n, k, args.seed)
    write_sequence(paths[0], X)
    write_sequence(paths[1], Y)
    doc = {"manifest": manifest(args), "k": k, "x_length": len(X), "y_length": len(Y),
           "holds_E": holds_E(Y, args.n, k), "holds_F": holds_F(X, args.n, k)}
    _emit(_dump_json(doc), None)
    return EXIT_OK


def cmd_sweep(args, parser) -> int:
    try:
        ns = [int(v) for v in args.n.split(",") if v.strip()]
    except ValueError:
        parser.error("--n must be a comma-separated list of integers")
    if not ns or min(ns) < 1:
        parser.error("--n values must be >= 1")
    if args.N_factor < 2:
        parser.error("--N-factor must be >= 2")
    rows, fit = tail_sweep(args.m, ns, args.N_factor, args.trials, args.seed, args.threads)
    fit_doc = None if fit is None else fit.to_dict()
    man = manifest(args)
    fit_path = args.out + ".fit.json" if args.out else None
    if args.format == "csv" and fit_path:
        man["outputs"].append(fit_path)
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.csv_fields())
        _emit(buf.getvalue(), args.out)
        side = {"manifest": man, "fit": fit_doc, "caveats": [TAIL_PROXY_CAVEAT]}
        _emit(_dump_json(side), fit_path)
    else:
        doc = {
            "manifest": man,
            "rows": [{"n": r.n, "N": args.N_factor * r.n, "reach": r.reach.to_dict(),
                      "tail": r.tail.to_dict()} for r in rows],
            "fit": fit_doc,
            "caveats": [TAIL_PROXY_CAVEAT],
        }
        _emit(_dump_json(doc), args.out)
    return EXIT_OK


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clairvoyant",
        description="Simulate and verify the two-color-sequence directed percolation model.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_type=int, trials=True):
        p.add_argument("--m", type=_positive_int, required=True, help="alphabet size")
        p.add_argument("--n", type=n_type, required=True)
        p.add_argument("--seed", type=int, required=True, help="master seed (required)")
        p.add_argument("--out", default=None)
        p.add_argument("--threads", type=_positive_int, default=1)
        if trials:
            p.add_argument("--trials", type=_positive_int, required=True)

    def k_or_s(p):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--k", type=int, default=None, help="stack height")
        group.add_argument("--s", type=float, default=None, help="derive k from the target exponent s")

    p = sub.add_parser("simulate", help="estimate reach and tail probabilities")
    common(p)
    p.add_argument("--N", type=int, default=None, help="distance standing in for infinity")
    p.add_argument("--N-factor", dest="N_factor", type=_positive_int, default=4)
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("events", help="estimate the frequencies of events E and F")
    common(p)
    k_or_s(p)
    p.add_argument("--chain", action="store_true", help="also run the E/F/G joint probe")
    p.add_argument("--planted-E", dest="planted_E", action="store_true",
                   help="plant E in every --chain trial; E and F estimates always sample")
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_events)

    p = sub.add_parser("verify-lemma", help="plant E and F and check that paths are blocked")
    common(p, trials=False)
    k_or_s(p)
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_verify_lemma)

    p = sub.add_parser("plant", help="write planted X,Y sequence files")
    common(p, trials=False)
    k_or_s(p)
    p.set_defaults(func=cmd_plant)

    p = sub.add_parser("sweep", help="tail estimates over several n plus a power-law fit")
    common(p, n_type=str)
    p.add_argument("--N-factor", dest="N_factor", type=int, default=4)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (ClairvoyantError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
