"""Command-line entry point.

Commands: validate (invariant report), check (free-lunch verdict with
certificate), delay (apply a document's delay family and write the
transformed document), experiment (seeded theorem harnesses).

Exit codes: 0 success or no free lunch, 1 input error, 2 free lunch
found, 3 experiment failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .arbitrage import FreeLunch, check_naflp, render_verdict, verify_certificate
from .delays import DelayPreconditionError, delayed_market, information_delayed_market
from .documents import DocumentError, parse_market_document, serialize_market_document
from .scenarios import (
    ScenarioConfig,
    run_inheritance_experiment,
    run_insider_demo,
    run_representation_experiment,
    run_superimposition_experiment,
)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_FREE_LUNCH = 2
EXIT_EXPERIMENT_FAILED = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delayedmarkets",
        description="finite markets with delays: validation, free-lunch verdicts, experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check every invariant of a market document")
    p.add_argument("path")

    p = sub.add_parser("check", help="decide free lunch vs martingale measure")
    p.add_argument("path")
    p.add_argument("--horizon", type=int, default=None, help="check up to this grid time (default: n)")
    p.add_argument("--apply-delay", action="store_true",
                   help="apply the document's delay families before checking")

    p = sub.add_parser("delay", help="apply a delay family and write the delayed document")
    p.add_argument("path")
    p.add_argument("--mode", choices=("info", "exec"), required=True)
    p.add_argument("--out", default=None, help="output path (default: stdout)")

    p = sub.add_parser("experiment", help="run a seeded theorem harness")
    p.add_argument("kind", choices=("information", "execution", "broker",
                                    "superimpose", "representation", "insider-demo"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out", default=None, help="report path (default: stdout)")

    return parser


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError([f"cannot read {path}: {exc}"]) from None
    return parse_market_document(text)


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_validate(args) -> int:
    try:
        _load(args.path)
    except DocumentError as exc:
        for problem in exc.problems:
            print(f"invalid: {problem}")
        return EXIT_INPUT_ERROR
    print("ok")
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        doc = _load(args.path)
        market = doc.market
        if args.apply_delay:
            if doc.info_delays is None and doc.exec_delays is None:
                print("error: --apply-delay but the document carries no delays", file=sys.stderr)
                return EXIT_INPUT_ERROR
            if doc.info_delays is not None:
                market = information_delayed_market(market, doc.info_delays)
            if doc.exec_delays is not None:
                market = delayed_market(market, doc.exec_delays)
        horizon = args.horizon
        if horizon is not None and not market.space.horizon <= horizon <= market.space.extended_horizon:
            print(f"error: horizon must lie in {market.space.horizon}..{market.space.extended_horizon}",
                  file=sys.stderr)
            return EXIT_INPUT_ERROR
        verdict = check_naflp(market, horizon)
    except (DocumentError, DelayPreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if not verify_certificate(market, verdict, horizon):
        print("error: certificate failed independent re-verification", file=sys.stderr)
        return EXIT_INPUT_ERROR
    sys.stdout.write(render_verdict(verdict, market.space.states))
    return EXIT_FREE_LUNCH if isinstance(verdict, FreeLunch) else EXIT_OK


def cmd_delay(args) -> int:
    try:
        doc = _load(args.path)
        if args.mode == "info":
            if doc.info_delays is None:
                print("error: document has no information-delay block", file=sys.stderr)
                return EXIT_INPUT_ERROR
            market = information_delayed_market(doc.market, doc.info_delays)
            out = serialize_market_document(market, exec_delays=doc.exec_delays)
        else:
            if doc.exec_delays is None:
                print("error: document has no execution-delay block", file=sys.stderr)
                return EXIT_INPUT_ERROR
            market = delayed_market(doc.market, doc.exec_delays)
            out = serialize_market_document(market, info_delays=doc.info_delays)
        parse_market_document(out)  # the transformed document must re-validate
    except (DocumentError, DelayPreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    _emit(out, args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = ScenarioConfig(seed=args.seed)
    if args.kind in ("information", "execution", "broker"):
        report = run_inheritance_experiment(cfg, args.kind, trials=args.trials)
    elif args.kind == "superimpose":
        report = run_superimposition_experiment(cfg, trials=args.trials)
    elif args.kind == "representation":
        report = run_representation_experiment(cfg, trials=args.trials)
    else:
        report = run_insider_demo(cfg)
    _emit(report.to_json() + "\n", args.out)
    return EXIT_OK if report.passed else EXIT_EXPERIMENT_FAILED


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "validate": cmd_validate,
        "check": cmd_check,
        "delay": cmd_delay,
        "experiment": cmd_experiment,
    }
    return handlers[args.command](args)


def entry():  # console-script hook
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
