"""Command-line entry point: one subcommand per reproduced experiment.

Reports go to stdout as JSON by default; ``--format csv`` needs ``--output``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import asdict

import numpy as np

from . import analysis, chsh, qlinapprox
from .simon import encrypt, format_block, get_variant, key_schedule, parse_block, parse_key

REPORT_COLUMNS = ("experiment", "variant", "bit_j", "samples", "seed", "p0", "bias", "std_error")

_PI_TOKEN = re.compile(r"^(-)?(\d+(?:\.\d+)?)?\*?pi(?:/(\d+(?:\.\d+)?))?$")


def parse_angle(text: str) -> float:
    """Radians as a float literal, or a token such as ``pi/4``, ``-pi/8``, ``3pi/8``."""
    s = text.strip().lower().replace(" ", "")
    m = _PI_TOKEN.match(s)
    if m:
        sign, mult, div = m.groups()
        value = math.pi * float(mult or 1) / float(div or 1)
        return -value if sign else value
    try:
        value = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed angle {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"angle must be finite, got {text!r}")
    return value


def _variant(text: str):
    try:
        return get_variant(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _bias_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("need at least one bias")
    return values


def _probability(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a probability, got {text!r}") from None


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json", help="report format (default: json)")
    p.add_argument("--output", metavar="PATH", help="write the report here instead of stdout")


def _add_theta(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--theta", type=parse_angle, default=math.pi / 4, help="rotation angle in radians or pi/N (default: pi/4)"
    )


def _add_sampling(p: argparse.ArgumentParser, samples: int) -> None:
    p.add_argument("--variant", type=_variant, default=get_variant("32/64"), help="SIMON variant, e.g. 32/64")
    p.add_argument("--bit", type=int, default=0, help="bit position j, 0 = most significant (default: 0)")
    p.add_argument("--samples", type=_positive_int, default=samples, help=f"sample count (default: {samples})")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default: 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlin", description="CHSH-enhanced linear cryptanalysis of SIMON.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chsh-classical", help="best classical CHSH strategy and the Boolean circuit")
    _add_output(p)
    p = sub.add_parser("chsh-quantum", help="entangled CHSH strategy circuit")
    _add_theta(p)
    _add_output(p)

    p = sub.add_parser("simon-encrypt", help="encrypt one block")
    p.add_argument("--variant", type=_variant, default=get_variant("32/64"), help="SIMON variant, e.g. 32/64")
    p.add_argument("--key", required=True, help="0x-prefixed master key")
    p.add_argument("--plaintext", required=True, help="0x-prefixed block, left word first")
    p.add_argument("--rounds", type=int, help="number of rounds (default: all)")
    _add_output(p)

    p = sub.add_parser("quantum-round", help="unconstrained quantum round update")
    _add_output(p)
    p = sub.add_parser("linear-approx", help="constrained linear approximation circuit")
    _add_output(p)
    p = sub.add_parser("modified-approx", help="CHSH-modified linear approximation circuit")
    _add_theta(p)
    _add_output(p)

    p = sub.add_parser("theta-sweep", help="case and aggregate probabilities over a theta grid")
    p.add_argument("--from", dest="lo", metavar="THETA", type=parse_angle, default=0.0, help="grid start (default: 0)")
    p.add_argument("--to", dest="hi", metavar="THETA", type=parse_angle, default=math.pi / 2, help="grid end (default: pi/2)")
    p.add_argument("--steps", type=int, default=101, help="number of grid points, >= 2 (default: 101)")
    _add_output(p)

    p = sub.add_parser("bias-empirical", help="Monte-Carlo bias of the one-round relation")
    _add_sampling(p, 10**6)
    _add_output(p)
    p = sub.add_parser("key-recover", help="recover one round-key bit from two-round pairs")
    _add_sampling(p, 10**5)
    _add_output(p)

    p = sub.add_parser("piling-up", help="combined bias of independent approximations")
    p.add_argument("--biases", type=_bias_list, required=True, help="comma-separated biases, e.g. 0.25,0.25")
    _add_output(p)
    p = sub.add_parser("sample-complexity", help="samples needed to separate two distributions")
    p.add_argument("--p", type=_probability, default=0.5, help="first distribution Pr[0] (default: 0.5)")
    p.add_argument("--q", type=_probability, default=0.75, help="second distribution Pr[0] (default: 0.75)")
    _add_output(p)
    return parser


def _marginal_report(name: str, qc, qubit: int, **extra) -> dict:
    p0, p1 = qlinapprox.output_probabilities(qc, qubit)
    return {"experiment": name, **extra, "p0": p0, "p1": p1, "bias": p0 - 0.5}


def _run(args: argparse.Namespace) -> dict | list[dict]:
    cmd = args.command
    if cmd == "chsh-classical":
        strategy, best = chsh.best_classical_strategy()
        report = _marginal_report("chsh-classical", chsh.build_classical_chsh_circuit(), chsh.F)
        report.update(best_win_probability=best, alice=list(strategy.alice), bob=list(strategy.bob))
        return report
    if cmd == "chsh-quantum":
        return _marginal_report("chsh-quantum", chsh.build_quantum_chsh_circuit(args.theta), chsh.F, theta=args.theta)
    if cmd == "quantum-round":
        return _marginal_report("quantum-round", qlinapprox.build_quantum_round_circuit(), 3)
    if cmd == "linear-approx":
        return _marginal_report("linear-approx", qlinapprox.build_linear_approx_circuit(), qlinapprox.R)
    if cmd == "modified-approx":
        qc = qlinapprox.build_modified_circuit(args.theta)
        return _marginal_report("modified-approx", qc, qlinapprox.R, theta=args.theta)
    if cmd == "simon-encrypt":
        v = args.variant
        keys = key_schedule(parse_key(args.key, v), v)
        ct = encrypt(parse_block(args.plaintext, v), keys, args.rounds)
        return {"experiment": "simon-encrypt", "variant": v.name, "plaintext": args.plaintext, "ciphertext": format_block(ct, v)}
    if cmd == "theta-sweep":
        if args.steps < 2:
            raise ValueError(f"--steps must be >= 2, got {args.steps}")
        if not args.lo < args.hi:
            raise ValueError(f"--from must be less than --to, got {args.lo} >= {args.hi}")
        return qlinapprox.theta_sweep(args.lo, args.hi, args.steps)
    if cmd in ("bias-empirical", "key-recover"):
        v = args.variant
        if not 0 <= args.bit < v.word_size:
            raise ValueError(f"--bit must be in [0, {v.word_size}) for {v.name}, got {args.bit}")
        rng = np.random.default_rng(args.seed)
        master = [int(w) for w in rng.integers(0, v.mask, v.key_words, dtype=np.uint64, endpoint=True)]
        keys = key_schedule(master, v)
        base = {"experiment": cmd, "variant": v.name, "bit_j": args.bit, "samples": args.samples, "seed": args.seed}
        if cmd == "bias-empirical":
            est = analysis.estimate_bias(v, keys, args.bit, args.samples, args.seed)
            return {**base, "p0": est.p0, "bias": est.bias, "std_error": est.std_error}
        pairs = analysis.generate_pairs(v, keys, args.samples, args.seed)
        verdict = analysis.recover_key_bit_arrays(*pairs, args.bit, v.word_size)
        f0, f1 = verdict.group_frequencies
        # p0 of the group the verdict picked
        chosen = f0 if verdict.inferred_key_bit in (0, None) else f1
        n_chosen = verdict.group_sizes[0 if verdict.inferred_key_bit in (0, None) else 1]
        return {
            **base,
            "p0": chosen,
            "bias": chosen - 0.5,
            "std_error": math.sqrt(chosen * (1 - chosen) / n_chosen) if n_chosen else float("nan"),
            "inferred_key_bit": verdict.inferred_key_bit,
            "confidence": verdict.confidence,
            "group_frequencies": [f0, f1],
            "group_sizes": list(verdict.group_sizes),
        }
    if cmd == "piling-up":
        return {
            "experiment": "piling-up",
            "biases": args.biases,
            "bias": analysis.piling_up(args.biases),
            "oracle_bias": analysis.piling_up_oracle([0.5 + e for e in args.biases]),
        }
    if cmd == "sample-complexity":
        sc = analysis.sample_complexity(args.p, args.q)
        return {"experiment": "sample-complexity", **asdict(sc), "indistinguishable": sc.indistinguishable}
    raise AssertionError(cmd)


def _to_csv(report: dict | list[dict], command: str) -> str:
    out = io.StringIO()
    if command == "theta-sweep":
        qlinapprox.sweep_to_csv(report, out)
        return out.getvalue()
    rows = report if isinstance(report, list) else [report]
    columns = REPORT_COLUMNS if all(c in rows[0] for c in REPORT_COLUMNS) else tuple(rows[0])
    writer = csv.DictWriter(out, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: json.dumps(v) if isinstance(v, list) else v for k, v in row.items()})
    return out.getvalue()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format == "csv" and not args.output:
        parser.error("--format csv requires --output PATH")
    try:
        report = _run(args)
    except ValueError as exc:
        print(f"qlin {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if args.format == "csv":
        text = _to_csv(report, args.command)
    else:
        text = json.dumps(report, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
