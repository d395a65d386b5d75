"""Command-line entry point.

Subcommands: keygen, build, inspect, verify, tamper, simulate, vca-report.
Reports default to JSON; --format text renders key: value lines. Exit codes:
0 success/accept, 1 reject or failure, 2 defer, 64 usage error.

All randomized subcommands accept --seed for reproducible output. The
FACTBUNDLE_KEY_DIR environment variable names a default directory for key
and registry files: relative paths that do not exist locally are also tried
there.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bundle import (
    Bundle,
    BundleMeta,
    KeyPair,
    build_bundle,
    parse_bundle,
    registry_from_json,
    registry_to_json,
    serialize_bundle,
)
from .encode import EncodingParams
from .errors import FactBundleError
from .provenance import loads as load_dag_text
from .simulate import STRATEGIES, WorldParams, queries_for_advantage
from .tamper import MODE_LEAF_FRACTION, MODE_METADATA, MODE_SIGNATURE_BYTE, tamper_bundle
from .vca import SCENARIO_ACME_2026, case_study
from .verify import (
    ACCEPT,
    DEFER,
    UNKNOWN_PUBLISHER,
    VerifyPolicy,
    choose_k,
    verify_bundle,
)

EX_OK = 0
EX_FAIL = 1
EX_DEFER = 2
EX_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """argparse with the usage-error exit code pinned to 64."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _hex_bytes(expected_len: int):
    def convert(text: str) -> bytes:
        try:
            raw = bytes.fromhex(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"not valid hex: {text!r}") from exc
        if len(raw) != expected_len:
            raise argparse.ArgumentTypeError(
                f"expected {expected_len} bytes ({expected_len * 2} hex chars), "
                f"got {len(raw)}"
            )
        return raw

    return convert


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _percent_or_fraction(text: str) -> float:
    try:
        if text.endswith("%"):
            value = float(text[:-1]) / 100.0
        else:
            value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a fraction or percentage: {text!r}") from exc
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("fraction must be between 0 and 100%")
    return value


def _resolve_key_path(path: str) -> Path:
    """Try the path as given, then inside $FACTBUNDLE_KEY_DIR."""
    candidate = Path(path)
    if candidate.exists() or candidate.is_absolute():
        return candidate
    key_dir = os.environ.get("FACTBUNDLE_KEY_DIR")
    if key_dir:
        fallback = Path(key_dir) / candidate
        if fallback.exists():
            return fallback
    return candidate


def _derive_entropy(seed: int | None, entropy: bytes | None, label: str) -> bytes:
    if entropy is not None:
        return entropy
    if seed is not None:
        return hashlib.sha256(f"{label}/{seed}".encode()).digest()
    return os.urandom(32)


def _emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in _text_lines(report):
            print(line)


def _text_lines(value, prefix: str = "") -> list[str]:
    lines: list[str] = []
    if isinstance(value, dict):
        for key, item in value.items():
            if isinstance(item, (dict, list)):
                lines.append(f"{prefix}{key}:")
                lines.extend(_text_lines(item, prefix + "  "))
            else:
                lines.append(f"{prefix}{key}: {item}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, (dict, list)):
                lines.append(f"{prefix}-")
                lines.extend(_text_lines(item, prefix + "  "))
            else:
                lines.append(f"{prefix}- {item}")
    else:
        lines.append(f"{prefix}{value}")
    return lines


def _load_keypair(path: str) -> KeyPair:
    raw = json.loads(_resolve_key_path(path).read_text())
    return KeyPair(
        publisher_id=raw["publisher_id"],
        signing_key=bytes.fromhex(raw["signing_key"]),
        verification_key=bytes.fromhex(raw["verification_key"]),
    )


# --- subcommand handlers ---


def _cmd_keygen(args: argparse.Namespace) -> int:
    seed = None
    if args.seed is not None:
        seed = hashlib.sha256(f"keygen/{args.seed}".encode()).digest()
    key = KeyPair.generate(args.publisher, seed=seed)
    out = Path(args.out) if args.out else None
    if out is None:
        key_dir = os.environ.get("FACTBUNDLE_KEY_DIR", ".")
        out = Path(key_dir) / f"{args.publisher}.key.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(
        json.dumps(
            {
                "publisher_id": key.publisher_id,
                "signing_key": key.signing_key.hex(),
                "verification_key": key.verification_key.hex(),
            },
            indent=2,
        )
        + "\n"
    )
    if args.registry:
        registry_path = Path(args.registry)
        registry = {}
        if registry_path.exists():
            registry = registry_from_json(registry_path.read_text())
        registry[key.publisher_id] = key.verification_key
        registry_path.write_text(registry_to_json(registry))
    _emit(
        {
            "publisher_id": key.publisher_id,
            "verification_key": key.verification_key.hex(),
            "key_file": str(out),
        },
        args.format,
    )
    return EX_OK


def _cmd_build(args: argparse.Namespace) -> int:
    dag = load_dag_text(Path(args.dag).read_text())
    key = _load_keypair(args.key)
    timestamp = args.timestamp if args.timestamp is not None else (dag.claim.timestamp or 0)
    bundle = build_bundle(
        dag,
        EncodingParams(replication=args.replication),
        key,
        args.beacon,
        metadata=BundleMeta(publisher_id=key.publisher_id, timestamp=timestamp),
    )
    data = serialize_bundle(bundle)
    Path(args.out).write_bytes(data)
    _emit(
        {
            "out": args.out,
            "bytes": len(data),
            "root": bundle.root.hex(),
            "leaves": len(bundle.leaf_packages),
            "sources": len(bundle.sources),
            "publisher": bundle.metadata.publisher_id,
        },
        args.format,
    )
    return EX_OK


def _inspect_dict(bundle: Bundle) -> dict:
    return {
        "claim": {
            "id": bundle.claim.id,
            "text": bundle.claim.text,
            "timestamp": bundle.claim.timestamp,
            "asserted_values": [list(pair) for pair in bundle.claim.asserted_values],
        },
        "root": bundle.root.hex(),
        "query_spec": {
            "universe_size": bundle.query_spec.universe_size,
            "seed_rule": bundle.query_spec.seed_rule,
            "beacon": bundle.query_spec.beacon.hex(),
        },
        "metadata": {
            "publisher_id": bundle.metadata.publisher_id,
            "timestamp": bundle.metadata.timestamp,
            "format_version": bundle.metadata.format_version,
        },
        "signature": bundle.signature.hex(),
        "sources": [
            {
                "id": doc.id,
                "timestamp": doc.timestamp,
                "origin": doc.origin,
                "content_sha256": hashlib.sha256(doc.content).hexdigest(),
                "content_bytes": len(doc.content),
            }
            for doc in bundle.sources
        ],
        "leaves": [
            {
                "index": i,
                "kind": pkg.leaf.constraint.kind,
                "subjects": list(pkg.leaf.constraint.subject_ids),
                "replica": pkg.leaf.replica,
            }
            for i, pkg in enumerate(bundle.leaf_packages)
        ],
    }


def _cmd_inspect(args: argparse.Namespace) -> int:
    bundle = parse_bundle(Path(args.bundle).read_bytes())
    _emit(_inspect_dict(bundle), args.format)
    return EX_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    bundle = parse_bundle(Path(args.bundle).read_bytes())
    registry = registry_from_json(_resolve_key_path(args.keys).read_text())
    if args.k is not None:
        k = args.k
    elif args.beta is not None:
        k = choose_k(args.beta, args.eta)
    else:
        k = 3
    defer_on = frozenset(args.defer_on) if args.defer_on else frozenset({UNKNOWN_PUBLISHER})
    policy = VerifyPolicy(k=k, beta=args.beta, eta_min=args.eta, defer_on=defer_on)
    entropy = _derive_entropy(args.seed, args.entropy, "verify-entropy")
    verdict = verify_bundle(bundle, registry, policy, entropy)
    report = verdict.as_dict()
    report["k"] = k
    report["entropy"] = entropy.hex()
    _emit(report, args.format)
    if verdict.outcome == ACCEPT:
        return EX_OK
    if verdict.outcome == DEFER:
        return EX_DEFER
    return EX_FAIL


def _cmd_tamper(args: argparse.Namespace) -> int:
    data = Path(args.bundle).read_bytes()
    if args.leaves is not None:
        mode, amount = MODE_LEAF_FRACTION, args.leaves
    elif args.signature:
        mode, amount = MODE_SIGNATURE_BYTE, 0.0
    elif args.metadata:
        mode, amount = MODE_METADATA, 0.0
    else:
        print("tamper: pick one of --leaves, --signature, --metadata", file=sys.stderr)
        return EX_USAGE
    mutated = tamper_bundle(data, mode, amount, seed=args.seed or 0)
    Path(args.out).write_bytes(mutated)
    _emit(
        {
            "out": args.out,
            "mode": mode,
            "amount": amount,
            "changed": mutated != data,
        },
        args.format,
    )
    return EX_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    strategy = STRATEGIES[args.strategy]
    seed = args.seed if args.seed is not None else 0
    rows = []
    for n in args.n_list:
        params = WorldParams(n=n, rho=args.rho, planted_pairs=args.planted, seed=seed)
        result = queries_for_advantage(
            strategy,
            params,
            args.epsilon,
            args.trials,
            seed=seed,
            budget_cap=args.budget_cap,
            use_fast=False if args.slow else None,
        )
        rows.append(
            {
                "n": n,
                "rho": args.rho,
                "strategy": strategy.name,
                "t": result.t,
                "epsilon_hat": result.epsilon_hat,
                "ci_low": result.ci_low,
                "ci_high": result.ci_high,
                "trials": result.trials,
                "seed": seed,
            }
        )
    with open(args.out, "w", newline="") as handle:
        writer = csv.DictWriter(
            handle,
            fieldnames=[
                "n", "rho", "strategy", "t", "epsilon_hat",
                "ci_low", "ci_high", "trials", "seed",
            ],
        )
        writer.writeheader()
        writer.writerows(rows)
    summary: dict = {"out": args.out, "rows": rows}
    if len(rows) >= 2:
        slope, _ = np.polyfit(
            np.log([row["n"] for row in rows]),
            np.log([row["t"] for row in rows]),
            1,
        )
        summary["log_log_slope"] = round(float(slope), 4)
    _emit(summary, args.format)
    return EX_OK


def _cmd_vca_report(args: argparse.Namespace) -> int:
    result = case_study(
        args.scenario,
        forgeries=args.forgeries,
        alpha=args.alpha,
        k=args.k,
        seed=args.seed if args.seed is not None else 0,
    )
    report = result.as_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    _emit(report, args.format)
    return EX_OK


def build_parser() -> _Parser:
    parser = _Parser(
        prog="factbundle",
        description=(
            "Build, verify, and stress signed fact bundles; measure how many "
            "queries an unequipped checker needs; report verification-cost ratios."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--format", choices=("json", "text"), default="json",
            help="report format (default json)",
        )

    p = sub.add_parser("keygen", help="generate a signing keypair")
    p.add_argument("--publisher", required=True, help="publisher identity string")
    p.add_argument("--out", help="key file path (default $FACTBUNDLE_KEY_DIR/<publisher>.key.json)")
    p.add_argument("--registry", help="also record the verification key in this registry file")
    p.add_argument("--seed", type=int, help="deterministic key derivation seed")
    add_format(p)
    p.set_defaults(func=_cmd_keygen)

    p = sub.add_parser("build", help="build and sign a bundle from a provenance graph file")
    p.add_argument("--dag", required=True, help="provenance graph text file")
    p.add_argument("--key", required=True, help="signing key file from keygen")
    p.add_argument("--replication", type=int, default=1, help="copies of each constraint (default 1)")
    p.add_argument("--beacon", required=True, type=_hex_bytes(32), help="32-byte beacon value, hex")
    p.add_argument("--timestamp", type=int, help="metadata timestamp (default: claim timestamp)")
    p.add_argument("--out", required=True, help="output bundle path")
    add_format(p)
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("inspect", help="print the parsed contents of a bundle")
    p.add_argument("bundle", help="bundle file")
    add_format(p)
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("verify", help="verify a bundle (exit 0 accept, 1 reject, 2 defer)")
    p.add_argument("bundle", help="bundle file")
    p.add_argument("--keys", required=True, help="trusted key registry (JSON)")
    p.add_argument("--k", type=int, help="spot-check count (default 3, or derived from --beta)")
    p.add_argument("--beta", type=float, help="target soundness error; sets k when --k absent")
    p.add_argument("--eta", type=float, default=0.5, help="assumed violated-leaf fraction (default 0.5)")
    p.add_argument("--entropy", type=_hex_bytes(32), help="verifier entropy, 32 bytes hex")
    p.add_argument("--seed", type=int, help="derive entropy deterministically from this seed")
    p.add_argument(
        "--defer-on", action="append", dest="defer_on", metavar="CONDITION",
        help="conditions resolved as defer (repeatable); default: unknown-publisher",
    )
    add_format(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("tamper", help="mutate a bundle for soundness experiments")
    p.add_argument("bundle", help="input bundle file")
    p.add_argument("--out", required=True, help="output path for the mutated bundle")
    p.add_argument("--leaves", type=_percent_or_fraction, metavar="FRACTION",
                   help="rewrite this fraction of leaf payloads (e.g. 0.5 or 50%%)")
    p.add_argument("--signature", action="store_true", help="flip one signature byte")
    p.add_argument("--metadata", action="store_true", help="bump the signed timestamp without re-signing")
    p.add_argument("--seed", type=int, help="selection seed (default 0)")
    add_format(p)
    p.set_defaults(func=_cmd_tamper)

    p = sub.add_parser("simulate", help="measure query budgets needed to spot fabrication")
    p.add_argument("--n-list", required=True, type=_int_list, metavar="N1,N2,...",
                   help="world sizes, comma separated")
    p.add_argument("--rho", type=float, default=0.5, help="hidden fraction (default 0.5)")
    p.add_argument("--epsilon", type=float, default=0.5, help="target advantage (default 0.5)")
    p.add_argument("--trials", type=int, default=10_000, help="Monte-Carlo trials per probe (default 10000)")
    p.add_argument("--strategy", choices=sorted(STRATEGIES), default="uniform-pairwise")
    p.add_argument("--planted", type=int, default=1, help="planted inconsistent pairs (default 1)")
    p.add_argument("--budget-cap", type=int, default=1 << 20, help="give up beyond this budget")
    p.add_argument("--slow", action="store_true", help="force the per-query simulation path")
    p.add_argument("--seed", type=int, help="base seed (default 0)")
    p.add_argument("--out", required=True, help="CSV output path")
    add_format(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("vca-report", help="verification-cost asymmetry report for a scenario")
    p.add_argument("--scenario", default=SCENARIO_ACME_2026, help=f"scenario name (default {SCENARIO_ACME_2026})")
    p.add_argument("--forgeries", type=int, help="forged version count for the sweep procedure")
    p.add_argument("--alpha", type=_fraction, default=Fraction(0),
                   help="machine-time weight as an exact rational, e.g. 0, 0.5, 1/3 (default 0)")
    p.add_argument("--k", type=int, default=3, help="equipped spot-check count (default 3)")
    p.add_argument("--seed", type=int, help="entropy seed for the equipped verification run")
    p.add_argument("--out", help="also write the JSON report to this path")
    add_format(p)
    p.set_defaults(func=_cmd_vca_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FactBundleError as exc:
        print(f"factbundle {args.command}: {exc}", file=sys.stderr)
        return EX_FAIL
    except OSError as exc:
        print(f"factbundle {args.command}: {exc}", file=sys.stderr)
        return EX_FAIL
    except ValueError as exc:
        print(f"factbundle {args.command}: {exc}", file=sys.stderr)
        return EX_FAIL


if __name__ == "__main__":
    sys.exit(main())
