"""Thin command-line client for the service.

Every subcommand is a request against the HTTP API; without --server the
app is driven in-process, so no server needs to be running.  Exit codes:
0 success/pass, 1 classification or elimination failure (or a failed
check/verify/selftest), 2 usage, syntax or file errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import httpx


def make_client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

        from .service import app

        return TestClient(app)


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(human)


def _request(client: httpx.Client, path: str, payload: dict) -> dict:
    try:
        resp = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        raise SystemExit(2)
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail")
        except ValueError:
            detail = resp.text
        print(f"error: {detail}", file=sys.stderr)
        # a not-eliminable verdict is a classification/elimination failure,
        # not a usage error
        if isinstance(detail, dict) and detail.get("error") == "not-eliminable":
            raise SystemExit(1)
        raise SystemExit(2)
    return resp.json()


def cmd_parse(client, args) -> int:
    data = _request(client, "/parse", {"formula": args.formula})
    human = (
        f"{data['pretty']}\n"
        f"ast: {json.dumps(data['ast'])}\n"
        f"basic: {data['basic']}  pure: {data['pure']}  "
        f"variables: {', '.join(data['variables']) or '-'}  "
        f"nominals: {', '.join(data['nominals']) or '-'}"
    )
    _emit(args, data, human)
    return 0


def cmd_classify(client, args) -> int:
    data = _request(client, "/classify", {"formula": args.formula})
    if data["inductive"]:
        _emit(args, data, f"inductive with order {data['order_pretty']}")
        return 0
    _emit(args, data, "not inductive")
    return 1


def cmd_alba(client, args) -> int:
    data = _request(client, "/alba", {"formula": args.formula, "trace": args.trace})
    lines = []
    if args.trace and data.get("trace"):
        for step in data["trace"]:
            params = f" [{', '.join(step['params'])}]" if step["params"] else ""
            lines.append(f"{step['rule']}{params}:")
            lines.append(f"    {step['before']}")
            lines.append(f"    --> {step['after']}")
    if data["status"] == "success":
        lines.extend(data["systems"])
        _emit(args, data, "\n".join(lines))
        return 0
    lines.append(f"failure: {data['detail']}")
    if data.get("stuck_system"):
        lines.append(f"stuck system: {data['stuck_system']}")
    _emit(args, data, "\n".join(lines))
    return 1


def cmd_translate(client, args) -> int:
    data = _request(client, "/translate", {"formula": args.formula})
    _emit(args, data, data["sentence"])
    return 0


def cmd_check(client, args) -> int:
    try:
        with open(args.frame, "r", encoding="utf-8") as fh:
            frame = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read frame file: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: frame file is not valid JSON: {exc}", file=sys.stderr)
        return 2
    data = _request(client, "/check", {"item": args.item, "frame": frame, "budget": args.budget})
    _emit(args, data, "valid" if data["valid"] else "invalid")
    return 0 if data["valid"] else 1


def cmd_verify(client, args) -> int:
    data = _request(client, "/verify", {
        "formula": args.formula,
        "max_size": args.max_size,
        "budget": args.budget,
        "dedup": args.dedup,
    })
    lines = [
        f"formula: {data['formula']}",
        f"order: {data['order']}",
        "systems: " + " ;; ".join(data["systems"]),
        f"sentence: {data['sentence']}",
        "frames checked: " + ", ".join(f"n={k}: {v}" for k, v in sorted(data["frames_checked"].items())),
        f"elapsed: {data['elapsed']:.2f}s",
    ]
    if data["mismatches"]:
        lines.append(f"MISMATCHES ({len(data['mismatches'])}):")
        lines.extend(f"  {m}" for m in data["mismatches"][:20])
    if data["budget_exhausted"]:
        lines.append(f"budget exhausted on {len(data['budget_exhausted'])} frames")
    lines.append("result: " + ("PASS" if data["ok"] else "FAIL"))
    _emit(args, data, "\n".join(lines))
    return 0 if data["ok"] else 1


def cmd_frames(client, args) -> int:
    payload = {"size": args.size, "count_only": args.count, "dedup": args.dedup,
               "limit": args.limit}
    data = _request(client, "/frames", payload)
    if args.count:
        _emit(args, data, str(data["count"]))
        return 0
    human = "\n".join(json.dumps(f) for f in data["frames"])
    _emit(args, data, human)
    return 0


def cmd_selftest(client, args) -> int:
    data = _request(client, "/selftest", {
        "max_size": args.max_size,
        "seed": args.seed,
        "min_corpus": args.corpus,
        "adequacy_triples": args.adequacy,
        "sample_4": args.sample4,
    })
    rep = data["report"]
    lines = []
    for name in ("success", "algebra", "rules", "adequacy"):
        sub = rep[name]
        verdict = "PASS" if sub["ok"] else "FAIL"
        lines.append(f"{name:9} {verdict}  ({sub['elapsed']:.2f}s)")
        for key in ("failures", "violations", "mismatches", "discrepancies", "budget_exhausted"):
            for item in sub.get(key, [])[:10]:
                lines.append(f"    {key}: {item}")
    lines.append("result: " + ("PASS" if data["ok"] else "FAIL"))
    _emit(args, data, "\n".join(lines))
    return 0 if data["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fmalba",
        description="Correspondence engine for intuitionistic modal logic over birelational frames",
    )
    parser.add_argument("--server", metavar="URL",
                        help="remote service URL (default: run the app in-process)")
    parser.add_argument("--json", action="store_true", help="machine-readable JSON output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="echo the syntax tree of a formula")
    p.add_argument("formula")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("classify", help="search for a dependence order witness")
    p.add_argument("formula")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("alba", help="run the variable-elimination stages")
    p.add_argument("formula")
    p.add_argument("--trace", action="store_true", help="print every rule application")
    p.set_defaults(fn=cmd_alba)

    p = sub.add_parser("translate", help="classify, eliminate, and print the first-order correspondent")
    p.add_argument("formula")
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("check", help="validity of a formula/inequality on one frame")
    p.add_argument("item")
    p.add_argument("--frame", required=True, metavar="FILE", help="frame JSON file")
    p.add_argument("--budget", type=int, default=10 ** 6, help="valuation budget (default 10^6)")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("verify", help="compare modal validity with the correspondent on all frames")
    p.add_argument("formula")
    p.add_argument("--max-size", type=int, default=3, metavar="N")
    p.add_argument("--budget", type=int, default=10 ** 6)
    p.add_argument("--dedup", action="store_true", help="one frame per isomorphism class")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("frames", help="enumerate admissible frames")
    p.add_argument("--size", type=int, required=True, metavar="N")
    p.add_argument("--count", action="store_true", help="print only the count")
    p.add_argument("--dedup", action="store_true")
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(fn=cmd_frames)

    p = sub.add_parser("selftest", help="run every verification suite")
    p.add_argument("--max-size", type=int, default=3, metavar="N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corpus", type=int, default=20, help="minimum sampled corpus size")
    p.add_argument("--adequacy", type=int, default=200, help="translation-adequacy triples")
    p.add_argument("--sample4", type=int, default=100, help="sampled 4-point frames")
    p.set_defaults(fn=cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; pass both through
        return int(exc.code or 0)
    with make_client(args.server) as client:
        try:
            return args.fn(client, args)
        except SystemExit as exc:
            return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
