"""Command line front end: check manifests, emit reports, replay witnesses.

Exit codes: 0 when the requested work ran to completion (verdicts may still
be false; they are results, not failures), 2 for manifest problems, 3 when
a witness fails to replay.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .manifest import ManifestParseError, parse_manifest
from .report import canonical_json, render_text, replay_report, run_manifest


def _load_manifest(path: Path):
    try:
        text = path.read_text()
    except OSError as exc:
        print(f"cofun: cannot read {path}: {exc.strerror}", file=sys.stderr)
        return None
    try:
        return parse_manifest(text)
    except ManifestParseError as exc:
        for err in exc.errors:
            print(f"{path}:{err}", file=sys.stderr)
        return None


def _cmd_check(args) -> int:
    manifest = _load_manifest(args.manifest)
    if manifest is None:
        return 2
    report = run_manifest(manifest)
    sys.stdout.write(render_text(report))
    if args.json is not None:
        args.json.write_bytes(canonical_json(report))
    if args.replay:
        failures = replay_report(report)
        if failures:
            for entry in failures:
                print(f"cofun: witness for {entry['predicate']}({entry['target']}) "
                      "failed to replay", file=sys.stderr)
            return 3
        print(f"replayed {sum(1 for e in report['analyses'] if e['witness'])} witnesses")
    return 0


def _cmd_replay(args) -> int:
    try:
        report = json.loads(args.report.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cofun: cannot load report {args.report}: {exc}", file=sys.stderr)
        return 2
    failures = replay_report(report)
    total = sum(1 for e in report.get("analyses", []) if e.get("witness"))
    if failures:
        for entry in failures:
            print(f"cofun: witness for {entry['predicate']}({entry['target']}) "
                  "failed to replay", file=sys.stderr)
        return 3
    print(f"replayed {total} witnesses")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cofun",
        description="finitely presented modules, their functors, and module predicates")
    sub = parser.add_subparsers(dest="command", required=True)
    check = sub.add_parser("check", help="run the analyses listed in a manifest")
    check.add_argument("manifest", type=Path, help="manifest file")
    check.add_argument("--json", type=Path, metavar="PATH",
                       help="also write the canonical JSON report to PATH")
    check.add_argument("--replay", action="store_true",
                       help="re-verify every witness after running")
    replay = sub.add_parser("replay", help="re-verify the witnesses in a stored report")
    replay.add_argument("report", type=Path, help="JSON report produced by check --json")
    args = parser.parse_args(argv)
    if args.command == "check":
        return _cmd_check(args)
    return _cmd_replay(args)


if __name__ == "__main__":
    sys.exit(main())
