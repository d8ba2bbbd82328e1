"""Command-line runner: ``singpot run | list-scenarios | report``."""
from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
import tempfile

from .config import ConfigError, ScenarioConfig, load_config
from .scenarios import SCENARIOS, run_scenario

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="singpot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and write its report")
    run.add_argument("--config", required=True, help="key = value scenario file")
    run.add_argument("--out", default="out", help="output directory (replaced atomically)")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--grid-scale", type=float, default=None,
                     help="scale node counts per axis (0 < s <= 4)")

    sub.add_parser("list-scenarios", help="list the scenario kinds")

    rep = sub.add_parser("report", help="summarize an output directory")
    rep.add_argument("--summarize", required=True, metavar="DIR")
    return parser


def _publish(tmp: str, out: str) -> None:
    """Replace ``out`` by ``tmp``; the old directory is removed only afterwards."""
    out = os.path.abspath(out)
    old = None
    if os.path.exists(out):
        old = out + ".old"
        if os.path.exists(old):
            shutil.rmtree(old)
        os.rename(out, old)
    os.rename(tmp, out)
    if old is not None:
        shutil.rmtree(old)


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        cfg = cfg.with_overrides(seed=args.seed, grid_scale=args.grid_scale)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    parent = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(parent, exist_ok=True)
    tmp = tempfile.mkdtemp(prefix=".singpot-", dir=parent)
    try:
        with open(os.path.join(tmp, "config.echo.txt"), "w", encoding="utf-8") as fh:
            fh.write(cfg.echo())
        report = run_scenario(cfg, tmp)
        with open(os.path.join(tmp, "report.json"), "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
        _publish(tmp, args.out)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    print(summarize(report.to_dict()))
    return EXIT_OK if report.passed else EXIT_FAIL


def summarize(data: dict) -> str:
    """One line per check plus an overall verdict."""
    lines = [f"scenario: {data['scenario']}"]
    for c in data["checks"]:
        status = "PASS" if c["passed"] else "FAIL"
        if not c.get("asserted", True):
            status = "INFO"
        measured = c["measured"]
        if isinstance(measured, float):
            measured = f"{measured:.6g}"
        elif isinstance(measured, (list, dict)):
            measured = json.dumps(measured)[:60]
        lines.append(f"  {status:4}  {c['claim_id']:<40} {measured}  ({c['tolerance']})")
    for err in data.get("errors", []):
        lines.append(f"  ERROR {err}")
    lines.append("overall: " + ("PASS" if data["passed"] else "FAIL"))
    return "\n".join(lines)


def cmd_report(args) -> int:
    path = os.path.join(args.summarize, "report.json")
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(summarize(data))
    return EXIT_OK if data["passed"] else EXIT_FAIL


def cmd_list() -> int:
    for name, desc in SCENARIOS.items():
        print(f"{name:<10} {desc}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "report":
        return cmd_report(args)
    return cmd_list()


if __name__ == "__main__":
    sys.exit(main())
