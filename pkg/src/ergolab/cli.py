"""Command-line runner: ``ergolab run <config>`` and ``ergolab list-scenarios``.

Exit codes: 0 all checks pass, 1 a check failed, 2 the config did not parse
or validate, 3 a scenario's ergodicity hypotheses failed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__, scenarios
from .config import SCHEMA_VERSION, ConfigError, load_path, resolve
from .errors import ErgolabError

EXIT_PASS, EXIT_CHECK, EXIT_CONFIG, EXIT_HYPOTHESIS = 0, 1, 2, 3


def _error(msg: str) -> None:
    print(f"ergolab: {msg}", file=sys.stderr)


def _write(out_dir: Path, files: dict[str, str], report: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out_dir / name).write_text(text)
    (out_dir / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


def run(config: str, output_dir: str | None = None, threads: int = 1, seed: int | None = None) -> int:
    t0 = time.perf_counter()
    try:
        raw = load_path(config)
        scenarios.check_schema(raw)
        if "scenario" not in raw:
            raise ConfigError("missing required key 'scenario'", "$")
        sc = scenarios.get(raw["scenario"])
        resolved = resolve(raw, sc.defaults(), seed)
        prepared = sc.prepare(resolved.data)
    except ConfigError as e:
        _error(f"invalid config {config}: {e}")
        return EXIT_CONFIG
    except ErgolabError as e:
        _error(f"invalid config {config}: {e}")
        return EXIT_CONFIG

    try:
        outcome = sc.execute(prepared, max(1, threads))
    except ConfigError as e:
        _error(f"invalid config {config}: {e}")
        return EXIT_CONFIG

    if outcome.hypothesis_failed:
        status = "hypothesis-failure"
        code = EXIT_HYPOTHESIS
    elif all(c.passed for c in outcome.checks):
        status, code = "pass", EXIT_PASS
    else:
        status, code = "fail", EXIT_CHECK
    report = {
        "schema_version": SCHEMA_VERSION,
        "scenario": sc.name,
        "claim": sc.claim,
        "status": status,
        "config_hash": resolved.hash(),
        "checks": [c.to_json() for c in outcome.checks],
        "wall_time": time.perf_counter() - t0,
        "version": __version__,
        "resolved_config": resolved.data,
        "hypothesis_report": outcome.hypothesis_report.to_json() if outcome.hypothesis_report else None,
        "details": outcome.details,
    }
    out_dir = Path(output_dir) if output_dir else Path(config).with_suffix("").parent / f"{Path(config).stem}_out"
    _write(out_dir, outcome.csv, report)
    for c in outcome.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.measured} {c.relation} {c.threshold}")
    if outcome.hypothesis_failed:
        print("hypotheses failed: " + ", ".join(outcome.hypothesis_report.failures()))
    print(f"{sc.name}: {status} ({report['wall_time']:.2f} s) -> {out_dir}")
    return code


def list_scenarios(as_json: bool = False) -> int:
    cat = scenarios.catalog()
    if as_json:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "scenarios": cat}, indent=2))
        return EXIT_PASS
    for s in cat:
        print(s["name"])
        print(f"  claim:       {s['claim']}")
        print(f"  hypotheses:  {s['hypotheses']}")
        print(f"  required:    {', '.join(s['required_keys'])}")
        print(f"  optional:    {', '.join(s['optional_keys'])}")
        for name, cols in s["csv"].items():
            print(f"  writes:      {name} [{', '.join(cols)}]")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ergolab", description="Reproducible multiple ergodic average experiments.")
    p.add_argument("--version", action="version", version=f"ergolab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one scenario config")
    r.add_argument("config")
    r.add_argument("--output-dir", default=None, help="where CSV files and report.json go (default <config>_out)")
    r.add_argument("--threads", type=int, default=1, help="worker threads; results do not depend on this")
    r.add_argument("--seed", type=int, default=None, help="override every sampler seed in the config")
    ls = sub.add_parser("list-scenarios", help="describe the available scenarios")
    ls.add_argument("--json", action="store_true", help="emit the catalog as JSON")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return run(args.config, args.output_dir, args.threads, args.seed)
    return list_scenarios(args.json)


if __name__ == "__main__":
    sys.exit(main())
