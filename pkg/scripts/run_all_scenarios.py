"""Run every scenario with its default config and summarise the exit codes."""

import argparse
import json
import sys
import tempfile
from pathlib import Path

from ergolab import cli, scenarios


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--output-dir", default="runs")
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args()
    out = Path(args.output_dir)
    codes = {}
    with tempfile.TemporaryDirectory() as tmp:
        for name in scenarios.SCENARIOS:
            cfg = Path(tmp) / f"{name}.json"
            cfg.write_text(json.dumps({"schema_version": 1, "scenario": name}))
            codes[name] = cli.main(["run", str(cfg), "--output-dir", str(out / name), "--threads", str(args.threads)])
    print()
    for name, code in codes.items():
        print(f"{name:<22} exit {code}")
    return max(codes.values())


if __name__ == "__main__":
    sys.exit(main())
