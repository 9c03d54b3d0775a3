#!/usr/bin/env python3
"""Run the acceptance suite and print one PASS/FAIL line per criterion."""

import re
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-s", "-q", "--durations=0", str(ROOT / "tests" / "test_acceptance.py")],
        cwd=ROOT, capture_output=True, text=True,
    )
    for line in proc.stdout.splitlines():
        if re.match(r"\[(PASS|FAIL)\]", line) or " call " in line or re.search(r"\d+ (passed|failed)", line):
            print(line)
    return proc.returncode


if __name__ == "__main__":
    sys.exit(main())
