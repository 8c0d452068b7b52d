#!/usr/bin/env python3
"""Run the acceptance suite and print one pass/fail line per criterion."""

import subprocess
import sys

if __name__ == "__main__":
    raise SystemExit(
        subprocess.call(
            [sys.executable, "-m", "pytest", "tests/test_acceptance.py", "-s", "-q"]
            + sys.argv[1:]
        )
    )
