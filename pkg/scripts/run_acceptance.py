"""Print one PASS/FAIL line per acceptance criterion.

    python3 scripts/run_acceptance.py [criterion ...]

Exit status is the number of failing criteria.
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import test_acceptance as ta  # noqa: E402


def main(argv):
    nums = [int(a) for a in argv] or sorted(ta.CHECKS)
    failed = 0
    for num in nums:
        ok, detail = ta.CHECKS[num]()
        ta.report(num, ok, detail)
        failed += not ok
    return failed


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
