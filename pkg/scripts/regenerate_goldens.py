#!/usr/bin/env python3
"""
Rewrite the golden classification reports in tests/golden/.

Run after an intentional change to the classifier or the report format,
then review the diff before committing.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

# Add the project root to the path
ROOT = Path(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path.insert(0, str(ROOT))

from src.qclab.classifier import classify_conformal_type, load_group
from src.qclab.errors import QclabError
from src.qclab.format import render_report
from src.qclab.logging_config import configure_root_logger_without_timestamp

logger = logging.getLogger("qclab.scripts.regenerate_goldens")

FIXTURES = ROOT / "fixtures" / "algebras"
GOLDEN = ROOT / "tests" / "golden"

# fixtures that are expected to fail and have no golden report
SKIP = {"jacobi_violation"}


def regenerate(check_only: bool = False) -> int:
    changed = 0
    for path in sorted(FIXTURES.glob("*.yaml")):
        if path.stem in SKIP:
            continue
        try:
            report = classify_conformal_type(load_group(path.read_text(), name=path.stem))
        except QclabError as e:
            logger.error(f"{path.name}: {type(e).__name__}: {e.message}")
            return -1
        text = render_report(report)
        target = GOLDEN / f"classify_{path.stem}.yaml"
        if target.exists() and target.read_text() == text:
            continue
        changed += 1
        if check_only:
            logger.warning(f"{target.name} is out of date")
        else:
            target.write_text(text)
            logger.info(f"Wrote {target.relative_to(ROOT)}")
    return changed


def main():
    parser = argparse.ArgumentParser(
        description="Regenerate golden classification reports",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Rewrite every golden report
  python scripts/regenerate_goldens.py

  # Only report which goldens differ
  python scripts/regenerate_goldens.py --check
        """,
    )
    parser.add_argument("--check", action="store_true", help="Report differences without writing")
    args = parser.parse_args()

    configure_root_logger_without_timestamp()
    GOLDEN.mkdir(parents=True, exist_ok=True)

    changed = regenerate(check_only=args.check)
    if changed < 0:
        return 2
    logger.info(f"{changed} golden report(s) {'out of date' if args.check else 'rewritten'}")
    return 1 if args.check and changed else 0


if __name__ == "__main__":
    sys.exit(main())
