#!/usr/bin/env python3
"""
Run all tests in the tests directory.
Usage: python tests/run_tests.py [extra pytest arguments]
"""

import os
import sys
import pytest

def main():
    """Run all tests in the tests directory."""
    # Get the directory of this script
    tests_dir = os.path.dirname(os.path.abspath(__file__))

    # Add the parent directory to the path so `src.qclab` imports resolve
    parent_dir = os.path.dirname(tests_dir)
    sys.path.append(parent_dir)

    # Run from the project root so fixture paths resolve
    os.chdir(parent_dir)
    result = pytest.main(["-xvs", tests_dir, *sys.argv[1:]])

    # Return the exit code from pytest
    return result

if __name__ == "__main__":
    sys.exit(main())
