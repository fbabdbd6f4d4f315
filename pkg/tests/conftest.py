"""Session fixtures: the HPT instances and one full c666 example at p = 10007.

The acceptance criteria print one line each at the end of the run.
"""

from __future__ import annotations

import json
import time

import pytest

from conic_forge import hpt_fixture as hpt
from conic_forge import pipeline

EXAMPLE_PRIME = 10007
EXAMPLE_SEED = 1

ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def hpt41():
    return hpt.build(41)


@pytest.fixture(scope="session")
def hpt10007():
    return hpt.build(10007)


@pytest.fixture(scope="session")
def scan41(hpt41):
    return hpt.rank_le1_scan(hpt41.bundle)


@pytest.fixture(scope="session")
def hpt_report(hpt41):
    return hpt.verify_all(hpt41)


@pytest.fixture(scope="session")
def example():
    return pipeline.build_with_retries(EXAMPLE_PRIME, EXAMPLE_SEED, 32)


@pytest.fixture(scope="session")
def cli_example(tmp_path_factory):
    """The build-example command run once through the CLI entry point."""
    from conic_forge.cli import main

    out = tmp_path_factory.mktemp("example")
    report, bundle = out / "report.json", out / "bundle.json"
    start = time.perf_counter()
    code = main(["build-example", "--prime", str(EXAMPLE_PRIME), "--seed", str(EXAMPLE_SEED),
                 "--retries", "32", "--output", str(report), "--bundle-out", str(bundle)])
    return {"code": code, "report": json.loads(report.read_text()), "bundle": bundle.read_text(),
            "report_path": report, "seconds": time.perf_counter() - start}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key:2d}. {line}")
