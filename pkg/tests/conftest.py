"""Shared fixtures and helpers for the test suite."""

import io
import sys
from contextlib import redirect_stderr, redirect_stdout
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import pytest

import complygraph as cg


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return Path(str(resources.files("complygraph") / "data"))


@pytest.fixture(scope="session")
def mini_regulation(data_dir) -> cg.RegulationDoc:
    return cg.parse_regulation((data_dir / "mini_regulation.txt").read_text())


@pytest.fixture(scope="session")
def gdpr_regulation(data_dir) -> cg.RegulationDoc:
    return cg.parse_regulation((data_dir / "gdpr.txt").read_text())


@dataclass
class CliResult:
    code: int
    out: str
    err: str


def run_cli(argv: list[str]) -> CliResult:
    """Invoke the CLI entry point in-process, capturing streams."""
    from complygraph.cli import main

    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return CliResult(code, out.getvalue(), err.getvalue())


@pytest.fixture
def cli():
    return run_cli


_SUMMARY_LINES: list[str] = []


def passfail(label: str, ok: bool) -> None:
    """One-line verdict printed by each acceptance test."""
    line = f"{label}: {'PASS' if ok else 'FAIL'}"
    print(line)
    sys.stdout.flush()
    _SUMMARY_LINES.append(line)


def summary_note(line: str) -> None:
    """Record an informational line for the end-of-run summary."""
    print(line)
    sys.stdout.flush()
    _SUMMARY_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _SUMMARY_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _SUMMARY_LINES:
            terminalreporter.write_line(line)
