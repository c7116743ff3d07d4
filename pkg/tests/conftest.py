"""Shared fixtures and the acceptance-suite summary hook."""

from __future__ import annotations

from pathlib import Path

import pytest

from cupcleaner.embedding import EmbeddingCache, HashEmbedder

DATA_DIR = Path(__file__).parent / "data"
CORPUS_DIR = DATA_DIR / "corpus"
GOLDEN_DIR = Path(__file__).parent / "goldens"
CONFORMANCE_FIXTURE = Path(__file__).resolve().parents[1] / "conformance" / "embed_protocol.json"


@pytest.fixture
def hash_provider():
    return HashEmbedder()

@pytest.fixture
def disk_cache(tmp_path):
    return EmbeddingCache(tmp_path / "cache")


_acceptance_reports: list = []


def pytest_runtest_logreport(report):
    if "test_acceptance" in report.nodeid and report.when == "call":
        _acceptance_reports.append(report)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_reports:
        return
    terminalreporter.section("acceptance criteria")
    for report in _acceptance_reports:
        name = report.nodeid.split("::", 1)[1]
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        terminalreporter.write_line(f"{status}  {name}")
