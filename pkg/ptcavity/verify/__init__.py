"""Seeded verification suites and their JSON report."""

from ptcavity.verify.suites import SUITES, SuiteResult, run_suites

__all__ = ["SUITES", "SuiteResult", "run_suites"]
