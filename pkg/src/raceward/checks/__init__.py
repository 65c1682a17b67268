"""Static checks for the race-prone Go idioms GR01-GR11."""

from .finding import ALL_CHECKS, CHECK_TITLES, CheckConfig, Confidence, Finding
from .rules import (
    CHECKS,
    check_gr01_loop_capture,
    check_gr02_err_capture,
    check_gr03_named_return_capture,
    check_gr04_slice_race,
    check_gr05_map_race,
    check_gr06_mutex_by_value,
    check_gr07_waitgroup_add,
    check_gr08_write_under_rlock,
    check_gr09_channel_shared_mix,
    check_gr10_partial_atomic,
    check_gr11_parallel_subtest_capture,
)
from .runner import Diagnostic, LintResult, discover, lint_file, lint_paths, lint_source, run_checks

__all__ = [
    "ALL_CHECKS",
    "CHECKS",
    "CHECK_TITLES",
    "CheckConfig",
    "Confidence",
    "Diagnostic",
    "Finding",
    "LintResult",
    "check_gr01_loop_capture",
    "check_gr02_err_capture",
    "check_gr03_named_return_capture",
    "check_gr04_slice_race",
    "check_gr05_map_race",
    "check_gr06_mutex_by_value",
    "check_gr07_waitgroup_add",
    "check_gr08_write_under_rlock",
    "check_gr09_channel_shared_mix",
    "check_gr10_partial_atomic",
    "check_gr11_parallel_subtest_capture",
    "discover",
    "lint_file",
    "lint_paths",
    "lint_source",
    "run_checks",
]
