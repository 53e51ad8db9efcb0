"""Execution of compile and test scripts under resource limits.

Scripts run with the candidate tree as their working directory and a
minimal environment; exit code 0 means success. Logs are captured beside
the tree as compile.log / test.log, truncated at a byte cap.
"""

from __future__ import annotations

import os
import signal
import subprocess
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional

from .errors import InconsistentInputs, SandboxSetupFailure

TRUNCATION_MARKER = "\n...[log truncated]...\n"

BuildStatus = Literal["compiled", "compile_failed", "compile_timeout"]
TestStatus = Literal["all_passed", "some_failed", "test_timeout", "no_tests"]
Classification = Literal[
    "not_compilable", "compilable_untested", "plausible", "not_plausible"
]


@dataclass
class Limits:
    timeout_s: float = 1800.0
    mem_bytes: Optional[int] = None
    log_cap_bytes: int = 1_000_000
    env_passthrough: tuple[str, ...] = ("PATH", "HOME", "LANG", "TMPDIR")


@dataclass
class BuildOutcome:
    status: BuildStatus
    log: str
    duration: float


@dataclass
class TestOutcome:
    status: TestStatus
    log: str
    duration: float


def _run_script(script: Path, tree: Path, limits: Limits) -> tuple[Optional[int], str, float, bool]:
    """Run a script; returns (exit code or None on timeout, log, duration, timed_out)."""
    if not script.is_file() or not os.access(script, os.X_OK):
        raise SandboxSetupFailure(f"script missing or not executable: {script}")
    if not tree.is_dir():
        raise SandboxSetupFailure(f"tree not found: {tree}")
    env = {k: os.environ[k] for k in limits.env_passthrough if k in os.environ}

    def _set_limits():
        os.setsid()
        if limits.mem_bytes is not None:
            import resource

            resource.setrlimit(resource.RLIMIT_AS, (limits.mem_bytes, limits.mem_bytes))

    start = time.monotonic()
    proc = subprocess.Popen(
        [str(script.resolve())],
        cwd=tree,
        env=env,
        stdout=subprocess.PIPE,
        stderr=subprocess.STDOUT,
        preexec_fn=_set_limits,
    )
    timed_out = False
    try:
        out, _ = proc.communicate(timeout=limits.timeout_s)
    except subprocess.TimeoutExpired:
        timed_out = True
        try:
            os.killpg(proc.pid, signal.SIGKILL)
        except ProcessLookupError:
            pass
        out, _ = proc.communicate()
    duration = time.monotonic() - start
    log = out.decode(errors="replace") if out else ""
    if len(log.encode()) > limits.log_cap_bytes:
        log = log[: limits.log_cap_bytes] + TRUNCATION_MARKER
    return (None if timed_out else proc.returncode), log, duration, timed_out


def compile_tree(tree: Path | str, compile_script: Path | str, limits: Optional[Limits] = None) -> BuildOutcome:
    tree, script = Path(tree), Path(compile_script)
    limits = limits or Limits()
    code, log, duration, timed_out = _run_script(script, tree, limits)
    if timed_out:
        status: BuildStatus = "compile_timeout"
    elif code == 0:
        status = "compiled"
    else:
        status = "compile_failed"
    (tree / "compile.log").write_text(log)
    return BuildOutcome(status=status, log=log, duration=duration)


def run_tests(
    tree: Path | str,
    test_script: Optional[Path | str],
    limits: Optional[Limits] = None,
) -> TestOutcome:
    tree = Path(tree)
    limits = limits or Limits()
    if test_script is None:
        return TestOutcome(status="no_tests", log="", duration=0.0)
    code, log, duration, timed_out = _run_script(Path(test_script), tree, limits)
    if timed_out:
        status: TestStatus = "test_timeout"
    elif code == 0:
        status = "all_passed"
    else:
        status = "some_failed"
    (tree / "test.log").write_text(log)
    return TestOutcome(status=status, log=log, duration=duration)


def classify(b: BuildOutcome, t: Optional[TestOutcome]) -> Classification:
    """Total classification over build and test outcomes."""
    if b.status != "compiled":
        if t is not None and t.status != "no_tests":
            raise InconsistentInputs("test outcome present for a failed build")
        return "not_compilable"
    if t is None:
        raise InconsistentInputs("compiled build requires a test outcome")
    if t.status == "no_tests":
        return "compilable_untested"
    if t.status == "all_passed":
        return "plausible"
    return "not_plausible"
