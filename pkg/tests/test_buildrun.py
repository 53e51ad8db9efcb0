import os
from pathlib import Path

import pytest

from patcheval.buildrun import (
    BuildOutcome,
    Limits,
    TestOutcome as BuildTestOutcome,
    TRUNCATION_MARKER,
    classify,
    compile_tree,
    run_tests,
)
from patcheval.errors import InconsistentInputs, SandboxSetupFailure


def _script(tmp_path: Path, name: str, body: str) -> Path:
    path = tmp_path / name
    path.write_text("#!/bin/sh\n" + body)
    path.chmod(0o755)
    return path


@pytest.fixture
def tree(tmp_path):
    d = tmp_path / "tree"
    d.mkdir()
    return d


def test_compile_success(tree, tmp_path):
    script = _script(tmp_path, "ok.sh", "echo building\nexit 0\n")
    outcome = compile_tree(tree, script)
    assert outcome.status == "compiled"
    assert "building" in outcome.log
    assert (tree / "compile.log").read_text() == outcome.log


def test_compile_failure(tree, tmp_path):
    script = _script(tmp_path, "bad.sh", "echo nope >&2\nexit 3\n")
    outcome = compile_tree(tree, script)
    assert outcome.status == "compile_failed"
    assert "nope" in outcome.log  # stderr is merged into the log


def test_compile_timeout(tree, tmp_path):
    script = _script(tmp_path, "slow.sh", "sleep 30\n")
    outcome = compile_tree(tree, script, Limits(timeout_s=0.3))
    assert outcome.status == "compile_timeout"
    assert outcome.duration < 5


def test_scripts_run_in_tree_cwd(tree, tmp_path):
    script = _script(tmp_path, "pwd.sh", "pwd\n")
    outcome = compile_tree(tree, script)
    assert outcome.log.strip().endswith(tree.name)


def test_missing_script_is_setup_failure(tree, tmp_path):
    with pytest.raises(SandboxSetupFailure):
        compile_tree(tree, tmp_path / "absent.sh")
    unexec = tmp_path / "noexec.sh"
    unexec.write_text("#!/bin/sh\n")
    with pytest.raises(SandboxSetupFailure):
        compile_tree(tree, unexec)


def test_missing_tree_is_setup_failure(tmp_path):
    script = _script(tmp_path, "ok.sh", "exit 0\n")
    with pytest.raises(SandboxSetupFailure):
        compile_tree(tmp_path / "absent", script)


def test_log_truncation(tree, tmp_path):
    script = _script(tmp_path, "noisy.sh", "for i in $(seq 1000); do echo $i; done\n")
    outcome = compile_tree(tree, script, Limits(log_cap_bytes=100))
    assert outcome.log.endswith(TRUNCATION_MARKER)
    assert len(outcome.log) < 200


def test_environment_is_minimal(tree, tmp_path):
    os.environ["PATCHEVAL_SECRET"] = "leak"
    try:
        script = _script(tmp_path, "env.sh", "echo secret=$PATCHEVAL_SECRET\n")
        outcome = compile_tree(tree, script)
        assert "leak" not in outcome.log
    finally:
        del os.environ["PATCHEVAL_SECRET"]


def test_run_tests_statuses(tree, tmp_path):
    passing = _script(tmp_path, "pass.sh", "exit 0\n")
    failing = _script(tmp_path, "fail.sh", "exit 1\n")
    assert run_tests(tree, passing).status == "all_passed"
    assert run_tests(tree, failing).status == "some_failed"
    assert run_tests(tree, None).status == "no_tests"
    slow = _script(tmp_path, "slow.sh", "sleep 30\n")
    assert run_tests(tree, slow, Limits(timeout_s=0.3)).status == "test_timeout"


def _b(status):
    return BuildOutcome(status=status, log="", duration=0.0)


def _t(status):
    return BuildTestOutcome(status=status, log="", duration=0.0)


def test_classify_matrix():
    assert classify(_b("compile_failed"), None) == "not_compilable"
    assert classify(_b("compile_timeout"), None) == "not_compilable"
    assert classify(_b("compiled"), _t("no_tests")) == "compilable_untested"
    assert classify(_b("compiled"), _t("all_passed")) == "plausible"
    assert classify(_b("compiled"), _t("some_failed")) == "not_plausible"
    assert classify(_b("compiled"), _t("test_timeout")) == "not_plausible"


def test_classify_inconsistent_inputs():
    with pytest.raises(InconsistentInputs):
        classify(_b("compile_failed"), _t("all_passed"))
    with pytest.raises(InconsistentInputs):
        classify(_b("compiled"), None)
