"""Patch extraction from model output and line-splice grafting.

Candidates are grafted onto the ground-truth fixed tree so that supporting
changes outside the core fix are already in place; only the localized span
is replaced.
"""

from __future__ import annotations

import shutil
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional

from .errors import CopyFailure, EmptyRepairBody, MissingRepairTags, SpanOutOfRange
from .samples import Granularity, Localization

OPEN_TAG = "<repair>"
CLOSE_TAG = "</repair>"


@dataclass
class PatchCandidate:
    sample_id: str
    prompt_id: str
    generator: str
    raw_output: str
    patch_text: str = ""
    granularity: Granularity = "block"
    explanation: Optional[str] = None
    extraction_error: Optional[str] = None


def _strip_fence(text: str) -> str:
    lines = text.split("\n")
    if len(lines) >= 2 and lines[0].lstrip().startswith("```"):
        lines = lines[1:]
        if lines and lines[-1].strip() == "```":
            lines = lines[:-1]
        return "\n".join(lines)
    return text


def extract_patch(raw_output: str) -> str:
    """Content of the first <repair>...</repair> pair.

    A single leading/trailing newline is trimmed and a wrapping markdown
    code fence is removed; models emit fences despite instructions.
    """
    start = raw_output.find(OPEN_TAG)
    if start < 0:
        raise MissingRepairTags(f"no {OPEN_TAG} tag in model output")
    start += len(OPEN_TAG)
    end = raw_output.find(CLOSE_TAG, start)
    if end < 0:
        raise MissingRepairTags(f"no closing {CLOSE_TAG} tag in model output")
    body = raw_output[start:end]
    if body.startswith("\n"):
        body = body[1:]
    if body.endswith("\n"):
        body = body[:-1]
    body = _strip_fence(body)
    if not body.strip():
        raise EmptyRepairBody("repair tags contain no code")
    return body


def splice_lines(content: str, span: tuple[int, int], patch_text: str) -> str:
    """Replace the 1-based inclusive line span of ``content`` with the patch."""
    lines = content.split("\n")
    start, end = span
    if not (1 <= start <= end <= len(lines)):
        raise SpanOutOfRange(
            f"span [{start}, {end}] outside file of {len(lines)} lines", "?", "?"
        )
    return "\n".join(lines[: start - 1] + patch_text.split("\n") + lines[end:])


def graft(
    fixed_tree: Path | str,
    loc: Localization,
    granularity: Granularity,
    patch_text: str,
    workdir: Path | str,
) -> Path:
    """Copy ``fixed_tree`` into ``workdir`` and splice the patch over the span.

    The workdir must be absent or empty; every other file stays byte-exact.
    """
    fixed_tree = Path(fixed_tree)
    workdir = Path(workdir)
    if workdir.exists() and any(workdir.iterdir()):
        raise CopyFailure(f"workdir is not empty: {workdir}")
    try:
        shutil.copytree(fixed_tree, workdir, dirs_exist_ok=True)
    except OSError as exc:
        raise CopyFailure(f"copying {fixed_tree} -> {workdir}: {exc}")
    target = workdir / loc.file
    content = target.read_text()
    target.write_text(splice_lines(content, loc.span(granularity), patch_text))
    return workdir
