"""Dataset schema, loading/validation, and source-span extraction.

A dataset root holds one ``dataset.json`` manifest plus per-sample source
trees and scripts. All paths in the manifest are relative to the root.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Literal, Optional

from .errors import (
    BlockOutsideFunction,
    DatasetError,
    DatasetValidationError,
    EmptyDescription,
    FocusOutsideBlock,
    MissingFile,
    SpanOutOfRange,
)

MANIFEST_NAME = "dataset.json"

Granularity = Literal["block", "function"]


@dataclass(frozen=True)
class Localization:
    """Line-level location of a core fix inside one file of a tree.

    Spans are 1-based inclusive [start, end]; the block span must lie
    inside the function span.
    """

    file: str
    function_span: tuple[int, int]
    block_span: tuple[int, int]

    def span(self, granularity: Granularity) -> tuple[int, int]:
        return self.block_span if granularity == "block" else self.function_span


@dataclass(frozen=True)
class VulnerabilitySample:
    """One dataset entry: trees, localization, scripts, and auxiliary text."""

    id: str
    kind: Literal["real", "synthetic"]
    language: str
    vulnerable_tree: Path
    fixed_tree: Path
    description: str
    vulnerable_loc: Localization
    fixed_loc: Localization
    compile_script: Path
    test_script: Optional[Path] = None
    specification: Optional[str] = None
    repair_steps: Optional[str] = None
    context: Optional[str] = None


@dataclass(frozen=True)
class FocusResult:
    """Outcome of budget-driven narrowing; over_budget marks a forced span."""

    loc: Localization
    over_budget: bool = False


def _parse_loc(raw: dict) -> Localization:
    return Localization(
        file=raw["file"],
        function_span=tuple(raw["function_span"]),
        block_span=tuple(raw["block_span"]),
    )


def _parse_sample(root: Path, raw: dict) -> VulnerabilitySample:
    def opt_path(key: str) -> Optional[Path]:
        return root / raw[key] if raw.get(key) else None

    return VulnerabilitySample(
        id=raw["id"],
        kind=raw["kind"],
        language=raw.get("language", ""),
        vulnerable_tree=root / raw["vulnerable_tree"],
        fixed_tree=root / raw["fixed_tree"],
        description=raw.get("description", ""),
        vulnerable_loc=_parse_loc(raw["vulnerable_loc"]),
        fixed_loc=_parse_loc(raw["fixed_loc"]),
        compile_script=root / raw["compile_script"],
        test_script=opt_path("test_script"),
        specification=raw.get("specification"),
        repair_steps=raw.get("repair_steps"),
        context=raw.get("context"),
    )


def _line_count(path: Path) -> int:
    return len(path.read_text().split("\n"))


def _validate_loc(
    sample_id: str, field: str, tree: Path, loc: Localization
) -> list[DatasetError]:
    errors: list[DatasetError] = []
    target = tree / loc.file
    if not target.is_file():
        return [MissingFile(f"localized file not found: {target}", sample_id, field)]
    n = _line_count(target)
    for name, (start, end) in (
        ("function_span", loc.function_span),
        ("block_span", loc.block_span),
    ):
        if not (1 <= start <= end <= n):
            errors.append(
                SpanOutOfRange(
                    f"{name} [{start}, {end}] outside file of {n} lines",
                    sample_id,
                    f"{field}.{name}",
                )
            )
    fs, fe = loc.function_span
    bs, be = loc.block_span
    if not (fs <= bs and be <= fe):
        errors.append(
            BlockOutsideFunction(
                f"block_span [{bs}, {be}] not inside function_span [{fs}, {fe}]",
                sample_id,
                field,
            )
        )
    return errors


def _validate_sample(sample: VulnerabilitySample) -> list[DatasetError]:
    errors: list[DatasetError] = []
    if not sample.description.strip():
        errors.append(EmptyDescription("description is empty", sample.id, "description"))
    for field, tree in (
        ("vulnerable_tree", sample.vulnerable_tree),
        ("fixed_tree", sample.fixed_tree),
    ):
        if not tree.is_dir():
            errors.append(MissingFile(f"tree not found: {tree}", sample.id, field))
    scripts = [("compile_script", sample.compile_script)]
    if sample.test_script is not None:
        scripts.append(("test_script", sample.test_script))
    for field, script in scripts:
        if not script.is_file():
            errors.append(MissingFile(f"script not found: {script}", sample.id, field))
        elif not os.access(script, os.X_OK):
            errors.append(MissingFile(f"script not executable: {script}", sample.id, field))
    if sample.vulnerable_tree.is_dir():
        errors += _validate_loc(
            sample.id, "vulnerable_loc", sample.vulnerable_tree, sample.vulnerable_loc
        )
    if sample.fixed_tree.is_dir():
        errors += _validate_loc(sample.id, "fixed_loc", sample.fixed_tree, sample.fixed_loc)
    return errors


def load_dataset(root: Path | str) -> list[VulnerabilitySample]:
    """Load and validate every sample under ``root``.

    Either returns all samples in manifest order or raises
    DatasetValidationError listing every violation.
    """
    root = Path(root)
    manifest = root / MANIFEST_NAME
    if not manifest.is_file():
        raise DatasetValidationError(
            [MissingFile(f"manifest not found: {manifest}", "<dataset>", "manifest")]
        )
    raw = json.loads(manifest.read_text())
    samples = [_parse_sample(root, entry) for entry in raw["samples"]]
    violations: list[DatasetError] = []
    for sample in samples:
        violations += _validate_sample(sample)
    if violations:
        raise DatasetValidationError(violations)
    return samples


def extract_span(
    tree: Path | str, loc: Localization, granularity: Granularity = "block"
) -> str:
    """Return exactly the requested span's lines, without the final newline."""
    target = Path(tree) / loc.file
    lines = target.read_text().split("\n")
    start, end = loc.span(granularity)
    if not (1 <= start <= end <= len(lines)):
        raise SpanOutOfRange(
            f"span [{start}, {end}] outside file of {len(lines)} lines",
            "?",
            loc.file,
        )
    return "\n".join(lines[start - 1 : end])


def count_tokens(text: str) -> int:
    """Whitespace-delimited token count used for the focus budget."""
    return len(text.split())


def focused_span(
    tree: Path | str,
    loc: Localization,
    token_budget: int,
    focus: Optional[tuple[int, int]] = None,
) -> FocusResult:
    """Narrow an oversized block around ``focus`` to fit ``token_budget``.

    Blocks already within budget pass through unchanged. Otherwise the focus
    lines are widened symmetrically, one whole line at a time, while the
    widened span stays within budget. A focus that alone exceeds the budget
    is returned as-is with over_budget set.
    """
    if token_budget <= 0:
        raise ValueError("token_budget must be positive")
    target = Path(tree) / loc.file
    lines = target.read_text().split("\n")
    bs, be = loc.block_span
    block_tokens = sum(count_tokens(lines[i - 1]) for i in range(bs, be + 1))
    if block_tokens <= token_budget:
        return FocusResult(loc=loc, over_budget=False)

    if focus is None:
        mid = (bs + be) // 2
        focus = (mid, mid)
    fs, fe = focus
    if not (bs <= fs <= fe <= be):
        raise FocusOutsideBlock(
            f"focus [{fs}, {fe}] outside block [{bs}, {be}]", "?", loc.file
        )

    def span_tokens(lo: int, hi: int) -> int:
        return sum(count_tokens(lines[i - 1]) for i in range(lo, hi + 1))

    lo, hi = fs, fe
    total = span_tokens(lo, hi)
    if total > token_budget:
        narrowed = replace(loc, block_span=(lo, hi))
        return FocusResult(loc=narrowed, over_budget=True)

    while True:
        grew = False
        if lo > bs:
            cost = count_tokens(lines[lo - 2])
            if total + cost <= token_budget:
                lo -= 1
                total += cost
                grew = True
        if hi < be:
            cost = count_tokens(lines[hi])
            if total + cost <= token_budget:
                hi += 1
                total += cost
                grew = True
        if not grew:
            break

    return FocusResult(loc=replace(loc, block_span=(lo, hi)), over_budget=False)
