"""Rendering of the 21 prompt configurations into chat turn sequences.

Each configuration fixes a temperature, an orientation (role persona vs.
bare task statement), a prompting strategy, the source portion shown, and
the set of auxiliary text sections. Rendering is pure: identical inputs
yield byte-identical output. Wording beyond the pinned fragments lives in
template files so golden tests can pin it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Literal, Optional

from .errors import EmptyPatch, MissingAuxInput, MissingFewShotExample
from .samples import VulnerabilitySample, extract_span

Orientation = Literal["role", "task"]
Strategy = Literal[
    "zero_shot",
    "few_shot",
    "cot_with_reasoning",
    "cot_without_reasoning",
    "pearce_nh",
    "pearce_s1",
    "pearce_s2",
    "pearce_c",
    "pearce_cm",
]
SourcePortion = Literal["block", "function", "block_with_context"]

REASONING_PLACEHOLDER = "{{REASONING}}"

PROMPT_IDS = tuple(f"P{i}" for i in range(1, 22))


@dataclass(frozen=True)
class PromptSpec:
    id: str
    temperature: float = 0.2
    orientation: Orientation = "role"
    strategy: Strategy = "zero_shot"
    source_portion: SourcePortion = "block"
    aux: frozenset[str] = frozenset({"description"})
    few_shot_example: Optional[str] = None


@dataclass(frozen=True)
class PromptTurn:
    role_tag: Literal["system", "user"]
    text: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("prompt turn text must be non-empty")


# Configuration table for P1..P21. Unset fields take PromptSpec defaults
# (temperature 0.2, role orientation, zero-shot, block source, description).
_TABLE: dict[str, dict] = {
    "P1": {},
    "P2": {"temperature": 0.5},
    "P3": {"temperature": 0.9},
    "P4": {"orientation": "task"},
    "P5": {},
    "P6": {"strategy": "few_shot"},
    "P7": {"strategy": "cot_with_reasoning"},
    "P8": {"strategy": "cot_without_reasoning"},
    "P9": {},
    "P10": {"source_portion": "function"},
    "P11": {"source_portion": "block_with_context"},
    "P12": {"aux": frozenset()},
    "P13": {},
    "P14": {"aux": frozenset({"description", "specification"})},
    "P15": {"aux": frozenset({"description", "repair_steps"})},
    "P16": {"aux": frozenset({"repair_steps"})},
    "P17": {"strategy": "pearce_nh", "source_portion": "function", "aux": frozenset()},
    "P18": {"strategy": "pearce_s1", "source_portion": "function", "aux": frozenset()},
    "P19": {"strategy": "pearce_s2", "source_portion": "function", "aux": frozenset()},
    "P20": {"strategy": "pearce_c", "aux": frozenset()},
    "P21": {"strategy": "pearce_cm"},
}


def prompt_spec(prompt_id: str, few_shot_example: Optional[str] = None) -> PromptSpec:
    """Build the fixed configuration for one of P1..P21."""
    if prompt_id not in _TABLE:
        raise ValueError(f"unknown prompt id: {prompt_id}")
    overrides = dict(_TABLE[prompt_id])
    if prompt_id == "P6":
        overrides["few_shot_example"] = few_shot_example
    return PromptSpec(id=prompt_id, **overrides)


def default_template_dir() -> Path:
    return Path(str(resources.files("patcheval") / "templates"))


class TemplateSet:
    """Named plain-text templates with str.format placeholders."""

    def __init__(self, directory: Optional[Path] = None):
        self.directory = Path(directory) if directory else default_template_dir()
        self._cache: dict[str, str] = {}

    def get(self, name: str) -> str:
        if name not in self._cache:
            self._cache[name] = (self.directory / f"{name}.txt").read_text().rstrip("\n")
        return self._cache[name]

    def fill(self, name: str, **kwargs: str) -> str:
        return self.get(name).format(**kwargs)


_AUX_ORDER = ("context", "specification", "description", "repair_steps")


def _aux_sections(
    spec: PromptSpec, sample: VulnerabilitySample, templates: TemplateSet
) -> list[str]:
    wanted = set(spec.aux)
    if spec.source_portion == "block_with_context":
        wanted.add("context")
    # A missing specification degrades P14 to P13's aux set rather than failing.
    if "specification" in wanted and not sample.specification:
        wanted.discard("specification")
    sections = []
    for name in _AUX_ORDER:
        if name not in wanted:
            continue
        value = getattr(sample, name)
        if not value:
            raise MissingAuxInput(name)
        if name == "description":
            sections.append(templates.fill("section_vulnerability", description=value))
        elif name == "specification":
            sections.append(templates.fill("section_specification", specification=value))
        elif name == "repair_steps":
            sections.append(templates.fill("section_steps", steps=value))
        else:
            sections.append(templates.fill("section_context", context=value))
    return sections


def _source_text(spec: PromptSpec, sample: VulnerabilitySample) -> str:
    granularity = "function" if spec.source_portion == "function" else "block"
    return extract_span(sample.vulnerable_tree, sample.vulnerable_loc, granularity)


def _with_orientation(
    spec: PromptSpec, body: str, templates: TemplateSet
) -> list[PromptTurn]:
    if spec.orientation == "role":
        return [
            PromptTurn("system", templates.get("system_role")),
            PromptTurn("user", body),
        ]
    return [PromptTurn("user", templates.get("task_preamble") + "\n\n" + body)]


def _comment_out(code: str, prefix: str = "// ") -> str:
    return "\n".join(prefix + line for line in code.split("\n"))


def _render_pearce(
    spec: PromptSpec, sample: VulnerabilitySample, templates: TemplateSet
) -> list[list[PromptTurn]]:
    code = _source_text(spec, sample)
    parts: list[str] = []
    if spec.strategy == "pearce_nh":
        parts.append(code)
    elif spec.strategy in ("pearce_s1", "pearce_s2"):
        comment = (
            "// bugfix: fixed logical vulnerability"
            if spec.strategy == "pearce_s1"
            else "// fixed logical vulnerability"
        )
        signature = code.split("\n", 1)[0]
        parts.append(signature + "\n" + comment)
    elif spec.strategy == "pearce_c":
        parts.append(
            "// BUG: logical vulnerability\n"
            + _comment_out(code)
            + "\n// FIXED:"
        )
    else:  # pearce_cm
        parts.append(
            "// BUG: logical vulnerability\n"
            + "// MESSAGE: " + sample.description.replace("\n", " ") + "\n"
            + _comment_out(code)
            + "\n// FIXED VERSION:"
        )
    body = "\n".join(parts) + "\n\n" + templates.get("pearce_completion_instruction")
    return [_with_orientation(spec, body, templates)]


def render(
    spec: PromptSpec,
    sample: VulnerabilitySample,
    templates: Optional[TemplateSet] = None,
    example_sample: Optional[VulnerabilitySample] = None,
) -> list[list[PromptTurn]]:
    """Render ``spec`` against ``sample`` into one or two turn sequences.

    Chain-of-thought strategies produce two sequences; the second one of
    ``cot_with_reasoning`` carries REASONING_PLACEHOLDER where the model's
    first-turn answer must be substituted before sending.
    """
    templates = templates or TemplateSet()
    if spec.strategy.startswith("pearce_"):
        return _render_pearce(spec, sample, templates)

    code_section = templates.fill("section_code", code=_source_text(spec, sample))
    aux = _aux_sections(spec, sample, templates)

    if spec.strategy == "few_shot":
        if example_sample is None:
            raise MissingFewShotExample(
                f"{spec.id} needs a few-shot example sample (configured id: "
                f"{spec.few_shot_example})"
            )
        example = templates.fill(
            "few_shot_example",
            example_description=example_sample.description,
            example_vulnerable=extract_span(
                example_sample.vulnerable_tree, example_sample.vulnerable_loc, "block"
            ),
            example_fixed=extract_span(
                example_sample.fixed_tree, example_sample.fixed_loc, "block"
            ),
        )
        body = "\n\n".join(
            [example, code_section, *aux, templates.get("repair_instruction")]
        )
        return [_with_orientation(spec, body, templates)]

    if spec.strategy in ("cot_with_reasoning", "cot_without_reasoning"):
        first = "\n\n".join(
            [code_section, *aux, templates.get("cot_reasoning_request")]
        )
        second_parts = [code_section]
        if spec.strategy == "cot_with_reasoning":
            second_parts.append(
                templates.fill("cot_reasoning_section", reasoning=REASONING_PLACEHOLDER)
            )
        second_parts.append(templates.get("repair_instruction"))
        second = "\n\n".join(second_parts)
        return [
            _with_orientation(spec, first, templates),
            _with_orientation(spec, second, templates),
        ]

    # zero_shot
    body = "\n\n".join([code_section, *aux, templates.get("repair_instruction")])
    return [_with_orientation(spec, body, templates)]


def render_explanation_followup(
    patch_text: str, templates: Optional[TemplateSet] = None
) -> list[PromptTurn]:
    """Follow-up turn asking for a brief explanation of a generated patch."""
    if not patch_text:
        raise EmptyPatch("cannot request an explanation for an empty patch")
    templates = templates or TemplateSet()
    return [PromptTurn("user", templates.fill("explanation_followup", patch=patch_text))]


def render_ground_truth_explanation(
    sample: VulnerabilitySample, templates: Optional[TemplateSet] = None
) -> list[PromptTurn]:
    """Zero-shot request for a reference explanation of the ground-truth fix."""
    templates = templates or TemplateSet()
    body = templates.fill(
        "ground_truth_explanation",
        description=sample.description,
        vulnerable_block=extract_span(sample.vulnerable_tree, sample.vulnerable_loc, "block"),
        fixed_block=extract_span(sample.fixed_tree, sample.fixed_loc, "block"),
    )
    return [PromptTurn("user", body)]


def render_judge_verdict_prompt(
    description: str,
    explanation: str,
    reference: str,
    templates: Optional[TemplateSet] = None,
) -> list[PromptTurn]:
    """Binary-verdict request comparing a patch explanation to the reference."""
    templates = templates or TemplateSet()
    body = templates.fill(
        "judge_verdict",
        description=description,
        explanation=explanation,
        reference=reference,
    )
    return [PromptTurn("user", body)]
