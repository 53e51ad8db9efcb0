"""End-to-end pipeline: generate, graft, build, score, and report.

One candidate per (sample, prompt, generator) attempt. Per-candidate
failures are recorded, never fatal; only configuration errors abort a run.
All provider traffic goes through the gateway's transcript cache, so a
recorded run replays to a byte-identical results file.
"""

from __future__ import annotations

import csv
import json
import logging
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import grafting
from .buildrun import BuildOutcome, Limits, TestOutcome, classify, compile_tree, run_tests
from .errors import (
    EmptyRepairBody,
    GenerationIncomplete,
    MalformedExport,
    MissingRepairTags,
    PatchEvalError,
)
from .gateway import Gateway, ModelHandle, judge_pool
from .grafting import PatchCandidate, extract_patch, graft
from .prompts import (
    PromptTurn,
    REASONING_PLACEHOLDER,
    TemplateSet,
    prompt_spec,
    render,
    render_explanation_followup,
    render_ground_truth_explanation,
)
from .samples import VulnerabilitySample, extract_span, load_dataset
from .scoring import EvaluationRecord, cosine_similarity, judge_verdict, rouge_l_text
from .statistics import (
    DEFAULT_METRICS,
    SignificanceReport,
    format_binary_row,
    format_continuous_row,
    report_claim,
)

log = logging.getLogger(__name__)


@dataclass
class ClaimSpec:
    claim_id: str
    prompt_a: str
    prompt_b: str


@dataclass
class RunConfig:
    dataset_root: Path
    output_dir: Path
    prompt_ids: tuple[str, ...] = ("P1",)
    generators: tuple[ModelHandle, ...] = ()
    judges: tuple[ModelHandle, ...] = ()
    embed_model: Optional[ModelHandle] = None
    limits: Limits = field(default_factory=Limits)
    parallelism: int = 1
    seed: int = 0
    replay: bool = False
    few_shot_example_id: Optional[str] = None
    claims: tuple[ClaimSpec, ...] = ()
    bootstrap_resamples: int = 10_000

    def __post_init__(self):
        if not self.generators:
            raise ValueError("at least one generator is required")
        if self.judges:
            for g in self.generators:
                judge_pool(g, list(self.judges))


@dataclass
class CellSummary:
    prompt_id: str
    generator: str
    attempts: int
    c_rate: float
    t_rate: float
    mean_cs: dict[str, float]
    j_rate: dict[str, float]
    j_denominator: dict[str, int]


@dataclass
class RunSummary:
    cells: list[CellSummary]
    skipped_samples: dict[str, str]
    extraction_failures_in_denominator: bool = True


def candidate_dir(root: Path, sample_id: str, prompt_id: str, generator: str) -> Path:
    return root / sample_id / prompt_id / generator


def record_to_dict(rec: EvaluationRecord) -> dict:
    return asdict(rec)


def record_from_dict(raw: dict) -> EvaluationRecord:
    return EvaluationRecord(**raw)


def write_results(records: Sequence[EvaluationRecord], path: Path) -> None:
    """One JSON object per line, deterministically ordered."""
    ordered = sorted(records, key=lambda r: (r.sample_id, r.prompt_id, r.generator))
    with path.open("w") as fh:
        for rec in ordered:
            fh.write(json.dumps(record_to_dict(rec), sort_keys=True) + "\n")


def read_results(path: Path) -> list[EvaluationRecord]:
    return [record_from_dict(json.loads(line)) for line in path.read_text().splitlines()]


def sanity_gate(
    sample: VulnerabilitySample, workdir: Path, limits: Optional[Limits] = None
) -> str:
    """Graft the ground-truth fixed block over itself and build it.

    Returns the classification; anything other than plausible or
    compilable_untested disqualifies the sample from evaluation.
    """
    patch = extract_span(sample.fixed_tree, sample.fixed_loc, "block")
    tree = graft(sample.fixed_tree, sample.fixed_loc, "block", patch, workdir / "tree")
    build = compile_tree(tree, sample.compile_script, limits)
    tests = run_tests(tree, sample.test_script, limits) if build.status == "compiled" else None
    return classify(build, tests)


def _chat_sequences(
    gateway: Gateway,
    model: ModelHandle,
    sequences: list[list[PromptTurn]],
    temperature: float,
) -> tuple[str, list[PromptTurn]]:
    """Drive one- or two-turn prompt sequences; returns final text and turns."""
    first = gateway.chat(model, sequences[0], temperature).text
    if len(sequences) == 1:
        return first, sequences[0]
    final = [
        PromptTurn(t.role_tag, t.text.replace(REASONING_PLACEHOLDER, first))
        for t in sequences[1]
    ]
    return gateway.chat(model, final, temperature).text, final


def evaluate_candidate(
    cfg: RunConfig,
    gateway: Gateway,
    sample: VulnerabilitySample,
    prompt_id: str,
    generator: ModelHandle,
    templates: TemplateSet,
    example_sample: Optional[VulnerabilitySample],
    gt_explanations: dict[tuple[str, str], str],
    workroot: Path,
) -> EvaluationRecord:
    """Run the full per-candidate pipeline and return its record."""
    spec = prompt_spec(prompt_id, cfg.few_shot_example_id)
    cdir = candidate_dir(workroot, sample.id, prompt_id, generator.provider_id)
    cdir.mkdir(parents=True, exist_ok=True)
    granularity = "function" if spec.source_portion == "function" else "block"

    sequences = render(spec, sample, templates, example_sample)
    raw_output, _ = _chat_sequences(gateway, generator, sequences, spec.temperature)
    (cdir / "raw_output.txt").write_text(raw_output)

    candidate = PatchCandidate(
        sample_id=sample.id,
        prompt_id=prompt_id,
        generator=generator.provider_id,
        raw_output=raw_output,
        granularity=granularity,
    )
    record = EvaluationRecord(
        sample_id=sample.id,
        prompt_id=prompt_id,
        generator=generator.provider_id,
        status="not_compilable",
    )

    try:
        candidate.patch_text = extract_patch(raw_output)
    except (MissingRepairTags, EmptyRepairBody) as exc:
        candidate.extraction_error = type(exc).__name__
        record.extraction_error = type(exc).__name__
        _write_sidecar(cdir, candidate)
        return record

    tree_dir = cdir / "tree"
    if tree_dir.exists():
        shutil.rmtree(tree_dir)
    tree = graft(sample.fixed_tree, sample.fixed_loc, granularity, candidate.patch_text, tree_dir)
    build = compile_tree(tree, sample.compile_script, cfg.limits)
    tests = run_tests(tree, sample.test_script, cfg.limits) if build.status == "compiled" else None
    record.status = classify(build, tests)

    followup = render_explanation_followup(candidate.patch_text, templates)
    candidate.explanation = gateway.chat(generator, followup, spec.temperature).text

    fixed_block = extract_span(sample.fixed_tree, sample.fixed_loc, granularity)
    record.rouge_l = rouge_l_text(fixed_block, candidate.patch_text)["f1"]

    if cfg.judges:
        for judge in judge_pool(generator, list(cfg.judges)):
            key = (sample.id, judge.provider_id)
            if key not in gt_explanations:
                gt_prompt = render_ground_truth_explanation(sample, templates)
                gt_explanations[key] = gateway.chat(judge, gt_prompt).text
            e_g = gt_explanations[key]
            if cfg.embed_model is not None:
                record.explanation_cs[judge.provider_id] = cosine_similarity(
                    gateway.embed(cfg.embed_model, candidate.explanation),
                    gateway.embed(cfg.embed_model, e_g),
                )
            record.judge_verdicts[judge.provider_id] = judge_verdict(
                gateway, judge, sample.description, candidate.explanation, e_g, templates
            )
    if cfg.embed_model is not None:
        record.code_embed_cs = cosine_similarity(
            gateway.embed(cfg.embed_model, candidate.patch_text),
            gateway.embed(cfg.embed_model, fixed_block),
        )
    _write_sidecar(cdir, candidate)
    return record


def _write_sidecar(cdir: Path, candidate: PatchCandidate) -> None:
    (cdir / "candidate.json").write_text(
        json.dumps(asdict(candidate), sort_keys=True, indent=2)
    )


def summarize(records: Sequence[EvaluationRecord], skipped: dict[str, str]) -> RunSummary:
    cells: dict[tuple[str, str], list[EvaluationRecord]] = {}
    for rec in records:
        cells.setdefault((rec.prompt_id, rec.generator), []).append(rec)
    out = []
    for (pid, gen), recs in sorted(cells.items()):
        n = len(recs)
        c = sum(1 for r in recs if r.status != "not_compilable") / n
        t = sum(1 for r in recs if r.status == "plausible") / n
        cs_acc: dict[str, list[float]] = {}
        j_acc: dict[str, list[bool]] = {}
        for r in recs:
            for judge, val in r.explanation_cs.items():
                cs_acc.setdefault(judge, []).append(val)
            for judge, verdict in r.judge_verdicts.items():
                if verdict is not None:
                    j_acc.setdefault(judge, []).append(verdict)
        out.append(
            CellSummary(
                prompt_id=pid,
                generator=gen,
                attempts=n,
                c_rate=c,
                t_rate=t,
                mean_cs={j: sum(v) / len(v) for j, v in sorted(cs_acc.items())},
                j_rate={j: sum(v) / len(v) for j, v in sorted(j_acc.items())},
                j_denominator={j: len(v) for j, v in sorted(j_acc.items())},
            )
        )
    return RunSummary(cells=out, skipped_samples=dict(skipped))


def run_pipeline(cfg: RunConfig, gateway: Gateway) -> RunSummary:
    """Full run over the dataset; writes results and summary files."""
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    templates = TemplateSet()
    samples = load_dataset(cfg.dataset_root)

    example_sample = None
    if cfg.few_shot_example_id:
        by_id = {s.id: s for s in samples}
        example_sample = by_id.get(cfg.few_shot_example_id)
        samples = [s for s in samples if s.id != cfg.few_shot_example_id]

    skipped: dict[str, str] = {}
    eligible: list[VulnerabilitySample] = []
    for sample in samples:
        sanity_dir = cfg.output_dir / "sanity" / sample.id
        if sanity_dir.exists():
            shutil.rmtree(sanity_dir)
        verdict = sanity_gate(sample, sanity_dir, cfg.limits)
        if verdict in ("plausible", "compilable_untested"):
            eligible.append(sample)
        else:
            skipped[sample.id] = f"sanity gate failed: {verdict}"
            log.warning("skipping %s: %s", sample.id, skipped[sample.id])

    workroot = cfg.output_dir / "candidates"
    gt_explanations: dict[tuple[str, str], str] = {}
    tasks = [
        (sample, pid, gen)
        for sample in eligible
        for pid in cfg.prompt_ids
        for gen in cfg.generators
    ]

    def _one(task) -> EvaluationRecord:
        sample, pid, gen = task
        try:
            return evaluate_candidate(
                cfg, gateway, sample, pid, gen, templates, example_sample,
                gt_explanations, workroot,
            )
        except PatchEvalError as exc:
            log.error("candidate %s/%s/%s failed: %s", sample.id, pid, gen.provider_id, exc)
            return EvaluationRecord(
                sample_id=sample.id,
                prompt_id=pid,
                generator=gen.provider_id,
                status="not_compilable",
                extraction_error=type(exc).__name__,
            )

    if cfg.parallelism > 1:
        with ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
            records = list(pool.map(_one, tasks))
    else:
        records = [_one(t) for t in tasks]

    write_results(records, cfg.output_dir / "results.jsonl")
    summary = summarize(records, skipped)
    emit_report(summary, records, list(cfg.claims), cfg.output_dir,
                bootstrap_resamples=cfg.bootstrap_resamples, seed=cfg.seed)
    return summary


def rescore(cfg: RunConfig, results_path: Path) -> list[EvaluationRecord]:
    """Re-run build/test classification and ROUGE-L over stored candidates.

    Uses the candidate sidecars written by a previous run; records whose
    candidate directory is missing (or whose extraction failed) are kept
    unchanged. Provider-derived fields (CS, judge verdicts) are preserved.
    """
    samples = {s.id: s for s in load_dataset(cfg.dataset_root)}
    records = read_results(results_path)
    workroot = cfg.output_dir / "candidates"
    for rec in records:
        sample = samples.get(rec.sample_id)
        cdir = candidate_dir(workroot, rec.sample_id, rec.prompt_id, rec.generator)
        sidecar = cdir / "candidate.json"
        if sample is None or not sidecar.is_file():
            continue
        data = json.loads(sidecar.read_text())
        patch_text = data.get("patch_text", "")
        if not patch_text:
            continue
        granularity = data.get("granularity", "block")
        tree_dir = cdir / "tree"
        if tree_dir.exists():
            shutil.rmtree(tree_dir)
        tree = graft(sample.fixed_tree, sample.fixed_loc, granularity, patch_text, tree_dir)
        build = compile_tree(tree, sample.compile_script, cfg.limits)
        tests = run_tests(tree, sample.test_script, cfg.limits) if build.status == "compiled" else None
        rec.status = classify(build, tests)
        fixed = extract_span(sample.fixed_tree, sample.fixed_loc, granularity)
        rec.rouge_l = rouge_l_text(fixed, patch_text)["f1"]
    write_results(records, results_path)
    return records


# --- iterative feedback driver ----------------------------------------------


@dataclass(frozen=True)
class _Turn:
    role_tag: str
    text: str


def feedback_repair(
    cfg: RunConfig,
    gateway: Gateway,
    sample: VulnerabilitySample,
    generator: ModelHandle,
    budget: int,
    workroot: Path,
    templates: Optional[TemplateSet] = None,
) -> list[tuple[PatchCandidate, str]]:
    """Iteratively refine a patch using build/test logs as feedback.

    The first iteration is a chain-of-thought exchange seeded with the
    vulnerability description; each later iteration appends the failing log
    to the same conversation and asks for a revised patch. Stops at the
    first plausible (or untested-compilable) candidate or at the budget.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    templates = templates or TemplateSet()
    spec = prompt_spec("P7")
    sequences = render(spec, sample, templates)
    reasoning = gateway.chat(generator, sequences[0], spec.temperature).text
    conversation: list = [
        *sequences[0],
        _Turn("assistant", reasoning),
        *[
            _Turn(t.role_tag, t.text.replace(REASONING_PLACEHOLDER, reasoning))
            for t in sequences[1]
            if t.role_tag != "system"
        ],
    ]

    results: list[tuple[PatchCandidate, str]] = []
    for iteration in range(1, budget + 1):
        raw = gateway.chat(generator, conversation, spec.temperature).text
        conversation.append(_Turn("assistant", raw))
        candidate = PatchCandidate(
            sample_id=sample.id,
            prompt_id="feedback",
            generator=generator.provider_id,
            raw_output=raw,
        )
        status = "not_compilable"
        failure_log = ""
        try:
            candidate.patch_text = extract_patch(raw)
        except (MissingRepairTags, EmptyRepairBody) as exc:
            candidate.extraction_error = type(exc).__name__
            failure_log = f"no usable patch: {exc}"
        if candidate.patch_text:
            tree_dir = workroot / f"iter{iteration}" / "tree"
            if tree_dir.exists():
                shutil.rmtree(tree_dir)
            tree = graft(sample.fixed_tree, sample.fixed_loc, "block", candidate.patch_text, tree_dir)
            build = compile_tree(tree, sample.compile_script, cfg.limits)
            tests = run_tests(tree, sample.test_script, cfg.limits) if build.status == "compiled" else None
            status = classify(build, tests)
            failure_log = (tests.log if tests and tests.status != "no_tests" else build.log) or build.log
        results.append((candidate, status))
        if status in ("plausible", "compilable_untested"):
            break
        if iteration < budget:
            conversation.append(
                _Turn("user", templates.fill("feedback_failure", log=failure_log.strip() or "(empty log)"))
            )
    return results


# --- synthetic-sample generation ----------------------------------------------


def generate_synthetic_sample(
    gateway: Gateway,
    real_sample: VulnerabilitySample,
    exemplar: VulnerabilitySample,
    generator: ModelHandle,
    out_dir: Path,
    max_fix_rounds: int = 3,
    compile_check: Optional[Callable[[Path], tuple[bool, str]]] = None,
    templates: Optional[TemplateSet] = None,
) -> dict:
    """Draft a synthetic Java sample from a real one via few-shot prompting.

    Output is always marked DRAFT; human verification is required before a
    draft joins a dataset.
    """
    templates = templates or TemplateSet()
    compile_check = compile_check or _javac_check

    example_tests = ""
    if exemplar.test_script is not None:
        example_tests = exemplar.test_script.read_text()
    prompt1 = templates.fill(
        "synth_vulnerable",
        example_vulnerable=extract_span(exemplar.vulnerable_tree, exemplar.vulnerable_loc, "function"),
        example_fixed=extract_span(exemplar.fixed_tree, exemplar.fixed_loc, "function"),
        example_tests=example_tests,
        description=real_sample.description,
        vulnerable_function=extract_span(real_sample.vulnerable_tree, real_sample.vulnerable_loc, "function"),
    )
    synthetic_vulnerable = extract_patch(
        gateway.chat(generator, [PromptTurn("user", prompt1)]).text
    )

    prompt2 = templates.fill(
        "synth_fixed",
        synthetic_vulnerable=synthetic_vulnerable,
        real_vulnerable_block=extract_span(real_sample.vulnerable_tree, real_sample.vulnerable_loc, "block"),
        real_fixed_block=extract_span(real_sample.fixed_tree, real_sample.fixed_loc, "block"),
    )
    synthetic_fixed = extract_patch(
        gateway.chat(generator, [PromptTurn("user", prompt2)]).text
    )

    prompt3 = templates.fill(
        "synth_tests",
        synthetic_vulnerable=synthetic_vulnerable,
        synthetic_fixed=synthetic_fixed,
    )
    synthetic_tests = extract_patch(
        gateway.chat(generator, [PromptTurn("user", prompt3)]).text
    )

    out_dir.mkdir(parents=True, exist_ok=True)
    fix_rounds = 0
    logs: list[str] = []
    while True:
        _write_draft(out_dir, synthetic_vulnerable, synthetic_fixed, synthetic_tests)
        ok, build_log = compile_check(out_dir)
        if ok:
            break
        logs.append(build_log)
        if fix_rounds >= max_fix_rounds:
            raise GenerationIncomplete(fix_rounds, logs)
        fix_rounds += 1
        fix_prompt = templates.fill("synth_compile_fix", log=build_log)
        synthetic_fixed = extract_patch(
            gateway.chat(generator, [PromptTurn("user", fix_prompt)]).text
        )

    draft = {
        "id": f"{real_sample.id}-synthetic",
        "kind": "synthetic",
        "language": "java",
        "status": "DRAFT",
        "derived_from": real_sample.id,
        "fix_rounds": fix_rounds,
    }
    (out_dir / "draft.json").write_text(json.dumps(draft, indent=2, sort_keys=True))
    (out_dir / "DRAFT").write_text("requires human verification\n")
    return draft


def _write_draft(out_dir: Path, vulnerable: str, fixed: str, tests: str) -> None:
    (out_dir / "vulnerable").mkdir(exist_ok=True)
    (out_dir / "fixed").mkdir(exist_ok=True)
    (out_dir / "vulnerable" / "Sample.java").write_text(vulnerable + "\n")
    (out_dir / "fixed" / "Sample.java").write_text(fixed + "\n")
    (out_dir / "SampleTest.java").write_text(tests + "\n")


def _javac_check(out_dir: Path) -> tuple[bool, str]:
    import subprocess

    javac = shutil.which("javac")
    if javac is None:
        return True, "javac unavailable; compile check skipped"
    proc = subprocess.run(
        [javac, "-d", str(out_dir / "classes"), str(out_dir / "fixed" / "Sample.java")],
        capture_output=True,
        text=True,
    )
    return proc.returncode == 0, proc.stdout + proc.stderr


# --- reporting -----------------------------------------------------------------


def _heat(values: list[float]) -> list[float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        return [0.0 for _ in values]
    return [(v - lo) / (hi - lo) for v in values]


def emit_report(
    summary: RunSummary,
    records: Sequence[EvaluationRecord],
    claims: Sequence[ClaimSpec],
    out_dir: Path,
    bootstrap_resamples: int = 10_000,
    seed: int = 0,
) -> list[SignificanceReport]:
    """Write summary CSV/text tables and, when configured, the claims section."""
    out_dir.mkdir(parents=True, exist_ok=True)
    judges = sorted({j for cell in summary.cells for j in cell.mean_cs} |
                    {j for cell in summary.cells for j in cell.j_rate})
    header = ["prompt", "generator", "attempts", "C", "T"]
    header += [f"CS_{j}" for j in judges] + [f"J_{j}" for j in judges]
    header += ["C_heat", "T_heat"]

    c_heat = _heat([c.c_rate for c in summary.cells]) if summary.cells else []
    t_heat = _heat([c.t_rate for c in summary.cells]) if summary.cells else []

    rows = []
    for i, cell in enumerate(summary.cells):
        row = [cell.prompt_id, cell.generator, cell.attempts,
               f"{cell.c_rate:.4f}", f"{cell.t_rate:.4f}"]
        row += [f"{cell.mean_cs[j]:.4f}" if j in cell.mean_cs else "" for j in judges]
        row += [f"{cell.j_rate[j]:.4f}" if j in cell.j_rate else "" for j in judges]
        row += [f"{c_heat[i]:.4f}", f"{t_heat[i]:.4f}"]
        rows.append(row)

    with (out_dir / "summary.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)

    lines = ["  ".join(header)]
    lines += ["  ".join(str(v) for v in row) for row in rows]
    if summary.skipped_samples:
        lines.append("")
        lines += [f"skipped {sid}: {why}" for sid, why in sorted(summary.skipped_samples.items())]

    reports: list[SignificanceReport] = []
    if claims:
        by_prompt: dict[str, list[EvaluationRecord]] = {}
        for rec in records:
            by_prompt.setdefault(rec.prompt_id, []).append(rec)
        lines.append("")
        lines.append("Paired significance tests")
        claim_rows = []
        for claim in claims:
            rep = report_claim(
                claim.claim_id,
                by_prompt.get(claim.prompt_a, []),
                by_prompt.get(claim.prompt_b, []),
                DEFAULT_METRICS,
                bootstrap_resamples=bootstrap_resamples,
                seed=seed,
            )
            reports.append(rep)
            for name, result in rep.binary.items():
                text = format_binary_row(rep.binary_counts[name], result)
                lines.append(f"{claim.claim_id} {name}: {text}")
                claim_rows.append([claim.claim_id, name, text])
            for name, result in rep.continuous.items():
                text = format_continuous_row(result)
                lines.append(f"{claim.claim_id} {name}: {text}")
                claim_rows.append([claim.claim_id, name, text])
        with (out_dir / "claims.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["claim", "metric", "result"])
            writer.writerows(claim_rows)

    (out_dir / "summary.txt").write_text("\n".join(lines) + "\n")
    return reports


# --- annotation round-trip -------------------------------------------------------


REVIEW_EXPORT_VERSION = 1


def export_review(
    samples: Sequence[VulnerabilitySample],
    records: Sequence[EvaluationRecord],
    candidates_root: Path,
    out_file: Path,
) -> dict:
    """Write the blinded review export: no reasoning-metric fields at all."""
    by_id = {s.id: s for s in samples}
    items = []
    for rec in sorted(records, key=lambda r: (r.sample_id, r.prompt_id, r.generator)):
        sample = by_id.get(rec.sample_id)
        if sample is None:
            continue
        cdir = candidate_dir(candidates_root, rec.sample_id, rec.prompt_id, rec.generator)
        sidecar = cdir / "candidate.json"
        patch_text = ""
        if sidecar.is_file():
            patch_text = json.loads(sidecar.read_text()).get("patch_text", "")
        if not patch_text:
            continue
        items.append(
            {
                "item_id": f"{rec.sample_id}/{rec.prompt_id}/{rec.generator}",
                "sample_id": rec.sample_id,
                "prompt_id": rec.prompt_id,
                "generator": rec.generator,
                "description": sample.description,
                "vulnerable_block": extract_span(sample.vulnerable_tree, sample.vulnerable_loc, "block"),
                "fixed_block": extract_span(sample.fixed_tree, sample.fixed_loc, "block"),
                "patch_text": patch_text,
                "status": rec.status,
            }
        )
    payload = {"version": REVIEW_EXPORT_VERSION, "items": items}
    out_file.write_text(json.dumps(payload, indent=2, sort_keys=True))
    return payload


def import_labels(
    records: Sequence[EvaluationRecord], labels_file: Path
) -> list[EvaluationRecord]:
    """Apply annotator labels (with resolutions) back onto records."""
    raw = json.loads(labels_file.read_text())
    if raw.get("version") != REVIEW_EXPORT_VERSION:
        raise MalformedExport(f"unsupported label file version: {raw.get('version')}")
    finals: dict[str, str] = {}
    votes: dict[str, list[str]] = {}
    for entry in raw.get("labels", []):
        votes.setdefault(entry["item_id"], []).append(entry["label"])
    for entry in raw.get("resolutions", []):
        finals[entry["item_id"]] = entry["final_label"]
    for item_id, labels in votes.items():
        if item_id not in finals and len(set(labels)) == 1 and len(labels) >= 1:
            finals[item_id] = labels[0]
    for rec in records:
        item_id = f"{rec.sample_id}/{rec.prompt_id}/{rec.generator}"
        if item_id in finals:
            rec.human_label = finals[item_id]
    return list(records)
