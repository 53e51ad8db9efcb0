"""Command-line entry points.

A run is described by one declarative JSON config file; API keys come from
the environment only (each provider entry names its key variable).
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .buildrun import Limits
from .errors import DatasetValidationError
from .gateway import (
    Gateway,
    ModelHandle,
    OpenAICompatProvider,
    ScriptedProvider,
    TranscriptCache,
)
from .pipeline import (
    ClaimSpec,
    RunConfig,
    emit_report,
    rescore,
    export_review,
    generate_synthetic_sample,
    import_labels,
    read_results,
    run_pipeline,
    sanity_gate,
    summarize,
    write_results,
)
from .samples import load_dataset


def _handle(raw: dict) -> ModelHandle:
    return ModelHandle(
        provider_id=raw["provider_id"],
        capabilities=frozenset(raw.get("capabilities", ["chat"])),
        supports_temperature=raw.get("supports_temperature", True),
    )


def _provider(raw: dict):
    kind = raw.get("type", "openai")
    if kind == "scripted":
        return ScriptedProvider(
            script=raw.get("script"), default=raw.get("default"),
            replies=raw.get("replies"),
        )
    key_env = raw.get("api_key_env", "")
    return OpenAICompatProvider(
        base_url=raw["base_url"],
        model=raw["model"],
        api_key=os.environ.get(key_env, ""),
    )


def load_run_config(path: Path) -> tuple[RunConfig, Gateway]:
    raw = json.loads(path.read_text())
    limits_raw = raw.get("limits", {})
    cfg = RunConfig(
        dataset_root=Path(raw["dataset_root"]),
        output_dir=Path(raw["output_dir"]),
        prompt_ids=tuple(raw.get("prompt_ids", ["P1"])),
        generators=tuple(_handle(g) for g in raw.get("generators", [])),
        judges=tuple(_handle(j) for j in raw.get("judges", [])),
        embed_model=_handle(raw["embed_model"]) if raw.get("embed_model") else None,
        limits=Limits(
            timeout_s=limits_raw.get("timeout_s", 1800.0),
            mem_bytes=limits_raw.get("mem_bytes"),
        ),
        parallelism=raw.get("parallelism", 1),
        seed=raw.get("seed", 0),
        replay=raw.get("replay", False),
        few_shot_example_id=raw.get("few_shot_example_id"),
        claims=tuple(
            ClaimSpec(c["claim_id"], c["prompt_a"], c["prompt_b"])
            for c in raw.get("claims", [])
        ),
        bootstrap_resamples=raw.get("bootstrap_resamples", 10_000),
    )
    providers = {pid: _provider(p) for pid, p in raw.get("providers", {}).items()}
    cache = None
    if raw.get("transcript_dir"):
        cache = TranscriptCache(Path(raw["transcript_dir"]))
    gateway = Gateway(providers, cache=cache, replay=cfg.replay)
    return cfg, gateway


@click.group()
def main():
    """Evaluation harness for logical-vulnerability patch generation."""


@main.command()
@click.argument("config", type=click.Path(exists=True, path_type=Path))
def run(config: Path):
    """Run the full pipeline described by CONFIG."""
    cfg, gateway = load_run_config(config)
    summary = run_pipeline(cfg, gateway)
    click.echo(f"evaluated {sum(c.attempts for c in summary.cells)} candidates")
    for cell in summary.cells:
        click.echo(
            f"{cell.prompt_id} {cell.generator}: C={cell.c_rate:.2f} T={cell.t_rate:.2f}"
        )


@main.command()
@click.argument("dataset_root", type=click.Path(exists=True, path_type=Path))
@click.option("--workdir", type=click.Path(path_type=Path), default=Path("sanity-work"))
def sanity(dataset_root: Path, workdir: Path):
    """Self-graft every sample's ground-truth fix and build it."""
    try:
        samples = load_dataset(dataset_root)
    except DatasetValidationError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    failures = 0
    for sample in samples:
        verdict = sanity_gate(sample, workdir / sample.id)
        ok = verdict in ("plausible", "compilable_untested")
        failures += 0 if ok else 1
        click.echo(f"{sample.id}: {verdict}")
    sys.exit(1 if failures else 0)


@main.command()
@click.argument("config", type=click.Path(exists=True, path_type=Path))
@click.argument("results", type=click.Path(exists=True, path_type=Path))
def score(config: Path, results: Path):
    """Re-run build/test scoring over previously generated candidates."""
    cfg, _ = load_run_config(config)
    records = rescore(cfg, results)
    plausible = sum(1 for r in records if r.status == "plausible")
    click.echo(f"rescored {len(records)} records; {plausible} plausible")


@main.command()
@click.argument("config", type=click.Path(exists=True, path_type=Path))
@click.argument("results", type=click.Path(exists=True, path_type=Path))
def stats(config: Path, results: Path):
    """Run the configured claims over an existing results file."""
    cfg, _ = load_run_config(config)
    records = read_results(results)
    summary = summarize(records, {})
    reports = emit_report(
        summary, records, list(cfg.claims), cfg.output_dir,
        bootstrap_resamples=cfg.bootstrap_resamples, seed=cfg.seed,
    )
    click.echo(f"wrote {len(reports)} claim reports to {cfg.output_dir}")


@main.command()
@click.argument("config", type=click.Path(exists=True, path_type=Path))
@click.argument("real_sample_id")
@click.argument("exemplar_id")
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--max-fix-rounds", default=3)
def synth(config: Path, real_sample_id: str, exemplar_id: str, out: Path, max_fix_rounds: int):
    """Generate a DRAFT synthetic sample from a real one."""
    cfg, gateway = load_run_config(config)
    by_id = {s.id: s for s in load_dataset(cfg.dataset_root)}
    draft = generate_synthetic_sample(
        gateway, by_id[real_sample_id], by_id[exemplar_id],
        cfg.generators[0], out, max_fix_rounds,
    )
    click.echo(json.dumps(draft, indent=2))


@main.command("export-review")
@click.argument("config", type=click.Path(exists=True, path_type=Path))
@click.argument("results", type=click.Path(exists=True, path_type=Path))
@click.option("--out", type=click.Path(path_type=Path), required=True)
def export_review_cmd(config: Path, results: Path, out: Path):
    """Export blinded candidates for human annotation."""
    cfg, _ = load_run_config(config)
    samples = load_dataset(cfg.dataset_root)
    records = read_results(results)
    payload = export_review(samples, records, cfg.output_dir / "candidates", out)
    click.echo(f"exported {len(payload['items'])} items to {out}")


@main.command("import-labels")
@click.argument("results", type=click.Path(exists=True, path_type=Path))
@click.argument("labels", type=click.Path(exists=True, path_type=Path))
def import_labels_cmd(results: Path, labels: Path):
    """Merge annotator labels into a results file."""
    records = import_labels(read_results(results), labels)
    write_results(records, results)
    labeled = sum(1 for r in records if r.human_label)
    click.echo(f"{labeled}/{len(records)} records labeled")


@main.command()
@click.argument("config", type=click.Path(exists=True, path_type=Path))
@click.argument("results", type=click.Path(exists=True, path_type=Path))
def report(config: Path, results: Path):
    """Rebuild summary tables from an existing results file."""
    cfg, _ = load_run_config(config)
    records = read_results(results)
    summary = summarize(records, {})
    emit_report(summary, records, list(cfg.claims), cfg.output_dir,
                bootstrap_resamples=cfg.bootstrap_resamples, seed=cfg.seed)
    click.echo(f"report written to {cfg.output_dir}")


if __name__ == "__main__":
    main()
