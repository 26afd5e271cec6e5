"""Command-line entry points orchestrating the full chain.

Every command is re-runnable: given identical inputs and seeds it writes
byte-identical artifacts, and each artifact directory carries a manifest
recording the sha256 of its inputs and outputs, so runs chain into a
verifiable DAG.  No artifact embeds a timestamp.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import replace
from pathlib import Path

import click

from . import active as active_mod
from . import distill as distill_mod
from . import evaluation, reports, synth
from .config import RunConfig, load_config
from .corpus import import_ntriples, read_jsonl, write_jsonl
from .gateway import Prediction, make_extractor, extract_many
from .sampling import (
    InsufficientExamplesError,
    kfold,
    read_dataset,
    sample,
    stats,
    write_dataset,
)
from .shapes import load_shape


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_json(path: Path, payload) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    return path


def _write_manifest(directory: Path, name: str, command: str,
                    inputs: dict, params: dict, outputs: dict) -> Path:
    manifest = {
        "command": command,
        "params": params,
        "inputs": {
            label: {"file": Path(p).name, "sha256": _sha256(Path(p))}
            for label, p in sorted(inputs.items())
        },
        "outputs": {
            label: {"file": Path(p).name, "sha256": _sha256(Path(p))}
            for label, p in sorted(outputs.items())
        },
    }
    return _write_json(directory / f"{name}.manifest.json", manifest)


def _load(config_path, **overrides) -> RunConfig:
    try:
        return load_config(config_path, overrides)
    except (OSError, ValueError) as err:
        raise click.ClickException(str(err))


config_option = click.option(
    "--config", "-c", "config_path", type=click.Path(exists=True), default=None,
    help="TOML or JSON run configuration.",
)


def _read_dataset(config: RunConfig, name: str):
    try:
        return read_dataset(Path(config.out) / "datasets", name)
    except FileNotFoundError:
        raise click.ClickException(
            f"dataset {name!r} not found under {config.out}/datasets "
            "(run `shaperex sample` first)"
        )


@click.group()
def main():
    """Shape-focused distillation, extraction and evaluation toolkit."""


@main.command("synth")
@click.option("--n", type=int, required=True, help="Number of examples.")
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--noisy", is_flag=True, help="Apply the standard noise profile.")
def cmd_synth(n, seed, out, noisy):
    """Generate a synthetic dual corpus as JSONL."""
    knobs = synth.FIXTURE_PROFILE if noisy else {}
    examples = synth.generate(synth.SynthConfig(n=n, seed=seed, **knobs))
    count = write_jsonl(out, examples)
    click.echo(f"wrote {count} examples to {out}")


@main.command("distill")
@config_option
@click.option("--input", "input_path", type=click.Path(exists=True), default=None,
              help="Raw corpus as JSONL (one entity per record).")
@click.option("--input-nt", "nt_path", type=click.Path(exists=True), default=None,
              help="Raw triples as N-Triples; needs --abstracts.")
@click.option("--abstracts", "abstracts_path", type=click.Path(exists=True),
              default=None, help="JSONL of {entity, abstract} records.")
@click.option("--store", "store_dir", type=click.Path(), default=None)
def cmd_distill(config_path, input_path, nt_path, abstracts_path, store_dir):
    """Distill a raw corpus into the partitioned store."""
    config = _load(config_path, input=input_path, store=store_dir)
    shape = load_shape(config.shape)
    rules = (
        distill_mod.load_rules(config.rules)
        if config.rules
        else distill_mod.default_rules()
    )
    if nt_path:
        if not abstracts_path:
            raise click.ClickException("--input-nt needs --abstracts")
        source = import_ntriples(nt_path, abstracts_path)
        source_path = nt_path
    elif config.input:
        source = read_jsonl(config.input)
        source_path = config.input
    else:
        raise click.ClickException("no input corpus configured")
    store = Path(config.store)
    report = distill_mod.distill(source, shape, rules, store_dir=store)
    table = store / "distill_report.txt"
    table.parent.mkdir(parents=True, exist_ok=True)
    table.write_text(reports.distill_table(report.to_dict()), encoding="utf-8")
    _write_manifest(
        store, "distill", "distill",
        inputs={"corpus": source_path},
        params={
            "shape": shape.name,
            "rules": [f"{r.source}->{r.target}" for r in rules],
        },
        outputs={
            "initialKB": store / "initialKB" / "examples.jsonl",
            "inferences": store / "inferences" / "examples.jsonl",
            "foundInAbstract": store / "foundInAbstract" / "examples.jsonl",
            "report": store / "distill_report.json",
        },
    )
    click.echo(reports.distill_table(report.to_dict()))


@main.command("sample")
@config_option
@click.option("--store", "store_dir", type=click.Path(), default=None)
@click.option("--name", default=None, help="Ad-hoc dataset name.")
@click.option("--n", "size", type=int, default=None)
@click.option("--constraint", type=click.Choice(["any-pattern", "s*-valid-only"]),
              default=None)
@click.option("--seed", type=int, default=None)
def cmd_sample(config_path, store_dir, name, size, constraint, seed):
    """Draw disjoint datasets from the distilled store and assign folds."""
    config = _load(config_path, store=store_dir)
    shape = load_shape(config.shape)
    pool = list(distill_mod.store_examples(config.store))
    plans = list(config.samples)
    if name is not None:
        if size is None:
            raise click.ClickException("--name needs --n")
        plans = [{"name": name, "n": size,
                  "constraint": constraint or "any-pattern",
                  "seed": seed if seed is not None else config.seed,
                  "margin": 0}]
    if not plans:
        raise click.ClickException("no sample plans configured")

    out_dir = Path(config.out) / "datasets"
    taken: set[str] = set()
    all_stats = []
    outputs = {}
    for index, plan in enumerate(plans):
        try:
            draw = sample(
                pool,
                n=plan["n"] + plan.get("margin", config.margin),
                seed=plan.get("seed", config.seed + index),
                shape=shape,
                constraint=plan.get("constraint", "any-pattern"),
                exclude=taken,
                name=plan["name"],
            )
        except InsufficientExamplesError as err:
            raise click.ClickException(f"sampling {plan['name']}: {err}")
        if config.folds <= len(draw):
            draw = kfold(draw, config.folds)
        taken |= set(draw.entities())
        write_dataset(draw, out_dir)
        all_stats.append(stats(draw, shape).to_dict())
        outputs[draw.name] = out_dir / f"{draw.name}.jsonl"
        outputs[f"{draw.name}.manifest"] = out_dir / f"{draw.name}.manifest.json"
        click.echo(f"sampled {draw.name}: {len(draw)} examples")

    stats_path = _write_json(out_dir / "stats.json", all_stats)
    (out_dir / "stats.txt").write_text(reports.stats_table(all_stats), "utf-8")
    outputs["stats"] = stats_path
    _write_manifest(
        out_dir, "sample", "sample",
        inputs={"store": Path(config.store) / "foundInAbstract" / "examples.jsonl"},
        params={"folds": config.folds, "plans": plans,
                "default_seed": config.seed, "default_margin": config.margin},
        outputs=outputs,
    )
    click.echo(reports.stats_table(all_stats))


@main.command("extract")
@config_option
@click.option("--dataset", "dataset_name", required=True)
@click.option("--mode", type=click.Choice(["heuristic", "remote"]), default=None)
@click.option("--endpoint", default=None)
def cmd_extract(config_path, dataset_name, mode, endpoint):
    """Run the extractor over a dataset and store raw predictions."""
    config = _load(config_path, extractor=mode, endpoint=endpoint)
    shape = load_shape(config.shape)
    dataset = _read_dataset(config, dataset_name)
    extractor = make_extractor(
        config.extractor,
        endpoint=config.endpoint,
        timeout=config.timeout_s,
        predicate_order=shape.property_names,
    )
    parallel = config.parallel if config.extractor == "remote" else 1
    predictions = extract_many(dataset.examples, extractor, parallel=parallel)
    out_dir = Path(config.out) / "extract"
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{dataset_name}.predictions.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for prediction in predictions:
            fh.write(json.dumps(prediction.to_record(), ensure_ascii=False,
                                sort_keys=True) + "\n")
    parsed = sum(p.parse_ok for p in predictions)
    _write_manifest(
        out_dir, f"{dataset_name}.extract", "extract",
        inputs={"dataset": Path(config.out) / "datasets" / f"{dataset_name}.jsonl"},
        params={"mode": config.extractor, "dataset": dataset_name,
                "parallel": parallel},
        outputs={"predictions": path},
    )
    click.echo(f"extracted {len(predictions)} predictions ({parsed} parsed) to {path}")


@main.command("evaluate")
@config_option
@click.option("--dataset", "dataset_name", required=True)
@click.option("--predictions", "predictions_path", type=click.Path(exists=True),
              default=None)
@click.option("--mean-loss", type=float, default=None,
              help="Externally computed mean model loss, reported as-is.")
def cmd_evaluate(config_path, dataset_name, predictions_path, mean_loss):
    """Score predictions against a dataset and dump per-pair diffs."""
    config = _load(config_path)
    shape = load_shape(config.shape)
    dataset = _read_dataset(config, dataset_name)
    if predictions_path is None:
        predictions_path = (
            Path(config.out) / "extract" / f"{dataset_name}.predictions.jsonl"
        )
    if not Path(predictions_path).exists():
        raise click.ClickException(
            f"no predictions at {predictions_path} (run `shaperex extract` first)"
        )
    predictions = []
    with open(predictions_path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                predictions.append(Prediction.from_record(json.loads(line)))

    pairs = evaluation.pair_up(dataset, predictions)
    overall, per_fold, fold_mean = evaluation.evaluate_folds(pairs, shape)
    if mean_loss is not None:
        overall = replace(overall, mean_loss=mean_loss)
    payload = {
        "dataset": dataset_name,
        "overall": overall.to_dict(),
        "per_fold": {str(f): r.to_dict() for f, r in per_fold.items()},
        "fold_mean": fold_mean.to_dict() if fold_mean else None,
    }
    out_dir = Path(config.out) / "eval"
    eval_path = _write_json(out_dir / f"{dataset_name}.eval.json", payload)
    diffs_path = out_dir / f"{dataset_name}.diffs.jsonl"
    with open(diffs_path, "w", encoding="utf-8") as fh:
        for record in evaluation.diff_records(pairs):
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    named = {"overall": overall.to_dict()}
    if fold_mean:
        named["fold_mean"] = fold_mean.to_dict()
    table_path = out_dir / f"{dataset_name}.eval.txt"
    table_path.write_text(
        reports.eval_table(named) + "\n" + reports.mismatch_table(named), "utf-8"
    )
    _write_manifest(
        out_dir, f"{dataset_name}.eval", "evaluate",
        inputs={
            "dataset": Path(config.out) / "datasets" / f"{dataset_name}.jsonl",
            "predictions": predictions_path,
        },
        params={"dataset": dataset_name, "shape": shape.name},
        outputs={"report": eval_path, "diffs": diffs_path, "tables": table_path},
    )
    click.echo(reports.eval_table(named))


def _build_store(config: RunConfig, dataset_name: str, model: str,
                 diffs_path=None) -> active_mod.ReviewStore:
    dataset = _read_dataset(config, dataset_name)
    if diffs_path is None:
        diffs_path = Path(config.out) / "eval" / f"{dataset_name}.diffs.jsonl"
    if not Path(diffs_path).exists():
        raise click.ClickException(
            f"no diffs at {diffs_path} (run `shaperex evaluate` first)"
        )
    records = []
    with open(diffs_path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))
    items = active_mod.collect(records, dataset, model)
    log = Path(config.out) / "annotation" / f"{dataset_name}.{model}.judgements.jsonl"
    return active_mod.ReviewStore(items, dataset, model, log_path=log)


@main.command("annotate-serve")
@config_option
@click.option("--dataset", "dataset_name", required=True)
@click.option("--model", default="extractor")
@click.option("--diffs", "diffs_path", type=click.Path(exists=True), default=None)
@click.option("--ui", "ui_dir", type=click.Path(), default=None,
              help="Directory with the built web UI (optional).")
def cmd_annotate_serve(config_path, dataset_name, model, diffs_path, ui_dir):
    """Serve the review API (and UI when built) for human annotation."""
    import uvicorn

    from .service import create_app

    config = _load(config_path)
    store = _build_store(config, dataset_name, model, diffs_path)
    app = create_app(store, out_dir=Path(config.out) / "gold", static_dir=ui_dir)
    click.echo(f"serving review queue on http://{config.host}:{config.port}")
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")


@main.command("gold")
@config_option
@click.option("--dataset", "dataset_name", required=True)
@click.option("--model", default="extractor")
@click.option("--diffs", "diffs_path", type=click.Path(exists=True), default=None)
def cmd_gold(config_path, dataset_name, model, diffs_path):
    """Apply recorded judgements and materialize the gold dataset."""
    config = _load(config_path)
    store = _build_store(config, dataset_name, model, diffs_path)
    try:
        store.ensure_complete()
    except active_mod.PendingItemsError as err:
        raise click.ClickException(str(err))
    judged = store.judged_items()
    gold, correction = active_mod.correct(store.dataset, judged)
    metrics = active_mod.annotation_metrics(judged, store.dataset)
    out_dir = Path(config.out) / "gold"
    write_dataset(gold, out_dir)
    _write_json(out_dir / f"{gold.name}.correction.json", correction.to_dict())
    metrics_path = _write_json(out_dir / f"{gold.name}.metrics.json", metrics.to_dict())
    (out_dir / f"{gold.name}.metrics.txt").write_text(
        reports.annotation_table(metrics.to_dict()), "utf-8"
    )
    _write_manifest(
        out_dir, f"{gold.name}.gold", "gold",
        inputs={
            "dataset": Path(config.out) / "datasets" / f"{dataset_name}.jsonl",
            "judgements": store.log_path,
        },
        params={"dataset": dataset_name, "model": model},
        outputs={
            "gold": out_dir / f"{gold.name}.jsonl",
            "correction": out_dir / f"{gold.name}.correction.json",
            "metrics": metrics_path,
        },
    )
    click.echo(reports.annotation_table(metrics.to_dict()))


@main.command("report")
@click.option("--from", "from_dir", type=click.Path(exists=True), required=True)
@click.option("--store", "store_dir", type=click.Path(exists=True), default=None)
def cmd_report(from_dir, store_dir):
    """Render text tables from the JSON artifacts under a run directory."""
    from_dir = Path(from_dir)
    sections = []
    report_path = (Path(store_dir) if store_dir else from_dir) / "distill_report.json"
    if not report_path.exists():
        report_path = from_dir / "store" / "distill_report.json"
    if report_path.exists():
        payload = json.loads(report_path.read_text("utf-8"))
        sections.append("distillation\n" + reports.distill_table(payload))
    stats_path = from_dir / "datasets" / "stats.json"
    if stats_path.exists():
        payload = json.loads(stats_path.read_text("utf-8"))
        sections.append("datasets\n" + reports.stats_table(payload))
    for eval_path in sorted((from_dir / "eval").glob("*.eval.json")):
        payload = json.loads(eval_path.read_text("utf-8"))
        named = {"overall": payload["overall"]}
        if payload.get("fold_mean"):
            named["fold_mean"] = payload["fold_mean"]
        sections.append(
            f"evaluation: {payload['dataset']}\n"
            + reports.eval_table(named)
            + "\n"
            + reports.mismatch_table(named)
        )
    for metrics_path in sorted((from_dir / "gold").glob("*.metrics.json")):
        payload = json.loads(metrics_path.read_text("utf-8"))
        sections.append(
            f"annotation: {metrics_path.name.removesuffix('.metrics.json')}\n"
            + reports.annotation_table(payload)
        )
    if not sections:
        raise click.ClickException(f"no artifacts found under {from_dir}")
    click.echo("\n".join(sections))


if __name__ == "__main__":
    main()
