"""Operator entry points: build-training, train, evaluate, serve, bench, report.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
All randomness hangs off --seed; timestamps can be pinned with --clock so
identical inputs plus a seed produce byte-identical outputs.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import bench as bench_mod
from .clock import ManualClock, parse_timestamp, utcnow
from .errors import CredScoreError, EmptyFeedback, EmptySubset
from .labeling import (
    build_training_set,
    grade_histogram,
    load_annotations,
    read_training_file,
    write_training_file,
)
from .lexicons import load_lexicons
from .ranking import (
    CoordinateAscentOptions,
    SvmRankOptions,
    comparison_table,
    cross_validate,
    groups_from_examples,
    train_coordinate_ascent,
    train_svmrank,
)
from .ranking.model import QueryGroup
from .reputation import ReputationClient, StaticReputationProvider
from .scaling import fit_scaler, scale_array
from .scoring import ModelArtifact, fit_bins, load_model, save_model
from .service.analytics import feedback_summary, score_distribution
from .service.app import create_app
from .service.stores import StoreSet
from .tweets import DelayedTweetSource, FixtureTweetSource, load_fixture

TRAINER_NAMES = ("svmrank", "coordinate_ascent")


def _clock_from_flag(clock_flag: str | None):
    if clock_flag is None:
        return None
    try:
        return ManualClock(start=parse_timestamp(clock_flag))
    except ValueError as exc:
        raise click.UsageError(f"bad --clock value {clock_flag!r}: {exc}") from exc


def _reputation_from_flag(path: str | None) -> ReputationClient:
    provider = StaticReputationProvider.from_file(path) if path else None
    return ReputationClient(provider)


@click.group()
def main():
    """Credibility scoring: training, evaluation, serving, and reporting."""


@main.command("build-training")
@click.option("--annotations", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--fixtures", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--lexicons", "lexicons_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--reputation", "reputation_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--clock", "clock_flag", default=None, help="Pin 'now' to an ISO-8601 instant.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False))
def cmd_build_training(annotations, fixtures, out, lexicons_dir, reputation_path, clock_flag, report_path):
    """Aggregate annotation votes into a graded training-set file."""
    clock = _clock_from_flag(clock_flag)
    now = clock.now() if clock else utcnow()
    if lexicons_dir:
        # rebuild the default extractor with the override directory
        from . import features as features_mod

        features_mod._DEFAULT_EXTRACTOR = features_mod.FeatureExtractor(
            lexicons=load_lexicons(lexicons_dir)
        )
    try:
        votes = load_annotations(annotations)
        fixture = load_fixture(fixtures, now=now)
        tweets = {t.id: t for t in fixture.records}
        grouped, exclusions = build_training_set(
            votes, tweets, _reputation_from_flag(reputation_path).lookup, now
        )
    except (CredScoreError, ValueError, OSError) as exc:
        raise click.ClickException(str(exc)) from exc
    examples = [ex for group in grouped.values() for ex in group]
    write_training_file(out, examples)
    hist = grade_histogram(examples)
    click.echo(f"wrote {len(examples)} examples across {len(grouped)} events to {out}")
    click.echo("grade histogram: " + "  ".join(f"{g}:{hist[g]}" for g in sorted(hist)))
    if exclusions.total:
        click.echo(f"excluded {exclusions.total}: " + json.dumps(exclusions.counts, sort_keys=True))
    if report_path:
        Path(report_path).write_text(
            json.dumps(
                {
                    "kept": len(examples),
                    "events": sorted(grouped),
                    "grade_histogram": {str(g): hist[g] for g in sorted(hist)},
                    "excluded": exclusions.counts,
                },
                indent=2,
                sort_keys=True,
            )
            + "\n",
            encoding="utf-8",
        )


def _scaled_groups(examples, scaler) -> list[QueryGroup]:
    groups = groups_from_examples(examples)
    return [
        QueryGroup(
            event_id=g.event_id,
            features=scale_array(g.features, scaler),
            grades=g.grades,
            schema_version=g.schema_version,
        )
        for g in groups
    ]


def _make_trainer(name: str, c: float, seed: int, restarts: int, cutoff: int):
    if name == "svmrank":
        return lambda groups: train_svmrank(groups, c=c, opts=SvmRankOptions(seed=seed))
    return lambda groups: train_coordinate_ascent(
        groups,
        opts=CoordinateAscentOptions(n_restarts=restarts, seed=seed, target_cutoff=cutoff),
    )


@main.command("train")
@click.option("--training", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--trainer", type=click.Choice(TRAINER_NAMES), default="svmrank")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--c", "c_value", default=1.0, show_default=True, help="svmrank regularization.")
@click.option("--seed", default=0, show_default=True)
@click.option("--restarts", default=5, show_default=True, help="coordinate_ascent restarts.")
@click.option("--cutoff", default=50, show_default=True, help="coordinate_ascent NDCG cutoff.")
@click.option("--clock", "clock_flag", default=None, help="Pin timing metadata for reproducible bytes.")
def cmd_train(training, trainer, out, c_value, seed, restarts, cutoff, clock_flag):
    """Train a model, fit the scaler and display bins, save the artifact."""
    clock = _clock_from_flag(clock_flag)
    try:
        examples = read_training_file(training)
        if not examples:
            raise click.ClickException(f"{training} holds no examples")
        scaler = fit_scaler([ex.features for ex in examples])
        groups = _scaled_groups(examples, scaler)
        model = _make_trainer(trainer, c_value, seed, restarts, cutoff)(groups)
        if clock is not None:
            # pinned clock: keep artifact bytes reproducible run to run
            model.metadata["wall_time_s"] = 0.0
        raws = [float(s) for g in groups for s in g.features @ model.weights]
        artifact = ModelArtifact(
            model=model,
            scaler=scaler,
            bins=fit_bins(raws),
            schema_version=examples[0].features.schema_version,
        )
        save_model(artifact, out)
    except (CredScoreError, ValueError, OSError) as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"trained {trainer} on {len(examples)} examples, artifact at {out}")


@main.command("evaluate")
@click.option("--training", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--trainer",
    "trainers",
    type=click.Choice(TRAINER_NAMES),
    multiple=True,
    default=TRAINER_NAMES,
    show_default=True,
)
@click.option("--k", default=4, show_default=True)
@click.option("--c", "c_value", default=1.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--restarts", default=5, show_default=True)
@click.option("--cutoff", default=50, show_default=True)
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option("--clock", "clock_flag", default=None, help="Zero wall times for reproducible bytes.")
def cmd_evaluate(training, trainers, k, c_value, seed, restarts, cutoff, out_dir, clock_flag):
    """k-fold cross-validation; emits per-trainer reports and a comparison table."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pinned = _clock_from_flag(clock_flag) is not None
    try:
        examples = read_training_file(training)
        if not examples:
            raise click.ClickException(f"{training} holds no examples")
        # one global min-max scale; folds stay identical across trainers via the seed
        scaler = fit_scaler([ex.features for ex in examples])
        groups = _scaled_groups(examples, scaler)
        reports = []
        for name in trainers:
            report = cross_validate(
                groups,
                k=k,
                trainer=_make_trainer(name, c_value, seed, restarts, cutoff),
                seed=seed,
                trainer_tag=name,
            )
            if pinned:
                for fold in report.folds:
                    fold.train_time_s = 0.0
                    fold.test_time_s = 0.0
            (out / f"cv_{name}.json").write_text(report.to_json() + "\n", encoding="utf-8")
            reports.append(report)
    except (CredScoreError, ValueError, OSError) as exc:
        raise click.ClickException(str(exc)) from exc
    table = comparison_table(reports)
    (out / "cv_comparison.txt").write_text(table + "\n", encoding="utf-8")
    if any(r.fold_unit == "within_group" for r in reports):
        click.echo("note: fewer groups than folds; used stratified within-group splits")
    click.echo(table)


@main.command("serve")
@click.option("--model", required=True, type=click.Path(exists=True, dir_okay=False), envvar="CREDSCORE_MODEL")
@click.option("--fixtures", required=True, type=click.Path(exists=True, dir_okay=False), envvar="CREDSCORE_FIXTURES")
@click.option("--addr", default="127.0.0.1:8040", show_default=True, envvar="CREDSCORE_ADDR")
@click.option("--ttl", default=900.0, show_default=True, envvar="CREDSCORE_TTL")
@click.option("--batch-limit", default=100, show_default=True, envvar="CREDSCORE_BATCH_LIMIT")
@click.option("--stores", "stores_dir", default="stores", show_default=True, envvar="CREDSCORE_STORES")
@click.option("--reputation", "reputation_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--static", "static_dir", type=click.Path(exists=True, file_okay=False), help="Serve a built UI from this directory.")
@click.option("--source-delay-ms", default=0.0, show_default=True, help="Artificial upstream delay (benchmarking aid).")
def cmd_serve(model, fixtures, addr, ttl, batch_limit, stores_dir, reputation_path, static_dir, source_delay_ms):
    """Run the scoring service against a fixture-backed source."""
    import uvicorn

    try:
        artifact = load_model(model)
        source = FixtureTweetSource.from_file(fixtures)
    except (CredScoreError, OSError) as exc:
        # unreadable model/fixture is a configuration problem
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if source_delay_ms > 0:
        source = DelayedTweetSource(source, delay_s=source_delay_ms / 1000.0)
    host, _, port = addr.partition(":")
    if not port:
        raise click.UsageError(f"--addr must be host:port, got {addr!r}")
    app = create_app(
        artifact,
        source,
        StoreSet(stores_dir),
        reputation=_reputation_from_flag(reputation_path).lookup,
        ttl_seconds=ttl,
        batch_limit=batch_limit,
        static_dir=static_dir,
    )
    uvicorn.run(app, host=host, port=int(port), log_level="warning")


@main.command("bench")
@click.option("--url", required=True, help="Base URL of a running service.")
@click.option("--requests", "n_requests", required=True, type=int)
@click.option("--concurrency", default=10, show_default=True, type=int)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def cmd_bench(url, n_requests, concurrency, out):
    """Measure client-observed score latency and write a CDF report."""
    if n_requests < 1:
        raise click.UsageError("--requests must be >= 1")
    if concurrency < 1:
        raise click.UsageError("--concurrency must be >= 1")
    try:
        report = bench_mod.run_bench(url, requests=n_requests, concurrency=concurrency)
    except Exception as exc:
        raise click.ClickException(str(exc)) from exc
    bench_mod.write_report(report, out)
    click.echo(report.to_text())


@main.command("report")
@click.option("--stores", "stores_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--kind", type=click.Choice(("feedback", "distribution")), required=True)
@click.option("--keywords", default="", help="Comma-separated keywords (distribution only).")
@click.option("--sample-size", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
def cmd_report(stores_dir, kind, keywords, sample_size, seed, out_dir):
    """Summarize the feedback store or compare score distributions."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stores = StoreSet(stores_dir)
    if kind == "feedback":
        try:
            summary = feedback_summary(stores.feedback.entries(), seed=seed)
        except EmptyFeedback as exc:
            raise click.ClickException(str(exc)) from exc
        (out / "feedback.json").write_text(
            json.dumps(summary.to_dict(), indent=2) + "\n", encoding="utf-8"
        )
        lines = [
            f"n = {summary.n}",
            f"agreed      {summary.pct_agreed.value:6.2f}%  "
            f"({summary.pct_agreed.ci_low:.2f}, {summary.pct_agreed.ci_high:.2f})",
            f"disagreed   {summary.pct_disagreed.value:6.2f}%  "
            f"({summary.pct_disagreed.ci_low:.2f}, {summary.pct_disagreed.ci_high:.2f})",
            f"  higher    {summary.pct_should_be_higher.value:6.2f}%",
            f"  lower     {summary.pct_should_be_lower.value:6.2f}%",
        ]
        for m, p in summary.magnitude_histogram.items():
            lines.append(f"  off by {m}  {p.value:6.2f}%  ({p.ci_low:.2f}, {p.ci_high:.2f})")
        (out / "feedback.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
        click.echo("\n".join(lines))
    else:
        kws = [k.strip() for k in keywords.split(",") if k.strip()]
        if not kws:
            raise click.UsageError("--keywords is required for the distribution report")
        try:
            dist = score_distribution(
                kws, stores.scored_tweets(), background_sample_size=sample_size, seed=seed
            )
        except (EmptySubset, CredScoreError) as exc:
            raise click.ClickException(str(exc)) from exc
        (out / "distribution.json").write_text(
            json.dumps(dist.to_dict(), indent=2) + "\n", encoding="utf-8"
        )
        click.echo(
            f"subset n={dist.subset_n} background n={dist.background_n} "
            f"(keywords: {', '.join(kws)})"
        )


if __name__ == "__main__":
    main()
