from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

import pytest

from credscore.reputation import ReputationClient, StaticReputationProvider
from credscore.tweets import FixtureTweetSource, load_fixture

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"

# all fixture tweets predate this instant; pinning it makes age features frozen
FROZEN_NOW = datetime(2014, 5, 1, 0, 0, 0, tzinfo=timezone.utc)

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture(scope="session")
def frozen_now() -> datetime:
    return FROZEN_NOW


@pytest.fixture(scope="session")
def fixture_tweets():
    report = load_fixture(FIXTURES_DIR / "tweets.jsonl", now=FROZEN_NOW)
    assert report.skipped == 0
    return report.records


@pytest.fixture(scope="session")
def fixture_source(fixture_tweets) -> FixtureTweetSource:
    return FixtureTweetSource(fixture_tweets)


@pytest.fixture(scope="session")
def reputation_lookup():
    provider = StaticReputationProvider.from_file(FIXTURES_DIR / "reputation.json")
    return ReputationClient(provider).lookup


@pytest.fixture(scope="session")
def trained_artifact(fixture_tweets, reputation_lookup):
    """A small real artifact trained on the bundled fixture annotations."""
    from credscore.labeling import build_training_set, load_annotations
    from credscore.ranking import SvmRankOptions, groups_from_examples, train_svmrank
    from credscore.ranking.model import QueryGroup
    from credscore.scaling import fit_scaler, scale_array
    from credscore.scoring import ModelArtifact, fit_bins

    votes = load_annotations(FIXTURES_DIR / "annotations.jsonl")
    tweets = {t.id: t for t in fixture_tweets}
    grouped, _ = build_training_set(votes, tweets, reputation_lookup, FROZEN_NOW)
    examples = [ex for group in grouped.values() for ex in group]
    scaler = fit_scaler([ex.features for ex in examples])
    groups = [
        QueryGroup(
            event_id=g.event_id,
            features=scale_array(g.features, scaler),
            grades=g.grades,
            schema_version=g.schema_version,
        )
        for g in groups_from_examples(examples)
    ]
    model = train_svmrank(groups, c=10.0, opts=SvmRankOptions(seed=0))
    raws = [float(s) for g in groups for s in g.features @ model.weights]
    return ModelArtifact(
        model=model,
        scaler=scaler,
        bins=fit_bins(raws),
        schema_version=examples[0].features.schema_version,
    )
