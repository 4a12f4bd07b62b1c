"""Aggregation of crowdworker annotations into per-message training grades.

Each message gets three relatedness votes (R1 informative, R2 related but
not informative, R3 unrelated, R4 skip). Messages resolved to R1 get three
further credibility votes (C1 definitely credible, C2 seems credible, C3
definitely incredible, C4 skip). The majority label wins; three-way ties
and skip majorities exclude the message from training.

Grades: (R1,C1) -> 5, (R1,C2) -> 4, (R1,C3) -> 3, (R2) -> 2, (R3) -> 1.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Mapping

from .errors import MissingCredibilityLabel, SkipLabel, WrongArity
from .features import FeatureVector, ReputationLookup, extract_features
from .tweets import TweetRecord


class RelatednessLabel(Enum):
    R1 = "R1"  # informative
    R2 = "R2"  # related, not informative
    R3 = "R3"  # unrelated
    R4 = "R4"  # skip


class CredibilityLabel(Enum):
    C1 = "C1"  # definitely credible
    C2 = "C2"  # seems credible
    C3 = "C3"  # definitely incredible
    C4 = "C4"  # skip


GRADE_TABLE = {
    (RelatednessLabel.R1, CredibilityLabel.C1): 5,
    (RelatednessLabel.R1, CredibilityLabel.C2): 4,
    (RelatednessLabel.R1, CredibilityLabel.C3): 3,
}

VOTES_PER_STEP = 3


@dataclass(frozen=True)
class LabeledExample:
    tweet_id: str
    event_id: str
    grade: int
    features: FeatureVector

    def __post_init__(self):
        if self.grade not in (1, 2, 3, 4, 5):
            raise ValueError(f"grade must be in 1..5, got {self.grade}")


def majority_vote(votes):
    """Return the label chosen by at least 2 of exactly 3 voters, else None.

    None means the three votes all differ (a tie); ties exclude the message
    rather than guessing.
    """
    votes = list(votes)
    if len(votes) != VOTES_PER_STEP:
        raise WrongArity(f"expected {VOTES_PER_STEP} votes, got {len(votes)}")
    kinds = {type(v) for v in votes}
    if len(kinds) != 1:
        raise WrongArity(f"votes mix label kinds: {sorted(k.__name__ for k in kinds)}")
    label, count = Counter(votes).most_common(1)[0]
    return label if count >= 2 else None


def map_to_grade(r: RelatednessLabel, c: CredibilityLabel | None = None) -> int:
    """Map resolved labels to the 1..5 training grade."""
    if r is RelatednessLabel.R4:
        raise SkipLabel("relatedness vote resolved to skip")
    if r is RelatednessLabel.R2:
        return 2
    if r is RelatednessLabel.R3:
        return 1
    # r is R1: the credibility step is required
    if c is None:
        raise MissingCredibilityLabel("informative message lacks a credibility label")
    if c is CredibilityLabel.C4:
        raise SkipLabel("credibility vote resolved to skip")
    return GRADE_TABLE[(r, c)]


@dataclass(frozen=True)
class AnnotationVote:
    tweet_id: str
    event_id: str
    step: int  # 1 = relatedness, 2 = credibility
    annotator_id: str
    label: str


def parse_annotation_line(raw: dict) -> AnnotationVote:
    step = raw["step"]
    if step not in (1, 2):
        raise ValueError(f"step must be 1 or 2, got {step!r}")
    return AnnotationVote(
        tweet_id=str(raw["tweet_id"]),
        event_id=str(raw.get("event_id", "default")),
        step=step,
        annotator_id=str(raw["annotator_id"]),
        label=str(raw["label"]),
    )


def load_annotations(path: Path | str) -> list[AnnotationVote]:
    votes = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                votes.append(parse_annotation_line(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad annotation record: {exc}") from exc
    return votes


@dataclass
class ExclusionReport:
    """Per-reason counts of messages dropped during aggregation."""

    counts: dict[str, int] = field(default_factory=dict)

    def add(self, reason: str) -> None:
        self.counts[reason] = self.counts.get(reason, 0) + 1

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def _resolve_labels(
    step1: list[AnnotationVote],
    step2: list[AnnotationVote],
    report: ExclusionReport,
) -> int | None:
    """Resolve one message's votes to a grade, or record why it was excluded."""
    try:
        r_votes = [RelatednessLabel(v.label) for v in step1]
    except ValueError:
        report.add("bad_relatedness_label")
        return None
    try:
        r = majority_vote(r_votes)
    except WrongArity:
        report.add("wrong_vote_count")
        return None
    if r is None:
        report.add("unresolved_relatedness")
        return None
    if r is RelatednessLabel.R4:
        report.add("skip_relatedness")
        return None
    if r is not RelatednessLabel.R1:
        return map_to_grade(r)

    # informative: need the second annotation step
    if not step2:
        report.add("missing_credibility_votes")
        return None
    try:
        c_votes = [CredibilityLabel(v.label) for v in step2]
    except ValueError:
        report.add("bad_credibility_label")
        return None
    try:
        c = majority_vote(c_votes)
    except WrongArity:
        report.add("wrong_vote_count")
        return None
    if c is None:
        report.add("unresolved_credibility")
        return None
    if c is CredibilityLabel.C4:
        report.add("skip_credibility")
        return None
    return map_to_grade(r, c)


def build_training_set(
    votes: list[AnnotationVote],
    tweets: Mapping[str, TweetRecord],
    reputation: ReputationLookup | Mapping | None,
    now: datetime,
) -> tuple[dict[str, list[LabeledExample]], ExclusionReport]:
    """Aggregate votes into labeled examples grouped by event.

    Per-message problems (ties, skips, unknown ids, missing votes) are
    counted in the exclusion report; the batch never aborts. Output order
    follows first appearance in the vote stream.
    """
    report = ExclusionReport()
    by_tweet: dict[str, dict[int, list[AnnotationVote]]] = {}
    order: list[str] = []
    for v in votes:
        if v.tweet_id not in by_tweet:
            by_tweet[v.tweet_id] = {1: [], 2: []}
            order.append(v.tweet_id)
        by_tweet[v.tweet_id][v.step].append(v)

    grouped: dict[str, list[LabeledExample]] = {}
    for tweet_id in order:
        steps = by_tweet[tweet_id]
        grade = _resolve_labels(steps[1], steps[2], report)
        if grade is None:
            continue
        tweet = tweets.get(tweet_id)
        if tweet is None:
            report.add("unknown_tweet")
            continue
        event_id = steps[1][0].event_id if steps[1] else steps[2][0].event_id
        example = LabeledExample(
            tweet_id=tweet_id,
            event_id=event_id,
            grade=grade,
            features=extract_features(tweet, reputation, now),
        )
        grouped.setdefault(event_id, []).append(example)
    return grouped, report


def write_training_file(path: Path | str, examples: list[LabeledExample]) -> None:
    """One JSON object per example: tweet_id, event_id, grade, schema, features."""
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(
                json.dumps(
                    {
                        "tweet_id": ex.tweet_id,
                        "event_id": ex.event_id,
                        "grade": ex.grade,
                        "schema_version": ex.features.schema_version,
                        "features": list(ex.features.values),
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )


def read_training_file(path: Path | str) -> list[LabeledExample]:
    examples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                examples.append(
                    LabeledExample(
                        tweet_id=raw["tweet_id"],
                        event_id=raw["event_id"],
                        grade=raw["grade"],
                        features=FeatureVector(
                            values=tuple(raw["features"]),
                            schema_version=raw["schema_version"],
                        ),
                    )
                )
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad training record: {exc}") from exc
    return examples


def grade_histogram(examples: list[LabeledExample]) -> dict[int, int]:
    hist = {g: 0 for g in (1, 2, 3, 4, 5)}
    for ex in examples:
        hist[ex.grade] += 1
    return hist
