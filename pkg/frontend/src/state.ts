/** Timeline row model and the feedback state machine (none -> agreed | disagreed). */

import type { ScoreOutcome, TweetPayload } from "./api.js";
import { isScoreFailure } from "./api.js";

export type FeedbackState =
  | { kind: "none" }
  | { kind: "agreed" }
  | { kind: "disagreed"; score: number };

export interface TimelineItem {
  id: string;
  text: string;
  handle: string;
  timestamp: string;
  score: number | null; // 1..7, null while loading or on per-id error
  raw: number | null;
  scoreError: string | null;
  feedback: FeedbackState;
}

/**
 * The author record carries no handle; derive a display handle from the
 * profile URL's last path segment when present, else from the tweet id.
 */
export function deriveHandle(profileUrl: string | null, tweetId: string): string {
  if (profileUrl) {
    try {
      const segments = new URL(profileUrl).pathname.split("/").filter(Boolean);
      const last = segments[segments.length - 1];
      if (last) return `@${last}`;
    } catch {
      // fall through to the id-based handle
    }
  }
  return `user-${tweetId}`;
}

export function itemFromTweet(tweet: TweetPayload): TimelineItem {
  return {
    id: tweet.id,
    text: tweet.text,
    handle: deriveHandle(tweet.author.profile_url, tweet.id),
    timestamp: tweet.created_at,
    score: null,
    raw: null,
    scoreError: null,
    feedback: { kind: "none" },
  };
}

/** Attach a score outcome; the badge always reflects the latest response. */
export function withScore(item: TimelineItem, outcome: ScoreOutcome): TimelineItem {
  if (isScoreFailure(outcome)) {
    return { ...item, score: null, raw: null, scoreError: outcome.error.code };
  }
  return { ...item, score: outcome.display, raw: outcome.raw, scoreError: null };
}

/** Transition the feedback state; only none -> agreed | disagreed is legal. */
export function applyFeedback(item: TimelineItem, next: FeedbackState): TimelineItem {
  if (next.kind === "none") {
    throw new Error("feedback cannot be withdrawn");
  }
  if (item.feedback.kind !== "none") {
    throw new Error(`feedback already ${item.feedback.kind}`);
  }
  if (item.score === null) {
    throw new Error("cannot give feedback on a row without a score");
  }
  if (next.kind === "disagreed" && (next.score < 1 || next.score > 7)) {
    throw new Error(`corrected score must be 1..7, got ${next.score}`);
  }
  return { ...item, feedback: next };
}

/** Undo an optimistic transition after the service rejected it. */
export function rollbackFeedback(item: TimelineItem): TimelineItem {
  return { ...item, feedback: { kind: "none" } };
}
