/**
 * Typed client for the /v1 API. The UI never computes or mutates scores;
 * everything displayed comes verbatim from these responses.
 *
 * Score requests are de-duplicated per tweet id: while a request for an id
 * is in flight, further asks for the same id await the same promise.
 */

import { apiBase } from "./config.js";

export interface AuthorPayload {
  followers_count: number;
  friends_count: number;
  statuses_count: number;
  listed_count: number;
  verified: boolean;
  created_at: string | null;
  location: string | null;
  description: string | null;
  profile_url: string | null;
}

export interface TweetPayload {
  id: string;
  text: string;
  created_at: string;
  source_label: string;
  author: AuthorPayload;
}

export interface TweetsPage {
  total: number | null;
  offset: number;
  tweets: TweetPayload[];
}

export interface ScoreResult {
  id: string;
  display: number;
  raw: number;
  computed_at: string;
  cache_hit: boolean;
}

export interface ScoreFailure {
  id: string;
  error: { code: string; message: string };
}

export type ScoreOutcome = ScoreResult | ScoreFailure;

export function isScoreFailure(outcome: ScoreOutcome): outcome is ScoreFailure {
  return (outcome as ScoreFailure).error !== undefined;
}

export interface FeedbackSubmission {
  tweet_id: string;
  client_token: string;
  verdict: "agree" | "disagree";
  system_score_at_time: number;
  suggested_score?: number;
  received_at: string;
}

export interface FeedbackAck {
  status: "recorded" | "duplicate";
  duplicate: boolean;
}

export interface PctWithCI {
  value: number;
  ci_low: number;
  ci_high: number;
}

export interface FeedbackStats {
  n: number;
  n_agreed: number;
  n_disagreed: number;
  pct_agreed: PctWithCI;
  pct_disagreed: PctWithCI;
  pct_should_be_higher: PctWithCI;
  pct_should_be_lower: PctWithCI;
  magnitude_histogram: Record<string, PctWithCI>;
}

export interface LatencyStats {
  n: number;
  quantiles_ms: Record<string, number>;
  cdf: { ms: number; fraction: number }[];
}

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let resp: Response;
  try {
    resp = await fetch(`${apiBase()}${path}`, init);
  } catch (err) {
    throw new ApiError("unreachable", String(err), 0);
  }
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    const code = typeof body.code === "string" ? body.code : "http_error";
    const message = typeof body.message === "string" ? body.message : resp.statusText;
    throw new ApiError(code, message, resp.status);
  }
  return body as T;
}

export async function fetchTweets(offset: number, limit: number): Promise<TweetsPage> {
  return request<TweetsPage>(`/v1/tweets?offset=${offset}&limit=${limit}`);
}

const inFlight = new Map<string, Promise<ScoreOutcome>>();

/** Request scores for ids, reusing any in-flight request per tweet id. */
export function fetchScores(ids: string[]): Promise<ScoreOutcome[]> {
  const fresh = [...new Set(ids.filter((id) => !inFlight.has(id)))];
  if (fresh.length > 0) {
    const batch = request<{ results: ScoreOutcome[] }>("/v1/scores", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ ids: fresh }),
    });
    for (const id of fresh) {
      const single = batch
        .then((page) => {
          const hit = page.results.find((r) => r.id === id);
          if (!hit) {
            return { id, error: { code: "missing", message: "no result for id" } };
          }
          return hit;
        })
        .finally(() => inFlight.delete(id));
      inFlight.set(id, single);
    }
  }
  return Promise.all(ids.map((id) => inFlight.get(id)!));
}

/** Visible for tests: number of score requests currently in flight. */
export function pendingScoreRequests(): number {
  return inFlight.size;
}

export async function postFeedback(entry: FeedbackSubmission): Promise<FeedbackAck> {
  return request<FeedbackAck>("/v1/feedback", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(entry),
  });
}

export async function fetchFeedbackStats(): Promise<FeedbackStats | null> {
  try {
    return await request<FeedbackStats>("/v1/stats/feedback");
  } catch (err) {
    if (err instanceof ApiError && err.code === "empty_feedback") return null;
    throw err;
  }
}

export async function fetchLatencyStats(): Promise<LatencyStats | null> {
  try {
    return await request<LatencyStats>("/v1/stats/latency?quantiles=0.5,0.8,0.9,0.99");
  } catch (err) {
    if (err instanceof ApiError && err.code === "empty_data") return null;
    throw err;
  }
}

export async function fetchHealth(): Promise<{ status: string; model_version: string }> {
  return request("/v1/health");
}
