/**
 * Timeline rendering and feedback controls.
 *
 * Each row shows the message with its 1..7 score badge (or "score
 * unavailable" on a per-id error). Hovering reveals agree/disagree
 * controls; disagreeing opens a 1..7 picker, and nothing is submitted
 * until a corrected score is picked. Submissions update the row
 * optimistically and roll back if the service rejects the entry. A row's
 * pending interaction keeps one idempotency timestamp, so double clicks
 * collapse into a single stored entry server-side.
 */

import {
  ApiError,
  FeedbackAck,
  FeedbackSubmission,
  postFeedback,
} from "./api.js";
import { badgeClass, badgeColor } from "./badge.js";
import { interactionTimestamp } from "./idempotency.js";
import {
  TimelineItem,
  applyFeedback,
  rollbackFeedback,
} from "./state.js";

export interface TimelineHandlers {
  clientToken: string;
  submit?: (entry: FeedbackSubmission) => Promise<FeedbackAck>;
  onError?: (message: string) => void;
}

interface RowState {
  item: TimelineItem;
  pendingReceivedAt: string | null;
  element: HTMLElement;
}

export class Timeline {
  private rows = new Map<string, RowState>();

  constructor(
    private readonly root: HTMLElement,
    private readonly handlers: TimelineHandlers,
  ) {}

  render(items: TimelineItem[]): void {
    this.root.textContent = "";
    this.rows.clear();
    const list = document.createElement("ul");
    list.className = "timeline";
    for (const item of items) {
      const element = this.buildRow(item);
      this.rows.set(item.id, { item, pendingReceivedAt: null, element });
      list.appendChild(element);
    }
    this.root.appendChild(list);
  }

  item(id: string): TimelineItem | undefined {
    return this.rows.get(id)?.item;
  }

  private buildRow(item: TimelineItem): HTMLElement {
    const row = document.createElement("li");
    row.className = "tweet-row";
    row.dataset.tweetId = item.id;

    const header = document.createElement("div");
    header.className = "tweet-header";
    const handle = document.createElement("span");
    handle.className = "handle";
    handle.textContent = item.handle;
    const when = document.createElement("time");
    when.textContent = new Date(item.timestamp).toLocaleString();
    header.append(handle, when);

    const text = document.createElement("p");
    text.className = "tweet-text";
    text.textContent = item.text;

    row.append(header, text, this.buildScoreCell(item), this.buildControls(item.id));
    this.refreshRowClasses(row, item);
    return row;
  }

  private buildScoreCell(item: TimelineItem): HTMLElement {
    const cell = document.createElement("div");
    cell.className = "score-cell";
    if (item.score !== null) {
      const badge = document.createElement("span");
      badge.className = badgeClass(item.score);
      badge.style.backgroundColor = badgeColor(item.score);
      badge.textContent = String(item.score);
      badge.title = `credibility ${item.score} of 7`;
      cell.appendChild(badge);
    } else {
      const missing = document.createElement("span");
      missing.className = "score-unavailable";
      missing.textContent = "score unavailable";
      cell.appendChild(missing);
    }
    return cell;
  }

  private buildControls(tweetId: string): HTMLElement {
    const controls = document.createElement("div");
    controls.className = "feedback-controls";

    const agree = document.createElement("button");
    agree.className = "agree";
    agree.type = "button";
    agree.textContent = "\u{1F44D} agree";
    agree.addEventListener("click", () => {
      void this.submitFeedback(tweetId, { kind: "agreed" });
    });

    const disagree = document.createElement("button");
    disagree.className = "disagree";
    disagree.type = "button";
    disagree.textContent = "\u{1F44E} disagree";

    const picker = document.createElement("div");
    picker.className = "score-picker hidden";
    for (let score = 1; score <= 7; score++) {
      const option = document.createElement("button");
      option.type = "button";
      option.className = "pick";
      option.dataset.score = String(score);
      option.textContent = String(score);
      option.style.backgroundColor = badgeColor(score);
      option.addEventListener("click", () => {
        void this.submitFeedback(tweetId, { kind: "disagreed", score });
      });
      picker.appendChild(option);
    }
    // a disagree click only opens the picker; a rating must be chosen to submit
    disagree.addEventListener("click", () => picker.classList.toggle("hidden"));

    controls.append(agree, disagree, picker);
    return controls;
  }

  private refreshRowClasses(row: HTMLElement, item: TimelineItem): void {
    row.classList.toggle("has-feedback", item.feedback.kind !== "none");
    row.classList.toggle("scoreless", item.score === null);
    const state = document.createElement("span");
    state.className = "feedback-state";
    if (item.feedback.kind === "agreed") state.textContent = "you agreed";
    if (item.feedback.kind === "disagreed") {
      state.textContent = `you rated it ${item.feedback.score}`;
    }
    row.querySelector(".feedback-state")?.remove();
    if (item.feedback.kind !== "none") row.appendChild(state);
  }

  private async submitFeedback(
    tweetId: string,
    next: { kind: "agreed" } | { kind: "disagreed"; score: number },
  ): Promise<void> {
    const row = this.rows.get(tweetId);
    if (!row) return;
    const before = row.item;
    if (before.score === null) return;
    // reuse the pending interaction timestamp so double clicks dedup server-side
    const receivedAt = row.pendingReceivedAt ?? interactionTimestamp();
    row.pendingReceivedAt = receivedAt;

    let optimistic: TimelineItem;
    try {
      optimistic = applyFeedback(before, next);
    } catch {
      return; // feedback already given; nothing to submit
    }
    row.item = optimistic;
    this.refreshRowClasses(row.element, optimistic);

    const entry: FeedbackSubmission = {
      tweet_id: tweetId,
      client_token: this.handlers.clientToken,
      verdict: next.kind === "agreed" ? "agree" : "disagree",
      system_score_at_time: before.score,
      received_at: receivedAt,
    };
    if (next.kind === "disagreed") entry.suggested_score = next.score;

    const submit = this.handlers.submit ?? postFeedback;
    try {
      await submit(entry);
      row.pendingReceivedAt = null;
    } catch (err) {
      row.item = rollbackFeedback(optimistic);
      // a definitive rejection ends the interaction; an unreachable service
      // keeps its timestamp so a retry dedups server-side
      const definitive = err instanceof ApiError && err.code !== "unreachable";
      if (definitive) row.pendingReceivedAt = null;
      this.refreshRowClasses(row.element, row.item);
      const message =
        err instanceof ApiError ? `feedback rejected: ${err.message}` : String(err);
      this.handlers.onError?.(message);
    }
  }
}
