/** Application shell: timeline view, stats dashboard, retry banner. */

import {
  fetchFeedbackStats,
  fetchLatencyStats,
  fetchScores,
  fetchTweets,
} from "./api.js";
import { PAGE_SIZE } from "./config.js";
import { renderFeedbackStats, renderLatencyStats } from "./dashboard.js";
import { clientToken } from "./idempotency.js";
import { itemFromTweet, withScore } from "./state.js";
import { Timeline } from "./timeline.js";

export interface App {
  timeline: Timeline;
  loadTimeline(offset?: number): Promise<void>;
  loadDashboard(): Promise<void>;
}

export function mountApp(root: HTMLElement): App {
  root.textContent = "";

  const banner = document.createElement("div");
  banner.className = "banner hidden";
  const bannerText = document.createElement("span");
  const retry = document.createElement("button");
  retry.type = "button";
  retry.textContent = "retry";
  banner.append(bannerText, retry);

  const nav = document.createElement("nav");
  const timelineTab = document.createElement("button");
  timelineTab.type = "button";
  timelineTab.textContent = "timeline";
  const dashboardTab = document.createElement("button");
  dashboardTab.type = "button";
  dashboardTab.textContent = "stats";
  nav.append(timelineTab, dashboardTab);

  const timelineRoot = document.createElement("section");
  timelineRoot.className = "timeline-view";
  const dashboardRoot = document.createElement("section");
  dashboardRoot.className = "dashboard-view hidden";
  const feedbackPanel = document.createElement("div");
  const latencyPanel = document.createElement("div");
  dashboardRoot.append(feedbackPanel, latencyPanel);

  root.append(banner, nav, timelineRoot, dashboardRoot);

  const showBanner = (message: string) => {
    bannerText.textContent = message;
    banner.classList.remove("hidden");
  };
  const hideBanner = () => banner.classList.add("hidden");

  const timeline = new Timeline(timelineRoot, {
    clientToken: clientToken(window.localStorage),
    onError: showBanner,
  });

  async function loadTimeline(offset = 0): Promise<void> {
    try {
      const page = await fetchTweets(offset, PAGE_SIZE);
      const items = page.tweets.map(itemFromTweet);
      const outcomes = await fetchScores(items.map((item) => item.id));
      const scored = items.map((item, i) => withScore(item, outcomes[i]!));
      timeline.render(scored);
      hideBanner();
    } catch (err) {
      showBanner(`service unreachable: ${String(err)}`);
      throw err;
    }
  }

  async function loadDashboard(): Promise<void> {
    try {
      renderFeedbackStats(feedbackPanel, await fetchFeedbackStats());
      renderLatencyStats(latencyPanel, await fetchLatencyStats());
      hideBanner();
    } catch (err) {
      showBanner(`service unreachable: ${String(err)}`);
      throw err;
    }
  }

  timelineTab.addEventListener("click", () => {
    timelineRoot.classList.remove("hidden");
    dashboardRoot.classList.add("hidden");
  });
  dashboardTab.addEventListener("click", () => {
    timelineRoot.classList.add("hidden");
    dashboardRoot.classList.remove("hidden");
    void loadDashboard();
  });
  retry.addEventListener("click", () => {
    void loadTimeline();
  });

  return { timeline, loadTimeline, loadDashboard };
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const app = mountApp(document.getElementById("app")!);
  void app.loadTimeline();
}
