/** Stats dashboard: feedback percentages with CIs and the latency CDF. */

import type { FeedbackStats, LatencyStats, PctWithCI } from "./api.js";

function pctRow(label: string, stat: PctWithCI): HTMLElement {
  const row = document.createElement("tr");
  const name = document.createElement("td");
  name.textContent = label;
  const value = document.createElement("td");
  value.textContent = `${stat.value.toFixed(2)}%`;
  const ci = document.createElement("td");
  ci.textContent = `(${stat.ci_low.toFixed(2)}, ${stat.ci_high.toFixed(2)})`;
  row.append(name, value, ci);
  return row;
}

export function renderFeedbackStats(root: HTMLElement, stats: FeedbackStats | null): void {
  root.textContent = "";
  if (stats === null) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "no feedback yet";
    root.appendChild(empty);
    return;
  }
  const heading = document.createElement("h3");
  heading.textContent = `feedback on ${stats.n} scores`;
  const table = document.createElement("table");
  table.className = "feedback-stats";
  const head = document.createElement("tr");
  for (const text of ["", "observed", "95% interval"]) {
    const cell = document.createElement("th");
    cell.textContent = text;
    head.appendChild(cell);
  }
  table.appendChild(head);
  table.appendChild(pctRow("agreed with score", stats.pct_agreed));
  table.appendChild(pctRow("disagreed with score", stats.pct_disagreed));
  table.appendChild(pctRow("disagreed: should be higher", stats.pct_should_be_higher));
  table.appendChild(pctRow("disagreed: should be lower", stats.pct_should_be_lower));
  for (const magnitude of ["1", "2", "3", "4", "5", "6"]) {
    const stat = stats.magnitude_histogram[magnitude];
    if (stat) table.appendChild(pctRow(`disagreed by ${magnitude}`, stat));
  }
  root.append(heading, table);
}

/** Plot-ready polyline points for the CDF, normalized into a width x height box. */
export function cdfPolylinePoints(
  cdf: { ms: number; fraction: number }[],
  width = 320,
  height = 120,
): string {
  if (cdf.length === 0) return "";
  const first = cdf[0]!;
  const last = cdf[cdf.length - 1]!;
  const maxMs = last.ms > 0 ? last.ms : 1;
  const minMs = Math.min(first.ms, 0);
  const points = cdf.map(({ ms, fraction }) => {
    const x = ((ms - minMs) / (maxMs - minMs || 1)) * width;
    const y = height - fraction * height;
    return `${x.toFixed(1)},${y.toFixed(1)}`;
  });
  return points.join(" ");
}

export function renderLatencyStats(root: HTMLElement, stats: LatencyStats | null): void {
  root.textContent = "";
  if (stats === null) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "no requests measured yet";
    root.appendChild(empty);
    return;
  }
  const heading = document.createElement("h3");
  heading.textContent = `response time over ${stats.n} requests`;

  const quantiles = document.createElement("p");
  quantiles.className = "quantiles";
  quantiles.textContent = Object.entries(stats.quantiles_ms)
    .map(([q, ms]) => `p${Math.round(Number(q) * 100)} ${ms.toFixed(1)} ms`)
    .join("  ");

  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", "0 0 320 120");
  svg.setAttribute("class", "latency-cdf");
  const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
  line.setAttribute("fill", "none");
  line.setAttribute("stroke", "currentColor");
  line.setAttribute("points", cdfPolylinePoints(stats.cdf));
  svg.appendChild(line);

  root.append(heading, quantiles, svg);
}
