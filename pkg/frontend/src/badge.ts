/** Score badge styling: a red-to-green ramp over the 1..7 display scale. */

export function badgeClass(score: number): string {
  if (!Number.isInteger(score) || score < 1 || score > 7) {
    throw new Error(`display score must be an integer in 1..7, got ${score}`);
  }
  return `badge badge-${score}`;
}

/** Hue 0 (red) at score 1 up to hue 120 (green) at score 7. */
export function badgeColor(score: number): string {
  if (!Number.isInteger(score) || score < 1 || score > 7) {
    throw new Error(`display score must be an integer in 1..7, got ${score}`);
  }
  const hue = ((score - 1) / 6) * 120;
  return `hsl(${Math.round(hue)}, 72%, 40%)`;
}
