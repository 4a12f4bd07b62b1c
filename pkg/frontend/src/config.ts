/** API base URL. Empty string means same-origin (served by the scoring service). */
export function apiBase(): string {
  const override = (globalThis as Record<string, unknown>).__CREDSCORE_API__;
  return typeof override === "string" ? override : "";
}

export const PAGE_SIZE = 20;
