/**
 * Feedback idempotency: the service dedups on
 * (client_token, tweet_id, received_at). The client token is generated once
 * per browser and persisted; each feedback interaction mints one received_at
 * that is reused across double-clicks and retries of that interaction.
 */

const TOKEN_KEY = "credscore.client_token";

export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

function randomToken(): string {
  const bytes = new Uint8Array(16);
  crypto.getRandomValues(bytes);
  return Array.from(bytes, (b) => b.toString(16).padStart(2, "0")).join("");
}

export function clientToken(store: KeyValueStore): string {
  const existing = store.getItem(TOKEN_KEY);
  if (existing) return existing;
  const token = randomToken();
  store.setItem(TOKEN_KEY, token);
  return token;
}

/** One timestamp per interaction; the server treats repeats as duplicates. */
export function interactionTimestamp(now: Date = new Date()): string {
  return now.toISOString();
}
