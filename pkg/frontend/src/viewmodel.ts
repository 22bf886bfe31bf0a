// Pure view-model layer: API responses in, render-ready state out.
// Keeping this DOM-free makes the transparency invariants unit-testable.

import type { AdapterEntry, ChatResponse, Strategy } from "./api.js";

export interface ChatViewTurn {
  userText: string;
  replyText: string;
  domainBadge: string;
  showFallbackIndicator: boolean;
  latency: { router: string; expert: string; overhead: string; total: string };
}

export interface AdapterRow {
  name: string;
  description: string;
  fallbackMarker: boolean;
}

export interface TranscriptState {
  turns: ChatViewTurn[];
  pending: boolean; // one in-flight request per session; send disabled while true
}

export const STRATEGIES: Strategy[] = ["semantic", "keyword", "hybrid", "random"];
export const DEFAULT_STRATEGY: Strategy = "semantic";

export function formatSeconds(value: number): string {
  return `${value.toFixed(3)}s`;
}

// The badge is a straight passthrough of the API's domain field: the UI
// must never invent or rewrite the expert name.
export function toViewTurn(userText: string, resp: ChatResponse): ChatViewTurn {
  return {
    userText,
    replyText: resp.reply,
    domainBadge: resp.domain,
    showFallbackIndicator: resp.used_fallback,
    latency: {
      router: formatSeconds(resp.latency.router),
      expert: formatSeconds(resp.latency.expert),
      overhead: formatSeconds(resp.latency.overhead),
      total: formatSeconds(resp.latency.total),
    },
  };
}

export function toAdapterRows(entries: AdapterEntry[]): AdapterRow[] {
  return entries.map((e) => ({
    name: e.name,
    description: e.description,
    fallbackMarker: e.is_fallback,
  }));
}

export function canSend(state: TranscriptState, input: string): boolean {
  return !state.pending && input.trim().length > 0;
}

export function appendTurn(
  state: TranscriptState,
  turn: ChatViewTurn,
): TranscriptState {
  // Transcript ordering equals send ordering; turns only ever append.
  return { turns: [...state.turns, turn], pending: false };
}

// Guard used before rendering: a badge naming a domain missing from the
// adapter panel indicates a stale panel or a server-side registry swap.
export function badgeKnown(turn: ChatViewTurn, rows: AdapterRow[]): boolean {
  return rows.some((r) => r.name === turn.domainBadge);
}

export function isStrategy(value: string): value is Strategy {
  return (STRATEGIES as string[]).includes(value);
}
