// Browser entry point: wires the view-model to the DOM.

import { ApiError, SwitchboardClient } from "./api.js";
import {
  AdapterRow,
  ChatViewTurn,
  DEFAULT_STRATEGY,
  STRATEGIES,
  TranscriptState,
  appendTurn,
  canSend,
  isStrategy,
  toAdapterRows,
  toViewTurn,
} from "./viewmodel.js";

const client = new SwitchboardClient(
  (window as unknown as { SWITCHBOARD_URL?: string }).SWITCHBOARD_URL ??
    "http://127.0.0.1:8080",
);

const sessionId = `web-${Math.random().toString(36).slice(2, 10)}`;
let state: TranscriptState = { turns: [], pending: false };
let adapterRows: AdapterRow[] = [];

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function renderTurn(turn: ChatViewTurn): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "turn";

  const user = document.createElement("div");
  user.className = "bubble user";
  user.textContent = turn.userText;

  const reply = document.createElement("div");
  reply.className = "bubble assistant";

  const badge = document.createElement("span");
  badge.className = "badge";
  badge.textContent = turn.domainBadge;
  reply.appendChild(badge);

  if (turn.showFallbackIndicator) {
    const fb = document.createElement("span");
    fb.className = "fallback";
    fb.textContent = "fallback";
    reply.appendChild(fb);
  }

  const text = document.createElement("p");
  text.textContent = turn.replyText;
  reply.appendChild(text);

  const timing = document.createElement("small");
  timing.className = "timing";
  timing.textContent =
    `router ${turn.latency.router} · expert ${turn.latency.expert}` +
    ` · overhead ${turn.latency.overhead} · total ${turn.latency.total}`;
  reply.appendChild(timing);

  wrap.appendChild(user);
  wrap.appendChild(reply);
  return wrap;
}

function renderTranscript(): void {
  const box = el<HTMLDivElement>("transcript");
  box.replaceChildren(...state.turns.map(renderTurn));
  box.scrollTop = box.scrollHeight;
}

function renderAdapters(): void {
  const panel = el<HTMLUListElement>("adapters");
  panel.replaceChildren(
    ...adapterRows.map((row) => {
      const li = document.createElement("li");
      li.textContent = `${row.name} — ${row.description}`;
      if (row.fallbackMarker) {
        const mark = document.createElement("strong");
        mark.textContent = " (fallback)";
        li.appendChild(mark);
      }
      return li;
    }),
  );
}

function syncSendButton(): void {
  const input = el<HTMLInputElement>("message");
  el<HTMLButtonElement>("send").disabled = !canSend(state, input.value);
}

async function loadAdapters(): Promise<void> {
  try {
    adapterRows = toAdapterRows(await client.adapters());
    renderAdapters();
  } catch {
    el<HTMLUListElement>("adapters").replaceChildren(
      Object.assign(document.createElement("li"), {
        textContent: "service unreachable",
      }),
    );
  }
}

async function send(): Promise<void> {
  const input = el<HTMLInputElement>("message");
  const strategySel = el<HTMLSelectElement>("strategy");
  const text = input.value.trim();
  if (!canSend(state, text)) return;
  state = { ...state, pending: true };
  syncSendButton();
  const strategy = isStrategy(strategySel.value)
    ? strategySel.value
    : DEFAULT_STRATEGY;
  try {
    const resp = await client.chat(sessionId, text, strategy);
    state = appendTurn(state, toViewTurn(text, resp));
    input.value = "";
    renderTranscript();
  } catch (err) {
    state = { ...state, pending: false };
    if (err instanceof ApiError && err.status === 422) {
      strategySel.classList.add("invalid");
    } else {
      el<HTMLDivElement>("error").textContent =
        "request failed — check the service and retry";
    }
  }
  syncSendButton();
}

function init(): void {
  const strategySel = el<HTMLSelectElement>("strategy");
  for (const s of STRATEGIES) {
    const opt = document.createElement("option");
    opt.value = s;
    opt.textContent = s;
    if (s === DEFAULT_STRATEGY) opt.selected = true;
    strategySel.appendChild(opt);
  }
  el<HTMLButtonElement>("send").addEventListener("click", () => void send());
  el<HTMLInputElement>("message").addEventListener("input", syncSendButton);
  el<HTMLInputElement>("message").addEventListener("keydown", (e) => {
    if (e.key === "Enter") void send();
  });
  syncSendButton();
  void loadAdapters();
}

document.addEventListener("DOMContentLoaded", init);
