/** Browser workbench: a dumb renderer for the server's directive stream.
 *
 * All rendering-policy logic is server-side; this file only captures hovers,
 * forwards them, folds incoming directives into the ViewState, and draws it.
 * Changing any control starts a fresh session (fresh hello) so traces stay
 * internally consistent.
 */

import { miniChart, polyline } from "./chart.js";
import { InteractionGate, OutBox } from "./interactions.js";
import { encodingColor, ordinalColor } from "./palette.js";
import type { ClientMessage, ServerMessage, SessionConfigMsg } from "./protocol.js";
import {
  applyDirective,
  fingerprint,
  initialView,
  legendEntries,
  noteInteraction,
  ViewState,
} from "./viewstate.js";

const MONTHS = ["Jan", "Feb", "Mar", "Apr", "May", "Jun",
  "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];

interface AppState {
  ws: WebSocket | null;
  view: ViewState;
  connected: boolean;
  sessionActive: boolean;
  summary: { correct: boolean; metrics: Record<string, unknown> } | null;
  startedAt: number;
}

const state: AppState = {
  ws: null,
  view: initialView(),
  connected: false,
  sessionActive: false,
  summary: null,
  startedAt: 0,
};

const gate = new InteractionGate(100);
const outbox = new OutBox<ClientMessage>();

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function controlValue(id: string): string {
  return ($(id) as HTMLInputElement | HTMLSelectElement).value;
}

function readConfig(): SessionConfigMsg {
  const policyKind = controlValue("policy") as SessionConfigMsg["policy"]["kind"];
  const policy: SessionConfigMsg["policy"] = { kind: policyKind };
  if (policyKind === "multiples" || policyKind === "overlay") {
    policy.cap = parseInt(controlValue("cap"), 10) || 4;
  }
  if (policyKind === "overlay") {
    policy.scheme = controlValue("scheme") as "ordinal" | "categorical";
  }
  if (policyKind === "animation") {
    policy.min_dwell = parseFloat(controlValue("dwell")) || 1.0;
  }
  const latencyKind = controlValue("latency");
  const latency: SessionConfigMsg["latency"] = { kind: latencyKind };
  if (latencyKind === "fixed") latency.d = parseFloat(controlValue("latency-param")) || 2.5;
  if (latencyKind === "uniform") {
    latency.lo = 0;
    latency.hi = parseFloat(controlValue("latency-param")) || 5;
  }
  const taskKind = controlValue("task");
  const task: SessionConfigMsg["task"] = { kind: taskKind };
  if (taskKind === "threshold") task.cutoff = 80;
  return { policy, latency, task, seed: parseInt(controlValue("seed"), 10) || 1 };
}

function send(msg: ClientMessage): void {
  if (state.ws && state.ws.readyState === WebSocket.OPEN) {
    state.ws.send(JSON.stringify(msg));
  } else {
    outbox.push(msg);
    render();
  }
}

function clientNow(): number {
  return (performance.now() - state.startedAt) / 1000;
}

function connect(): void {
  state.ws?.close();
  state.view = initialView();
  state.summary = null;
  state.sessionActive = false;
  const ws = new WebSocket(`ws://${location.host}/ws`);
  state.ws = ws;
  ws.onopen = () => {
    state.connected = true;
    state.startedAt = performance.now();
    send({ type: "hello", config: readConfig() });
    outbox.drainTo((m) => ws.send(JSON.stringify(m)));
    render();
  };
  ws.onmessage = (ev) => handleServer(JSON.parse(ev.data) as ServerMessage);
  ws.onclose = () => {
    state.connected = false;
    render();
    // queued interacts drain into a fresh session once the service returns
    if (state.sessionActive && !state.summary) {
      setTimeout(connect, 1000);
    }
  };
  render();
}

function handleServer(msg: ServerMessage): void {
  if (msg.type === "config_ack") {
    state.sessionActive = true;
    state.view = { ...state.view, question: msg.task_question };
  } else if (msg.type === "render") {
    state.view = applyDirective(state.view, msg.directive);
  } else if (msg.type === "summary") {
    state.summary = { correct: msg.correct, metrics: msg.metrics };
    state.sessionActive = false;
  } else {
    state.view = {
      ...state.view,
      warnings: [...state.view.warnings, `${msg.code}: ${msg.detail}`].slice(-50),
    };
  }
  render();
}

function hover(facet: string): void {
  if (!state.sessionActive || state.summary) return;
  if (!gate.allow(facet, performance.now())) return;
  state.view = noteInteraction(state.view, facet);
  send({ type: "interact", target: facet, client_time: clientNow() });
  render();
}

function submit(answer: boolean | string): void {
  if (!state.sessionActive) return;
  send({ type: "submit_answer", answer });
}

// -- rendering ---------------------------------------------------------------

function renderFacets(): void {
  const box = $("facets");
  box.innerHTML = "";
  for (const facet of MONTHS) {
    const btn = document.createElement("button");
    btn.textContent = facet;
    btn.className = "facet";
    const rank = state.view.history.get(facet);
    if (rank !== undefined) {
      btn.style.background = ordinalColor(rank);
      btn.style.color = rank < 2 ? "#fff" : "#123";
    }
    btn.onmouseenter = () => hover(facet);
    btn.onclick = () => hover(facet);
    box.appendChild(btn);
  }
}

function renderSlots(): void {
  const box = $("slots");
  const overlay = controlValue("policy") === "overlay";
  box.innerHTML = "";
  const entries = [...state.view.slots.entries()].sort((a, b) => a[0] - b[0]);
  if (overlay) {
    const lines = entries
      .filter(([, s]) => s.state === "rendered" && s.series)
      .map(([, s]) => polyline(s.series!, {
        width: 420, height: 240, color: encodingColor(s.encoding),
      }))
      .join("");
    const spinners = entries.filter(([, s]) => s.spinner).length;
    box.innerHTML =
      `<div class="panel wide"><svg width="420" height="240">${lines}</svg>` +
      (spinners ? `<div class="spinner">loading ${spinners}...</div>` : "") +
      `</div>`;
    return;
  }
  for (const [slot, s] of entries) {
    const panel = document.createElement("div");
    panel.className = "panel";
    panel.style.borderColor = encodingColor(s.encoding);
    const label = s.target ?? `slot ${slot}`;
    let body: string;
    if (s.state === "rendered" && s.series) {
      body = miniChart(s.series, { width: 150, height: 90, color: "#2b5f8a" });
    } else if (s.state === "cancelled") {
      body = `<div class="spinner">cancelled</div>`;
    } else {
      body = `<div class="spinner">${s.held ? "held" : "loading"}...</div>`;
    }
    panel.innerHTML = `<div class="label">${label}</div>${body}`;
    box.appendChild(panel);
  }
}

function renderLegend(): void {
  const box = $("legend");
  box.innerHTML = legendEntries(state.view)
    .map((e) =>
      `<span class="chip"><i style="background:${encodingColor(e.encoding)}"></i>` +
      `${e.target ?? "?"} #${e.reqId}</span>`)
    .join("");
}

function renderAnswer(): void {
  const box = $("answers");
  box.innerHTML = "";
  if (!state.sessionActive) return;
  const kind = controlValue("task");
  const add = (label: string, answer: boolean | string) => {
    const btn = document.createElement("button");
    btn.textContent = label;
    btn.onclick = () => submit(answer);
    box.appendChild(btn);
  };
  if (kind === "threshold") {
    add("Yes", true);
    add("No", false);
  } else if (kind === "maximum") {
    for (const m of MONTHS) add(m, m);
  } else {
    for (const t of ["increasing", "decreasing", "fluctuating"]) add(t, t);
  }
}

function render(): void {
  $("banner").style.display =
    !state.connected && (state.sessionActive || outbox.size > 0)
      ? "block" : "none";
  $("question").textContent = state.view.question ?? "";
  renderFacets();
  renderSlots();
  renderLegend();
  renderAnswer();
  const summary = $("summary");
  if (state.summary) {
    summary.textContent =
      `${state.summary.correct ? "correct" : "wrong"} - ` +
      JSON.stringify(state.summary.metrics);
  } else {
    summary.textContent = "";
  }
  $("console").innerHTML = state.view.warnings
    .slice(-8).map((w) => `<div>${w}</div>`).join("");
  $("fingerprint").textContent = `state ${fingerprint(state.view).length}b`;
}

export function start(): void {
  $("connect").onclick = connect;
  render();
}

start();
