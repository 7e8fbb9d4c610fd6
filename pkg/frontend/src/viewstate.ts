/** Pure view state: a fold over the server's directive stream.
 *
 * No rendering policy lives here; every mutation is dictated by a directive,
 * so replaying a recorded stream reproduces the identical final state. A
 * directive that refers to an unknown slot or request is logged to the
 * console strip and leaves the view unchanged.
 */

import type { WireDirective } from "./protocol.js";
import type { EncodingToken } from "./protocol.js";

export interface SlotView {
  reqId: number;
  target: string | null;
  state: "pending" | "rendered" | "cancelled";
  spinner: boolean;
  held: boolean;
  encoding: EncodingToken | null;
  series: [number, number][] | null;
}

export interface ViewState {
  slots: Map<number, SlotView>;
  /** facet -> recency rank (0 = latest interaction), capped depth */
  history: Map<string, number>;
  warnings: string[];
  question: string | null;
}

const WARNING_CAP = 50;
export const HISTORY_DEPTH = 5;

export function initialView(): ViewState {
  return { slots: new Map(), history: new Map(), warnings: [], question: null };
}

function clone(view: ViewState): ViewState {
  return {
    slots: new Map(view.slots),
    history: new Map(view.history),
    warnings: view.warnings.slice(),
    question: view.question,
  };
}

function warn(view: ViewState, message: string): ViewState {
  const next = clone(view);
  next.warnings = [...view.warnings, message].slice(-WARNING_CAP);
  return next;
}

/** Record the user's own interaction: retint the widget history. */
export function noteInteraction(
  view: ViewState, facet: string, depth: number = HISTORY_DEPTH,
): ViewState {
  const next = clone(view);
  const ranks = new Map<string, number>();
  ranks.set(facet, 0);
  const ordered = [...view.history.entries()].sort((a, b) => a[1] - b[1]);
  for (const [f] of ordered) {
    if (!ranks.has(f) && ranks.size < depth) {
      ranks.set(f, ranks.size);
    }
  }
  next.history = ranks;
  return next;
}

export function applyDirective(view: ViewState, d: WireDirective): ViewState {
  switch (d.kind) {
    case "spinner_on": {
      const next = clone(view);
      next.slots.set(d.slot, {
        reqId: d.req_id,
        target: d.target ?? null,
        state: "pending",
        spinner: true,
        held: false,
        encoding: d.encoding,
        series: null,
      });
      return next;
    }
    case "spinner_off": {
      const occupant = view.slots.get(d.slot);
      if (!occupant) {
        return warn(view, `spinner_off on empty slot ${d.slot}: no-op`);
      }
      if (!occupant.spinner) {
        return view; // already replaced by content; idempotent
      }
      const next = clone(view);
      next.slots.set(d.slot, { ...occupant, spinner: false });
      return next;
    }
    case "render_response":
    case "release":
    case "replace_in_place": {
      const occupant = view.slots.get(d.slot);
      if (d.kind !== "replace_in_place" && !occupant) {
        return warn(view, `${d.kind} for unknown slot ${d.slot}: ignored`);
      }
      const next = clone(view);
      next.slots.set(d.slot, {
        reqId: d.req_id,
        target: d.target ?? occupant?.target ?? null,
        state: "rendered",
        spinner: false,
        held: false,
        encoding: d.encoding ?? occupant?.encoding ?? null,
        series: d.series ?? null,
      });
      return next;
    }
    case "evict": {
      if (!view.slots.has(d.slot)) {
        return warn(view, `evict for unknown slot ${d.slot}: ignored`);
      }
      const next = clone(view);
      next.slots.delete(d.slot);
      return next;
    }
    case "cancel": {
      const occupant = view.slots.get(d.slot);
      if (!occupant || occupant.reqId !== d.req_id) {
        return warn(view, `cancel for unknown request ${d.req_id}: ignored`);
      }
      const next = clone(view);
      next.slots.set(d.slot, { ...occupant, state: "cancelled", spinner: false });
      return next;
    }
    case "recolor": {
      const occupant = view.slots.get(d.slot);
      if (!occupant || occupant.reqId !== d.req_id) {
        return warn(view, `recolor for unknown request ${d.req_id}: ignored`);
      }
      const next = clone(view);
      next.slots.set(d.slot, { ...occupant, encoding: d.encoding });
      return next;
    }
    case "hold": {
      const occupant = view.slots.get(d.slot);
      if (!occupant || occupant.reqId !== d.req_id) {
        return warn(view, `hold for unknown request ${d.req_id}: ignored`);
      }
      const next = clone(view);
      next.slots.set(d.slot, { ...occupant, held: true });
      return next;
    }
    default:
      return warn(view, `unknown directive kind ${(d as WireDirective).kind}`);
  }
}

/** Request ids currently visible; equals the server snapshot at every
 * directive boundary (cancelled occupants are gone on the server side and
 * get replaced on the very next directive here). */
export function visibleReqIds(view: ViewState): number[] {
  return [...view.slots.values()]
    .filter((s) => s.state !== "cancelled")
    .map((s) => s.reqId)
    .sort((a, b) => a - b);
}

export interface LegendEntry {
  reqId: number;
  target: string | null;
  encoding: EncodingToken | null;
}

/** Legend rows for live entries, most recent first. */
export function legendEntries(view: ViewState): LegendEntry[] {
  return [...view.slots.values()]
    .filter((s) => s.state !== "cancelled")
    .sort((a, b) => b.reqId - a.reqId)
    .map((s) => ({ reqId: s.reqId, target: s.target, encoding: s.encoding }));
}

/** Stable serialization for determinism checks. */
export function fingerprint(view: ViewState): string {
  const slots = [...view.slots.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([slot, s]) => [slot, s.reqId, s.target, s.state, s.spinner, s.held,
      s.encoding ? [s.encoding.scheme, s.encoding.level] : null, s.series]);
  const history = [...view.history.entries()].sort((a, b) => a[1] - b[1]);
  return JSON.stringify({ slots, history, warnings: view.warnings });
}
