import { describe, expect, it } from "vitest";

import type { WireDirective } from "../src/protocol.js";
import { luminance, ordinalColor, ORDINAL_RAMP } from "../src/palette.js";
import {
  applyDirective,
  fingerprint,
  initialView,
  legendEntries,
  noteInteraction,
  visibleReqIds,
  ViewState,
} from "../src/viewstate.js";

function d(partial: Partial<WireDirective> & { kind: WireDirective["kind"] }): WireDirective {
  return { req_id: 1, slot: 0, at: 0, encoding: null, ...partial };
}

function fold(directives: WireDirective[], from?: ViewState): ViewState {
  return directives.reduce(applyDirective, from ?? initialView());
}

const ORD = (level: number) => ({ scheme: "ordinal" as const, level });

describe("applyDirective", () => {
  it("spinner_on places a pending panel", () => {
    const view = fold([d({ kind: "spinner_on", target: "Jan", encoding: ORD(0) })]);
    const slot = view.slots.get(0)!;
    expect(slot.state).toBe("pending");
    expect(slot.spinner).toBe(true);
    expect(slot.target).toBe("Jan");
  });

  it("render_response draws the series and clears the spinner", () => {
    const view = fold([
      d({ kind: "spinner_on", target: "Jan", encoding: ORD(0) }),
      d({ kind: "render_response", target: "Jan", encoding: ORD(0),
          series: [[0, 10], [1, 20]] }),
    ]);
    const slot = view.slots.get(0)!;
    expect(slot.state).toBe("rendered");
    expect(slot.spinner).toBe(false);
    expect(slot.series).toEqual([[0, 10], [1, 20]]);
  });

  it("spinner_off with no prior spinner_on is a logged no-op", () => {
    const before = initialView();
    const after = applyDirective(before, d({ kind: "spinner_off", slot: 3 }));
    expect(after.slots.size).toBe(0);
    expect(after.warnings.length).toBe(1);
    expect(after.warnings[0]).toMatch(/spinner_off/);
  });

  it("evict clears the slot and its legend entry", () => {
    const view = fold([
      d({ kind: "spinner_on", req_id: 1, slot: 0, target: "Jan", encoding: ORD(0) }),
      d({ kind: "spinner_on", req_id: 2, slot: 1, target: "Feb", encoding: ORD(0) }),
      d({ kind: "evict", req_id: 1, slot: 0 }),
    ]);
    expect([...view.slots.keys()]).toEqual([1]);
    expect(legendEntries(view).map((e) => e.reqId)).toEqual([2]);
  });

  it("directives for unknown slots leave the view unchanged", () => {
    const base = fold([d({ kind: "spinner_on", target: "Jan", encoding: ORD(0) })]);
    for (const bad of [
      d({ kind: "evict", slot: 7 }),
      d({ kind: "recolor", req_id: 9, slot: 7, encoding: ORD(1) }),
      d({ kind: "render_response", slot: 7, series: [[0, 1]] }),
      d({ kind: "hold", req_id: 9, slot: 7 }),
    ]) {
      const after = applyDirective(base, bad);
      expect(fingerprint({ ...after, warnings: [] }))
        .toBe(fingerprint({ ...base, warnings: [] }));
      expect(after.warnings.length).toBe(base.warnings.length + 1);
    }
  });

  it("recolor updates ordinal intensity in place", () => {
    const view = fold([
      d({ kind: "spinner_on", req_id: 1, slot: 0, encoding: ORD(0) }),
      d({ kind: "spinner_on", req_id: 2, slot: 1, encoding: ORD(0) }),
      d({ kind: "recolor", req_id: 1, slot: 0, encoding: ORD(1) }),
      d({ kind: "recolor", req_id: 2, slot: 1, encoding: ORD(0) }),
    ]);
    expect(view.slots.get(0)!.encoding!.level).toBe(1);
    expect(view.slots.get(1)!.encoding!.level).toBe(0);
  });

  it("cancel then spinner_on replaces the blocked panel", () => {
    const view = fold([
      d({ kind: "spinner_on", req_id: 1, target: "Jan", encoding: ORD(0) }),
      d({ kind: "cancel", req_id: 1 }),
      d({ kind: "spinner_on", req_id: 2, target: "Feb", encoding: ORD(0) }),
    ]);
    expect(visibleReqIds(view)).toEqual([2]);
    expect(view.slots.get(0)!.target).toBe("Feb");
  });

  it("hold marks the panel until release renders it", () => {
    const stream = [
      d({ kind: "spinner_on", req_id: 1, target: "Jan", encoding: ORD(0) }),
      d({ kind: "hold", req_id: 1 }),
    ];
    const held = fold(stream);
    expect(held.slots.get(0)!.held).toBe(true);
    const released = applyDirective(held,
      d({ kind: "release", req_id: 1, series: [[0, 5]], encoding: ORD(0) }));
    expect(released.slots.get(0)!.held).toBe(false);
    expect(released.slots.get(0)!.state).toBe("rendered");
  });
});

describe("determinism", () => {
  it("replaying a recorded stream reproduces the identical final state", () => {
    const stream: WireDirective[] = [];
    let rid = 0;
    for (let round = 0; round < 40; round++) {
      rid += 1;
      const slot = round % 4;
      if (round % 7 === 3) stream.push(d({ kind: "evict", req_id: rid - 4, slot }));
      stream.push(d({ kind: "spinner_on", req_id: rid, slot,
        target: `F${slot}`, encoding: ORD(0) }));
      for (let k = 0; k <= Math.min(round, 3); k++) {
        stream.push(d({ kind: "recolor", req_id: rid - k, slot: (slot - k + 4) % 4,
          encoding: ORD(k) }));
      }
      if (round % 2 === 0) {
        stream.push(d({ kind: "render_response", req_id: rid, slot,
          target: `F${slot}`, encoding: ORD(0), series: [[0, round], [1, round + 5]] }));
        stream.push(d({ kind: "spinner_off", req_id: rid, slot }));
      }
    }
    expect(fingerprint(fold(stream))).toBe(fingerprint(fold(stream)));
  });
});

describe("widget history", () => {
  it("tints by recency with the latest at rank zero", () => {
    let view = initialView();
    for (const f of ["Jan", "Feb", "Mar"]) view = noteInteraction(view, f);
    expect(view.history.get("Mar")).toBe(0);
    expect(view.history.get("Feb")).toBe(1);
    expect(view.history.get("Jan")).toBe(2);
  });

  it("re-hovering a facet moves it back to rank zero", () => {
    let view = initialView();
    for (const f of ["Jan", "Feb", "Jan"]) view = noteInteraction(view, f);
    expect(view.history.get("Jan")).toBe(0);
    expect(view.history.get("Feb")).toBe(1);
  });

  it("depth caps the tinted facets", () => {
    let view = initialView();
    for (const f of ["Jan", "Feb", "Mar"]) view = noteInteraction(view, f, 2);
    expect(view.history.size).toBe(2);
  });
});

describe("ordinal ramp", () => {
  it("most recent (level 0) is the darkest", () => {
    const lums = ORDINAL_RAMP.map(luminance);
    for (let i = 1; i < lums.length; i++) {
      expect(lums[i - 1]).toBeLessThan(lums[i]);
    }
    expect(ordinalColor(0)).toBe(ORDINAL_RAMP[0]);
    expect(ordinalColor(99)).toBe(ORDINAL_RAMP[ORDINAL_RAMP.length - 1]);
  });
});

describe("multiples cap", () => {
  it("a cap-4 stream never shows more than four panels", () => {
    let view = initialView();
    let maxVisible = 0;
    let rid = 0;
    for (let round = 0; round < 12; round++) {
      rid += 1;
      const slot = round % 4;
      if (round >= 4) {
        view = applyDirective(view, d({ kind: "evict", req_id: rid - 4, slot }));
      }
      view = applyDirective(view, d({ kind: "spinner_on", req_id: rid, slot,
        target: `F${round}`, encoding: ORD(0) }));
      maxVisible = Math.max(maxVisible, view.slots.size);
    }
    expect(maxVisible).toBeLessThanOrEqual(4);
  });
});
