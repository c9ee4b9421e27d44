import { describe, expect, it } from "vitest";

import {
  hypotheticalPlacements,
  initialState,
  pinnedPlacements,
  withAdoptedPlan,
  withCandidates,
  withoutPin,
  withPin,
} from "../src/state.js";
import type { RankedPlanDoc, SceneDoc } from "../src/types.js";

const SCENE: SceneDoc = {
  data_items: [
    {
      id: "vt:A",
      data_type: "vt:Scalar",
      issue: "vt:Noise",
      geolocation: { kind: "Coordinates2D", x: 1, y: 2 },
    },
    {
      id: "vt:B",
      data_type: "vt:Text",
      issue: "vt:GeneralInformation",
      geolocation: { kind: "ObjectAnchored", object: "vt:House" },
    },
  ],
  task: "navigate",
  context: "inside-street",
};

function seeded() {
  let state = initialState(SCENE);
  state = withCandidates(state, "vt:A", ["vt:T1", "vt:T2"]);
  state = withCandidates(state, "vt:B", ["vt:T3"]);
  return state;
}

describe("pinning", () => {
  it("stores a slotless placement for a fresh pin", () => {
    const state = withPin(seeded(), "vt:A", "vt:T2");
    expect(state.pinned.get("vt:A")).toEqual({
      data: "vt:A",
      technique: "vt:T2",
    });
  });

  it("rejects a technique outside the served candidate list", () => {
    expect(() => withPin(seeded(), "vt:A", "vt:T3")).toThrow(
      /not a candidate/,
    );
    expect(() => withPin(seeded(), "vt:C", "vt:T1")).toThrow(
      /not a candidate/,
    );
  });

  it("unpin removes only the targeted item", () => {
    let state = withPin(seeded(), "vt:A", "vt:T1");
    state = withPin(state, "vt:B", "vt:T3");
    state = withoutPin(state, "vt:A");
    expect([...state.pinned.keys()]).toEqual(["vt:B"]);
  });
});

describe("plan adoption", () => {
  const plan: RankedPlanDoc = {
    score: 0.5,
    placements: [
      {
        data: "vt:B",
        technique: "vt:T3",
        slot: "TopOfObject",
        usability: 0.9,
        source: "Generic",
      },
      {
        data: "vt:A",
        technique: "vt:T1",
        slot: "Volume",
        usability: 0.1,
        source: "Default",
      },
    ],
    warnings: [],
  };

  it("pins every placement with its slot", () => {
    const state = withAdoptedPlan(seeded(), plan);
    expect(state.pinned.get("vt:A")).toEqual({
      data: "vt:A",
      technique: "vt:T1",
      slot: "Volume",
    });
    expect(state.pinned.get("vt:B")).toEqual({
      data: "vt:B",
      technique: "vt:T3",
      slot: "TopOfObject",
    });
  });

  it("refuses plans that stray outside candidate lists", () => {
    const rogue = {
      ...plan,
      placements: [{ ...plan.placements[0]!, technique: "vt:T9" }],
    };
    expect(() => withAdoptedPlan(seeded(), rogue)).toThrow(/not a candidate/);
  });

  it("replaces earlier pins atomically", () => {
    let state = withPin(seeded(), "vt:A", "vt:T2");
    state = withAdoptedPlan(state, plan);
    expect(state.pinned.get("vt:A")?.technique).toBe("vt:T1");
    expect(state.pinned.size).toBe(2);
  });
});

describe("placement ordering", () => {
  it("serializes pins sorted by data id", () => {
    let state = withPin(seeded(), "vt:B", "vt:T3");
    state = withPin(state, "vt:A", "vt:T1");
    expect(pinnedPlacements(state).map((p) => p.data)).toEqual([
      "vt:A",
      "vt:B",
    ]);
  });

  it("builds hypothetical plans with a slotless swap, keeping other slots", () => {
    let state = seeded();
    state = withAdoptedPlan(state, {
      score: 0,
      warnings: [],
      placements: [
        {
          data: "vt:A",
          technique: "vt:T1",
          slot: "Volume",
          usability: 0,
          source: "Default",
        },
        {
          data: "vt:B",
          technique: "vt:T3",
          slot: "TopOfObject",
          usability: 0,
          source: "Default",
        },
      ],
    });
    expect(hypotheticalPlacements(state, "vt:A", "vt:T2")).toEqual([
      { data: "vt:A", technique: "vt:T2" },
      { data: "vt:B", technique: "vt:T3", slot: "TopOfObject" },
    ]);
  });

  it("adds an unpinned item's probe to the current pins", () => {
    const state = withPin(seeded(), "vt:B", "vt:T3");
    expect(hypotheticalPlacements(state, "vt:A", "vt:T1")).toEqual([
      { data: "vt:A", technique: "vt:T1" },
      { data: "vt:B", technique: "vt:T3" },
    ]);
  });
});
