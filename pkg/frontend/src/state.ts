/** Composer state and its pure transitions.
 *
 * Everything here is bookkeeping over service responses. Candidate
 * lists, conflicts, and scores are stored exactly as the service sent
 * them; no transition computes a compatibility fact locally.
 */

import type {
  CheckResponse,
  PlacementDoc,
  RankedPlanDoc,
  RecommendResponse,
  SceneDoc,
  ServiceErrorPayload,
} from "./types.js";

export interface ComposerState {
  scene: SceneDoc;
  /** data id -> candidate technique ids, as returned by POST /match */
  candidates: ReadonlyMap<string, readonly string[]>;
  /** data id -> the placement the user pinned for it */
  pinned: ReadonlyMap<string, PlacementDoc>;
  /** data id -> technique id -> conflict text, from hypothetical checks */
  blocked: ReadonlyMap<string, ReadonlyMap<string, string>>;
  lastCheck: CheckResponse | null;
  lastRecommendations: RecommendResponse | null;
  /** last non-modal service failure, kept until the next action */
  lastError: ServiceErrorPayload | null;
}

export function initialState(scene: SceneDoc): ComposerState {
  return {
    scene,
    candidates: new Map(),
    pinned: new Map(),
    blocked: new Map(),
    lastCheck: null,
    lastRecommendations: null,
    lastError: null,
  };
}

export function withCandidates(
  state: ComposerState,
  dataId: string,
  techniqueIds: readonly string[],
): ComposerState {
  const candidates = new Map(state.candidates);
  candidates.set(dataId, [...techniqueIds]);
  return { ...state, candidates };
}

function assertCandidate(
  state: ComposerState,
  dataId: string,
  techniqueId: string,
): void {
  const options = state.candidates.get(dataId);
  if (!options || !options.includes(techniqueId)) {
    throw new Error(
      `${techniqueId} is not a candidate for ${dataId}; ` +
        "pins must come from the served candidate list",
    );
  }
}

export function withPin(
  state: ComposerState,
  dataId: string,
  techniqueId: string,
): ComposerState {
  assertCandidate(state, dataId, techniqueId);
  const pinned = new Map(state.pinned);
  // a fresh pin carries no slot; the service applies the declared one
  pinned.set(dataId, { data: dataId, technique: techniqueId });
  return { ...state, pinned };
}

export function withoutPin(state: ComposerState, dataId: string): ComposerState {
  const pinned = new Map(state.pinned);
  pinned.delete(dataId);
  return { ...state, pinned };
}

/** Adopt every placement of a recommended plan at once, slots included. */
export function withAdoptedPlan(
  state: ComposerState,
  plan: RankedPlanDoc,
): ComposerState {
  for (const placement of plan.placements) {
    assertCandidate(state, placement.data, placement.technique);
  }
  const pinned = new Map<string, PlacementDoc>();
  for (const placement of plan.placements) {
    pinned.set(placement.data, {
      data: placement.data,
      technique: placement.technique,
      slot: placement.slot,
    });
  }
  return { ...state, pinned };
}

/** Pinned placements in the canonical order the service is called with. */
export function pinnedPlacements(state: ComposerState): PlacementDoc[] {
  return [...state.pinned.values()].sort((a, b) =>
    a.data < b.data ? -1 : a.data > b.data ? 1 : 0,
  );
}

/** The plan to probe when asking "could I still pick this candidate?":
 * current pins with `dataId`'s entry replaced by a fresh, slotless pick. */
export function hypotheticalPlacements(
  state: ComposerState,
  dataId: string,
  techniqueId: string,
): PlacementDoc[] {
  const byData = new Map(state.pinned);
  byData.set(dataId, { data: dataId, technique: techniqueId });
  return [...byData.values()].sort((a, b) =>
    a.data < b.data ? -1 : a.data > b.data ? 1 : 0,
  );
}
