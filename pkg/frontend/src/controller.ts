/** Orchestrates user actions against the service and owns the state.
 *
 * Contract: the composer shows nothing it did not get from the service.
 * Pinning re-checks the pinned set and probes every still-open
 * candidate with a hypothetical check; the probe verdicts drive the
 * disabled state and tooltips. A superseding user action aborts
 * whatever round-trips are still in flight (latest action wins).
 */

import { ApiClient, isAbort, ServiceError } from "./api.js";
import {
  ComposerState,
  hypotheticalPlacements,
  initialState,
  pinnedPlacements,
  withAdoptedPlan,
  withCandidates,
  withoutPin,
  withPin,
} from "./state.js";
import type {
  DataItemDoc,
  SceneDoc,
  SummaryDoc,
  TechniqueDoc,
} from "./types.js";

/** The service's own default for /recommend; omitted from request bodies. */
const DEFAULT_TOP_N = 5;

export class Composer {
  private readonly api: ApiClient;
  private readonly onChange: () => void;
  private currentState: ComposerState;
  private loadedSummary: SummaryDoc | null = null;
  private readonly techniqueIndex = new Map<string, TechniqueDoc>();
  private inflight: AbortController | null = null;
  private seq = 0;
  private wantedTopN = DEFAULT_TOP_N;

  constructor(api: ApiClient, scene: SceneDoc, onChange: () => void) {
    this.api = api;
    this.currentState = initialState(scene);
    this.onChange = onChange;
  }

  get state(): ComposerState {
    return this.currentState;
  }

  get summary(): SummaryDoc | null {
    return this.loadedSummary;
  }

  get techniques(): ReadonlyMap<string, TechniqueDoc> {
    return this.techniqueIndex;
  }

  get topN(): number {
    return this.wantedTopN;
  }

  setTopN(value: number): void {
    this.wantedTopN = Math.min(10, Math.max(1, Math.round(value)));
    this.onChange();
  }

  /** The scene as shareable JSON; the only thing the composer persists. */
  exportScene(): string {
    return JSON.stringify(this.currentState.scene, null, 2) + "\n";
  }

  /** Retarget the scene; previous check results no longer apply. */
  async setTaskContext(task: string, context: string): Promise<void> {
    const { signal, seq } = this.begin();
    try {
      this.commit({
        ...this.currentState,
        scene: { ...this.currentState.scene, task, context },
        lastRecommendations: null,
      });
      await this.refreshConflicts(signal, seq);
    } catch (err) {
      this.fail(err, seq);
    }
  }

  /** Fetch the KB inventory and each scene item's candidate list. */
  async load(): Promise<void> {
    const { signal, seq } = this.begin();
    try {
      const [summary, techniques] = await Promise.all([
        this.api.summary(signal),
        this.api.techniques(signal),
      ]);
      const matches = await Promise.all(
        this.currentState.scene.data_items.map((item) =>
          this.api.match(item, signal),
        ),
      );
      if (seq !== this.seq) return;
      this.loadedSummary = summary;
      this.techniqueIndex.clear();
      for (const technique of techniques) {
        this.techniqueIndex.set(technique.id, technique);
      }
      let state = this.currentState;
      this.currentState.scene.data_items.forEach((item, i) => {
        state = withCandidates(state, item.id, matches[i]!.candidates);
      });
      if (!state.scene.task || !state.scene.context) {
        state = {
          ...state,
          scene: {
            ...state.scene,
            task: state.scene.task || (summary.tasks[0] ?? ""),
            context: state.scene.context || (summary.contexts[0] ?? ""),
          },
        };
      }
      this.commit({ ...state, lastError: null });
    } catch (err) {
      this.fail(err, seq);
    }
  }

  /** Add a data item to the scene and fetch its candidates. */
  async addItem(item: DataItemDoc): Promise<void> {
    if (this.currentState.scene.data_items.some((d) => d.id === item.id)) {
      this.commit({
        ...this.currentState,
        lastError: {
          error: "duplicate_item",
          message: `scene already contains ${item.id}`,
        },
      });
      return;
    }
    const { signal, seq } = this.begin();
    const scene: SceneDoc = {
      ...this.currentState.scene,
      data_items: [...this.currentState.scene.data_items, item],
    };
    try {
      const match = await this.api.match(item, signal);
      if (seq !== this.seq) return;
      const state = withCandidates(
        { ...this.currentState, scene },
        item.id,
        match.candidates,
      );
      this.commit(state);
      await this.refreshConflicts(signal, seq);
    } catch (err) {
      this.fail(err, seq);
    }
  }

  /** Pin a candidate technique onto a data item. */
  async pin(dataId: string, techniqueId: string): Promise<void> {
    const { signal, seq } = this.begin();
    try {
      this.commit(withPin(this.currentState, dataId, techniqueId));
      await this.refreshConflicts(signal, seq);
    } catch (err) {
      this.fail(err, seq);
    }
  }

  async unpin(dataId: string): Promise<void> {
    const { signal, seq } = this.begin();
    try {
      this.commit(withoutPin(this.currentState, dataId));
      await this.refreshConflicts(signal, seq);
    } catch (err) {
      this.fail(err, seq);
    }
  }

  /** Ask the service for ranked plans for the current scene. */
  async recommend(topN?: number): Promise<void> {
    if (this.currentState.scene.data_items.length === 0) {
      this.commit({
        ...this.currentState,
        lastError: {
          error: "empty_scene",
          message: "add at least one data item before recommending",
        },
      });
      return;
    }
    const wanted = topN ?? this.wantedTopN;
    const { signal, seq } = this.begin();
    try {
      const response = await this.api.recommend(this.currentState.scene, {
        ...(wanted === DEFAULT_TOP_N ? {} : { topN: wanted }),
        signal,
      });
      if (seq !== this.seq) return;
      this.commit({
        ...this.currentState,
        lastRecommendations: response,
        lastError: null,
      });
    } catch (err) {
      this.fail(err, seq);
    }
  }

  /** Pin every placement of a recommended plan at once, then re-check. */
  async adoptPlan(index: number): Promise<void> {
    const plan = this.currentState.lastRecommendations?.plans[index];
    if (!plan) return;
    const { signal, seq } = this.begin();
    try {
      this.commit(withAdoptedPlan(this.currentState, plan));
      await this.refreshConflicts(signal, seq);
    } catch (err) {
      this.fail(err, seq);
    }
  }

  private begin(): { signal: AbortSignal; seq: number } {
    this.inflight?.abort();
    this.inflight = new AbortController();
    this.seq += 1;
    return { signal: this.inflight.signal, seq: this.seq };
  }

  private commit(state: ComposerState): void {
    this.currentState = { ...state, lastError: state.lastError ?? null };
    this.onChange();
  }

  private fail(err: unknown, seq: number): void {
    if (isAbort(err) || seq !== this.seq) return;
    if (err instanceof ServiceError) {
      this.commit({ ...this.currentState, lastError: err.payload });
      return;
    }
    if (err instanceof Error) {
      this.commit({
        ...this.currentState,
        lastError: { error: "client", message: err.message },
      });
      return;
    }
    throw err;
  }

  /** Re-check the pinned set and probe every open candidate against it. */
  private async refreshConflicts(
    signal: AbortSignal,
    seq: number,
  ): Promise<void> {
    const state = this.currentState;
    if (state.pinned.size === 0) {
      // nothing pinned, nothing to conflict with; no service call needed
      this.commit({
        ...state,
        blocked: new Map(),
        lastCheck: null,
        lastError: null,
      });
      return;
    }
    const scene = state.scene;
    // the panel must never attribute a verdict to pins it was not
    // computed for; show "checking..." until the service answers
    this.commit({ ...state, lastCheck: null });
    const mainCheck = this.api.check(scene, pinnedPlacements(state), signal);
    const probes: Array<{ dataId: string; techniqueId: string }> = [];
    const probeChecks = [];
    for (const [dataId, options] of state.candidates) {
      const current = state.pinned.get(dataId)?.technique;
      for (const techniqueId of options) {
        if (techniqueId === current) continue;
        probes.push({ dataId, techniqueId });
        probeChecks.push(
          this.api.check(
            scene,
            hypotheticalPlacements(state, dataId, techniqueId),
            signal,
          ),
        );
      }
    }
    const [main, ...verdicts] = await Promise.all([mainCheck, ...probeChecks]);
    if (seq !== this.seq) return;
    const blocked = new Map<string, Map<string, string>>();
    probes.forEach((probe, i) => {
      const verdict = verdicts[i]!;
      if (verdict.valid) return;
      let forItem = blocked.get(probe.dataId);
      if (!forItem) {
        forItem = new Map();
        blocked.set(probe.dataId, forItem);
      }
      forItem.set(
        probe.techniqueId,
        verdict.conflicts.map((c) => c.message).join("\n"),
      );
    });
    this.commit({ ...state, blocked, lastCheck: main, lastError: null });
  }
}
