/** One data item: its facets, feasibility, and the candidate list.
 *
 * A candidate button is disabled exactly when a hypothetical check
 * against the current pins came back invalid; the service's conflict
 * message becomes the tooltip. The pinned candidate toggles off on a
 * second click.
 */

import type { ComposerState } from "../state.js";
import type { DataItemDoc, Geolocation, TechniqueDoc } from "../types.js";
import { el } from "./dom.js";

export interface ItemActions {
  pin(dataId: string, techniqueId: string): void;
  unpin(dataId: string): void;
}

function describeLocation(geo: Geolocation): string {
  switch (geo.kind) {
    case "Coordinates2D":
      return `at (${geo.x}, ${geo.y})`;
    case "Coordinates3D":
      return `at (${geo.x}, ${geo.y}, ${geo.z})`;
    case "GeoName":
      return `at "${geo.name}"`;
    case "ObjectAnchored":
      return `anchored to ${geo.object}`;
  }
}

function candidateLabel(
  techniqueId: string,
  techniques: ReadonlyMap<string, TechniqueDoc>,
): string {
  return techniques.get(techniqueId)?.visualization_abstraction ?? techniqueId;
}

export function itemCard(
  item: DataItemDoc,
  state: ComposerState,
  techniques: ReadonlyMap<string, TechniqueDoc>,
  actions: ItemActions,
): HTMLElement {
  const candidates = state.candidates.get(item.id);
  const pinnedTechnique = state.pinned.get(item.id)?.technique;
  const blockedForItem = state.blocked.get(item.id);

  const facets = el("ul", { class: "facets" }, [
    el("li", {}, [`type ${item.data_type}`]),
    el("li", {}, [`issue ${item.issue}`]),
    el("li", {}, [describeLocation(item.geolocation)]),
  ]);
  if (item.urban_object) {
    facets.append(el("li", {}, [`on ${item.urban_object}`]));
  }

  const card = el("article", { class: "item-card", "data-item": item.id }, [
    el("h3", {}, [item.id]),
    facets,
  ]);

  const infeasibleFromRecommend =
    state.lastError?.error === "infeasible_item" &&
    state.lastError.data === item.id;
  if ((candidates && candidates.length === 0) || infeasibleFromRecommend) {
    card.append(
      el("span", { class: "badge infeasible" }, [
        state.lastError?.error === "infeasible_item" &&
        state.lastError.data === item.id
          ? state.lastError.message
          : "no compatible technique",
      ]),
    );
  }
  if (!candidates) {
    card.append(el("p", { class: "loading" }, ["loading candidates..."]));
    return card;
  }

  const list = el("ul", { class: "candidates" });
  for (const techniqueId of candidates) {
    const isPinned = techniqueId === pinnedTechnique;
    const conflictMessage = blockedForItem?.get(techniqueId);
    const attrs: Record<string, string | boolean> = {
      class:
        "candidate" +
        (isPinned ? " pinned" : "") +
        (conflictMessage !== undefined ? " blocked" : ""),
      type: "button",
      "data-technique": techniqueId,
      "aria-pressed": isPinned ? "true" : "false",
    };
    if (conflictMessage !== undefined) {
      attrs["disabled"] = true;
      attrs["title"] = conflictMessage;
    }
    const button = el("button", attrs, [
      candidateLabel(techniqueId, techniques),
    ]);
    button.addEventListener("click", () => {
      if (isPinned) {
        actions.unpin(item.id);
      } else {
        actions.pin(item.id, techniqueId);
      }
    });
    list.append(el("li", {}, [button]));
  }
  card.append(list);
  return card;
}
