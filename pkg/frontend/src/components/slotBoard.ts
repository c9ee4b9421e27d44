/** Where the pinned techniques land: anchor-slot badges per urban object.
 *
 * The slot shown is the placement's explicit slot when it has one
 * (adopted plans carry slots) and the technique's declared slot
 * otherwise; both values come from service responses.
 */

import type { ComposerState } from "../state.js";
import type { TechniqueDoc } from "../types.js";
import { el } from "./dom.js";

export function slotBoard(
  state: ComposerState,
  techniques: ReadonlyMap<string, TechniqueDoc>,
): HTMLElement {
  const board = el("section", { class: "slot-board" }, [
    el("h2", {}, ["Scene placements"]),
  ]);
  if (state.pinned.size === 0) {
    board.append(el("p", { class: "empty" }, ["nothing placed yet"]));
    return board;
  }
  const itemsById = new Map(
    state.scene.data_items.map((item) => [item.id, item]),
  );
  const groups = new Map<string, HTMLElement>();
  for (const placement of state.pinned.values()) {
    const item = itemsById.get(placement.data);
    const objectId = item?.urban_object ?? "(unanchored)";
    let group = groups.get(objectId);
    if (!group) {
      group = el("div", { class: "object-slots", "data-object": objectId }, [
        el("h4", {}, [objectId]),
      ]);
      groups.set(objectId, group);
      board.append(group);
    }
    const slot =
      placement.slot ??
      techniques.get(placement.technique)?.output_location.anchor_slot ??
      "?";
    group.append(
      el(
        "span",
        { class: "slot-badge", "data-slot": slot, "data-data": placement.data },
        [`${slot} · ${placement.technique}`],
      ),
    );
  }
  return board;
}
