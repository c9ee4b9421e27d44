/** Ranked plans from the last /recommend call, each with an adopt button. */

import type { ComposerState } from "../state.js";
import { el } from "./dom.js";

export interface PlanActions {
  adopt(index: number): void;
}

export function planList(
  state: ComposerState,
  actions: PlanActions,
): HTMLElement {
  const section = el("section", { class: "plans" }, [
    el("h2", {}, ["Recommended plans"]),
  ]);
  const response = state.lastRecommendations;
  if (response === null) {
    section.append(el("p", { class: "empty" }, ["no recommendations yet"]));
    return section;
  }
  if (response.plans.length === 0) {
    section.append(
      el("p", { class: "empty" }, ["no compatible plan exists"]),
    );
    return section;
  }
  const list = el("ol", { class: "plan-list" });
  response.plans.forEach((plan, index) => {
    const placements = el(
      "ul",
      { class: "placements" },
      plan.placements.map((p) =>
        el("li", { "data-data": p.data, "data-slot": p.slot }, [
          `${p.data} → ${p.technique} @ ${p.slot} `,
          el("span", { class: "usability", "data-source": p.source }, [
            String(p.usability),
          ]),
        ]),
      ),
    );
    const adopt = el(
      "button",
      { class: "adopt", type: "button", "data-index": String(index) },
      ["adopt plan"],
    );
    adopt.addEventListener("click", () => actions.adopt(index));
    const entry = el("li", { class: "plan", "data-index": String(index) }, [
      el("span", { class: "plan-score" }, [String(plan.score)]),
      placements,
      adopt,
    ]);
    if (plan.warnings.length > 0) {
      entry.append(
        el(
          "ul",
          { class: "warnings" },
          plan.warnings.map((w) => el("li", {}, [w])),
        ),
      );
    }
    list.append(entry);
  });
  section.append(list);
  return section;
}
