/** Verdict, score, and conflicts of the last /check round-trip.
 *
 * Numbers are rendered exactly as the service sent them; no local
 * rounding, so what is on screen is always traceable to a response.
 */

import type { ComposerState } from "../state.js";
import { el } from "./dom.js";

export function checkPanel(state: ComposerState): HTMLElement {
  const panel = el("section", { class: "check-panel" }, [
    el("h2", {}, ["Plan check"]),
  ]);
  if (state.lastCheck === null) {
    panel.append(
      el("p", { class: "empty" }, [
        state.pinned.size === 0
          ? "nothing pinned; no conflicts possible"
          : "checking...",
      ]),
    );
    return panel;
  }
  const { valid, score, conflicts } = state.lastCheck;
  panel.append(
    el("p", { class: valid ? "status valid" : "status invalid" }, [
      valid ? "pinned plan is valid" : "pinned plan has conflicts",
    ]),
    el("p", { class: "score" }, [
      "score ",
      el("span", { class: "value" }, [String(score)]),
    ]),
  );
  if (conflicts.length > 0) {
    panel.append(
      el(
        "ul",
        { class: "conflicts" },
        conflicts.map((conflict) =>
          el(
            "li",
            { "data-rule": conflict.rule, "data-severity": conflict.severity },
            [conflict.message],
          ),
        ),
      ),
    );
  }
  return panel;
}
