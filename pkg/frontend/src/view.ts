/** Full re-render of the composer into a root element.
 *
 * The view is a pure function of the composer's state; event handlers
 * call back into the composer, whose onChange triggers the next render.
 */

import type { Composer } from "./controller.js";
import { checkPanel } from "./components/checkPanel.js";
import { el } from "./components/dom.js";
import { itemCard } from "./components/itemCard.js";
import { itemForm } from "./components/itemForm.js";
import { planList } from "./components/planList.js";
import { slotBoard } from "./components/slotBoard.js";

function header(composer: Composer): HTMLElement {
  const summary = composer.summary;
  const node = el("header", { class: "app-header" }, [
    el("h1", {}, ["Scene composer"]),
  ]);
  if (!summary) {
    node.append(el("p", { class: "kb-stats" }, ["loading knowledge base..."]));
    return node;
  }
  node.append(
    el("p", { class: "kb-stats" }, [
      `${summary.concept_count} concepts, ` +
        `${summary.individual_count} individuals, ` +
        `${summary.techniques.length} techniques, ` +
        `${summary.rules.length} rules`,
    ]),
  );
  if (summary.violations.length > 0) {
    node.append(
      el("p", { class: "kb-violations" }, [
        `${summary.violations.length} knowledge-base violations`,
      ]),
    );
  }
  return node;
}

function toolbar(composer: Composer): HTMLElement {
  const summary = composer.summary;
  const scene = composer.state.scene;
  const bar = el("section", { class: "toolbar" });
  if (summary) {
    const task = el("select", { class: "task" });
    for (const name of summary.tasks) {
      task.append(
        el(
          "option",
          name === scene.task
            ? { value: name, selected: true }
            : { value: name },
          [name],
        ),
      );
    }
    const context = el("select", { class: "context" });
    for (const name of summary.contexts) {
      context.append(
        el(
          "option",
          name === scene.context
            ? { value: name, selected: true }
            : { value: name },
          [name],
        ),
      );
    }
    const retarget = () => void composer.setTaskContext(task.value, context.value);
    task.addEventListener("change", retarget);
    context.addEventListener("change", retarget);
    bar.append(
      el("label", { class: "field" }, ["task ", task]),
      el("label", { class: "field" }, ["context ", context]),
    );
  }

  const slider = el("input", {
    class: "top-n",
    type: "range",
    min: "1",
    max: "10",
    value: String(composer.topN),
  });
  slider.addEventListener("change", () => composer.setTopN(+slider.value));
  const recommend = el(
    "button",
    {
      class: "recommend",
      type: "button",
      ...(composer.state.scene.data_items.length === 0
        ? { disabled: true }
        : {}),
    },
    ["recommend"],
  );
  recommend.addEventListener("click", () => void composer.recommend());
  bar.append(
    el("label", { class: "field" }, [
      `top ${composer.topN} `,
      slider,
    ]),
    recommend,
    el("details", { class: "scene-export" }, [
      el("summary", {}, ["scene JSON"]),
      el("pre", {}, [composer.exportScene()]),
    ]),
  );
  return bar;
}

export function renderApp(root: HTMLElement, composer: Composer): void {
  const state = composer.state;
  const actions = {
    pin: (dataId: string, techniqueId: string) =>
      void composer.pin(dataId, techniqueId),
    unpin: (dataId: string) => void composer.unpin(dataId),
    adopt: (index: number) => void composer.adoptPlan(index),
  };

  const items = el("section", { class: "items" }, [
    el("h2", {}, ["Data items"]),
  ]);
  for (const item of state.scene.data_items) {
    items.append(itemCard(item, state, composer.techniques, actions));
  }
  if (composer.summary) {
    items.append(
      itemForm(composer.summary, {
        addItem: (item) => void composer.addItem(item),
      }),
    );
  }

  const children: HTMLElement[] = [header(composer), toolbar(composer)];
  if (state.lastError) {
    children.push(
      el(
        "div",
        { class: "error-banner", "data-error": state.lastError.error },
        [state.lastError.message],
      ),
    );
  }
  children.push(
    items,
    checkPanel(state),
    planList(state, actions),
    slotBoard(state, composer.techniques),
  );
  root.replaceChildren(...children);
}
