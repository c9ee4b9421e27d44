/** Form for adding a data item, with dropdowns fed by the KB summary. */

import type { DataItemDoc, Geolocation, SummaryDoc } from "../types.js";
import { el } from "./dom.js";

export interface FormActions {
  addItem(item: DataItemDoc): void;
}

const GEO_KINDS = [
  "Coordinates2D",
  "Coordinates3D",
  "GeoName",
  "ObjectAnchored",
] as const;

function select(
  name: string,
  options: readonly string[],
  allowEmpty = false,
): HTMLSelectElement {
  const node = el("select", { name });
  if (allowEmpty) {
    node.append(el("option", { value: "" }, ["(none)"]));
  }
  for (const option of options) {
    node.append(el("option", { value: option }, [option]));
  }
  return node;
}

function labeled(label: string, control: HTMLElement): HTMLElement {
  return el("label", { class: "field" }, [label + " ", control]);
}

function numberInput(name: string): HTMLInputElement {
  return el("input", { name, type: "number", step: "any", value: "0" });
}

export function itemForm(
  summary: SummaryDoc,
  actions: FormActions,
): HTMLFormElement {
  const idInput = el("input", {
    name: "id",
    type: "text",
    placeholder: "vt:MyDataItem",
    required: true,
  });
  const typeSelect = select("data_type", summary.data_types);
  const issueSelect = select("issue", summary.issues);
  const objectSelect = select("urban_object", summary.urban_objects, true);
  const kindSelect = select("geo_kind", GEO_KINDS);
  const x = numberInput("x");
  const y = numberInput("y");
  const z = numberInput("z");
  const geoName = el("input", { name: "geo_name", type: "text" });
  const formatInput = el("input", { name: "format", type: "text" });

  const form = el("form", { class: "item-form" }, [
    el("h2", {}, ["Add data item"]),
    labeled("id", idInput),
    labeled("data type", typeSelect),
    labeled("issue", issueSelect),
    labeled("urban object", objectSelect),
    labeled("location kind", kindSelect),
    labeled("x", x),
    labeled("y", y),
    labeled("z", z),
    labeled("place name", geoName),
    labeled("format", formatInput),
    el("button", { type: "submit" }, ["add item"]),
  ]);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (!idInput.value) return;
    let geolocation: Geolocation;
    switch (kindSelect.value) {
      case "Coordinates2D":
        geolocation = { kind: "Coordinates2D", x: +x.value, y: +y.value };
        break;
      case "Coordinates3D":
        geolocation = {
          kind: "Coordinates3D",
          x: +x.value,
          y: +y.value,
          z: +z.value,
        };
        break;
      case "GeoName":
        geolocation = { kind: "GeoName", name: geoName.value };
        break;
      default:
        geolocation = {
          kind: "ObjectAnchored",
          object: objectSelect.value || geoName.value,
        };
    }
    const item: DataItemDoc = {
      id: idInput.value,
      data_type: typeSelect.value,
      issue: issueSelect.value,
      geolocation,
    };
    if (objectSelect.value) item.urban_object = objectSelect.value;
    if (formatInput.value) item.format = formatInput.value;
    actions.addItem(item);
  });
  return form;
}
