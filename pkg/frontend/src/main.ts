/** Browser entry point: wire the composer to #app and load the KB. */

import { ApiClient } from "./api.js";
import { Composer } from "./controller.js";
import { renderApp } from "./view.js";

const DEFAULT_SERVICE = "http://localhost:8000";

function serviceBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("service");
  return fromQuery ?? DEFAULT_SERVICE;
}

const root = document.querySelector<HTMLElement>("#app");
if (!root) {
  throw new Error("missing #app container");
}

const api = new ApiClient(serviceBaseUrl());
const composer = new Composer(
  api,
  { data_items: [], task: "", context: "" },
  () => renderApp(root, composer),
);
renderApp(root, composer);
void composer.load();
