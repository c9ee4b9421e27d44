import { describe, expect, it } from "vitest";

import { ApiClient, isAbort, ServiceError } from "../src/api.js";
import type { SceneDoc } from "../src/types.js";
import { makeStubFetch, type StubEntry } from "./stubFetch.js";

const SCENE: SceneDoc = {
  data_items: [],
  task: "navigate",
  context: "inside-street",
};

const EMPTY_PLANS = { plans: [] };

describe("request shaping", () => {
  it("omits top_n at the service default and sends it otherwise", async () => {
    const stubs: StubEntry[] = [
      {
        method: "POST",
        path: "/recommend",
        body: SCENE,
        status: 200,
        response: EMPTY_PLANS,
      },
      {
        method: "POST",
        path: "/recommend",
        body: { ...SCENE, top_n: 2 },
        status: 200,
        response: EMPTY_PLANS,
      },
    ];
    const { fetch, calls } = makeStubFetch(stubs);
    const api = new ApiClient("http://kb.test", fetch);
    await api.recommend(SCENE);
    await api.recommend(SCENE, { topN: 2 });
    expect(calls[0]!.body).not.toHaveProperty("top_n");
    expect(calls[1]!.body).toMatchObject({ top_n: 2 });
  });

  it("tolerates a trailing slash in the base url", async () => {
    const stubs: StubEntry[] = [
      {
        method: "GET",
        path: "/techniques",
        body: null,
        status: 200,
        response: [],
      },
    ];
    const { fetch } = makeStubFetch(stubs);
    const api = new ApiClient("http://kb.test/", fetch);
    await expect(api.techniques()).resolves.toEqual([]);
  });

  it("wraps check placements in a plan envelope", async () => {
    const stubs: StubEntry[] = [
      {
        method: "POST",
        path: "/check",
        body: {
          scene: SCENE,
          plan: { placements: [{ data: "vt:A", technique: "vt:T" }] },
        },
        status: 200,
        response: { valid: true, conflicts: [], score: 1.0 },
      },
    ];
    const { fetch } = makeStubFetch(stubs);
    const api = new ApiClient("http://kb.test", fetch);
    const result = await api.check(SCENE, [
      { data: "vt:A", technique: "vt:T" },
    ]);
    expect(result.valid).toBe(true);
  });
});

describe("error mapping", () => {
  it("turns non-2xx JSON payloads into ServiceError", async () => {
    const payload = {
      error: "parse_error",
      line: 1,
      column: 8,
      message: "line 1, column 8: expected a variable",
      expected: ["variable"],
    };
    const { fetch } = makeStubFetch([
      {
        method: "GET",
        path: "/kb/summary",
        body: null,
        status: 400,
        response: payload,
      },
    ]);
    const api = new ApiClient("http://kb.test", fetch);
    const failure = await api.summary().catch((err) => err);
    expect(failure).toBeInstanceOf(ServiceError);
    expect(failure.status).toBe(400);
    expect(failure.payload).toEqual(payload);
    expect(failure.message).toBe(payload.message);
  });

  it("survives an unreadable error body", async () => {
    const broken: typeof fetch = async () =>
      new Response("not json", { status: 502, statusText: "Bad Gateway" });
    const api = new ApiClient("http://kb.test", (url, init) =>
      broken(url, init),
    );
    const failure = await api.summary().catch((err) => err);
    expect(failure).toBeInstanceOf(ServiceError);
    expect(failure.payload.error).toBe("unreadable");
  });

  it("recognizes aborts distinctly from failures", () => {
    expect(isAbort(new DOMException("stop", "AbortError"))).toBe(true);
    expect(isAbort(new Error("boom"))).toBe(false);
    expect(isAbort("nope")).toBe(false);
  });
});
