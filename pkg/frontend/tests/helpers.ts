/** Recorded-response transport for driving the client without a server. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function loadFixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8")) as T;
}

export function loadText(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/**
 * Replays responses recorded from a live service. Routes on method + path;
 * graph builds dispatch on the requested epsilon (0.12 fine, 0.3 coarse).
 */
export function fixtureFetch(): FetchLike {
  const dataset = loadFixture("dataset.json");
  const fine = loadFixture<{ id: string }>("build_fine.json");
  const coarse = loadFixture<{ id: string }>("build_coarse.json");
  const coloring = loadFixture("coloring_arm.json");
  const compare = loadFixture("compare_leaves.json");
  const summary = loadFixture("summary.json");

  return async (url, init) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    if (method === "POST" && path === "/datasets") {
      return jsonResponse(dataset, 201);
    }
    if (method === "GET" && path === "/datasets/ds-0") {
      return jsonResponse(dataset);
    }
    if (method === "POST" && path === "/datasets/ds-0/graphs") {
      const body = JSON.parse(String(init?.body));
      return jsonResponse(body.epsilon === 0.3 ? coarse : fine, 201);
    }
    if (method === "GET" && path === `/graphs/${fine.id}`) {
      return jsonResponse(fine);
    }
    if (method === "GET" && path === `/graphs/${coarse.id}`) {
      return jsonResponse(coarse);
    }
    if (method === "GET" && path === `/graphs/${fine.id}/colorings/arm`) {
      return jsonResponse(coloring);
    }
    if (method === "POST" && path === `/graphs/${fine.id}/compare`) {
      return jsonResponse(compare);
    }
    if (method === "GET" && path === `/graphs/${fine.id}/summary`) {
      return jsonResponse(summary);
    }
    return jsonResponse(
      { code: "not_found", message: `no fixture for ${method} ${path}`, detail: null },
      404,
    );
  };
}
