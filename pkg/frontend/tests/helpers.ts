// Test doubles: fixture loading and a fetch stand-in that replays the
// byte payloads captured from the real service (see fixtures/
// generate_fixtures.py), with just enough state for version tracking.

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import type { FetchLike } from "../src/api.js";

export function fixture(name: string): string {
  return readFileSync(
    fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url)),
    "utf-8",
  );
}

export const manifest = JSON.parse(fixture("manifest.json")) as {
  statuses: Record<string, number>;
  flip_weights: [number, number, number];
  flip_edits: { kind: string; from: string; to: string; weight: number }[];
};

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
}

function reply(text: string, status = 200): Response {
  return new Response(text, {
    status,
    headers: { "content-type": "application/json" },
  });
}

const FLIP_KEY = JSON.stringify(manifest.flip_weights);

/**
 * Replays captured service payloads.  Grounding responses depend on the
 * committed state exactly as the live server's did: before the flip
 * commit they come from the version-1 captures, afterwards from the
 * version-2 capture.
 */
export class MockServer {
  readonly requests: RecordedRequest[] = [];
  version = 1;

  readonly fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    this.requests.push({ url, method, body });
    return this.route(url, method, body);
  };

  private route(url: string, method: string, body: any): Response {
    if (url.endsWith("/v1/kb/version")) return reply(JSON.stringify({ version: this.version }));
    if (url.endsWith("/v1/health")) return reply(fixture("health.json"));
    if (url.endsWith("/v1/scenes")) return reply(JSON.stringify(["desk"]));
    if (url.endsWith("/v1/scenes/desk")) return reply(fixture("scene_desk.json"));
    if (url.endsWith("/v1/kb")) return reply(fixture("kb_v1.json"));
    if (url.endsWith("/v1/ground") && method === "POST") return this.ground(body);
    if (url.endsWith("/v1/whatif") && method === "POST") {
      return reply(fixture("whatif_flip.json"));
    }
    if (url.endsWith("/v1/kb/edges") && method === "PATCH") return this.patch(body);
    return reply(JSON.stringify({ error: `no route for ${method} ${url}` }), 404);
  }

  private ground(body: any): Response {
    if (body.verb !== "write") {
      return reply(fixture("ground_unknown_verb.json"), 404);
    }
    if (JSON.stringify(body.weights ?? null) === FLIP_KEY) {
      return this.version >= 2
        ? reply(fixture("ground_after_commit.json"))
        : reply(fixture("ground_preflip.json"));
    }
    return reply(fixture("ground_write.json"));
  }

  private patch(body: any): Response {
    const bad = (body.edits as any[]).some(
      (e) => e.weight < 0 || e.weight > 1 || e.from === "no_such_property",
    );
    if (bad) return reply(fixture("invalid_edit_422.json"), 422);
    this.version += 1;
    return reply(JSON.stringify({ new_version: this.version }));
  }
}
