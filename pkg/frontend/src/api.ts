// Thin typed client for the grounding service v1 endpoints.  The fetch
// implementation is injectable so tests can intercept every request.

import type { EdgeEdit, GroundDoc, SceneDoc } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface GroundRequest {
  readonly scene_id: string;
  readonly verb: string;
  readonly weights?: readonly [number, number, number];
  readonly kb_version?: number;
}

export class ServiceError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function fail(res: Response): Promise<never> {
  let message = `${res.status}`;
  try {
    const body = await res.json();
    if (typeof body?.error === "string") message = body.error;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ServiceError(res.status, message);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async get(path: string): Promise<Response> {
    const res = await this.fetchImpl(this.baseUrl + path);
    return res.ok ? res : fail(res);
  }

  private async send(method: string, path: string, body: unknown): Promise<Response> {
    const res = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return res.ok ? res : fail(res);
  }

  async kbVersion(): Promise<number> {
    const res = await this.get("/v1/kb/version");
    return (await res.json()).version;
  }

  async kbDocument(): Promise<string> {
    return (await this.get("/v1/kb")).text();
  }

  async listScenes(): Promise<string[]> {
    return (await this.get("/v1/scenes")).json();
  }

  async scene(sceneId: string): Promise<SceneDoc> {
    return (await this.get(`/v1/scenes/${encodeURIComponent(sceneId)}`)).json();
  }

  /** Raw text is kept alongside the parse for byte-fidelity checks. */
  async ground(req: GroundRequest): Promise<{ doc: GroundDoc; raw: string }> {
    const res = await this.send("POST", "/v1/ground", req);
    const raw = await res.text();
    return { doc: JSON.parse(raw) as GroundDoc, raw };
  }

  async whatif(
    req: GroundRequest,
    edits: readonly EdgeEdit[],
  ): Promise<{ doc: GroundDoc; raw: string }> {
    const res = await this.send("POST", "/v1/whatif", { ...req, edits });
    const raw = await res.text();
    return { doc: JSON.parse(raw) as GroundDoc, raw };
  }

  async commitEdits(edits: readonly EdgeEdit[]): Promise<number> {
    const res = await this.send("PATCH", "/v1/kb/edges", { edits });
    return (await res.json()).new_version;
  }
}
