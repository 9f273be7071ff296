// Session state for the explorer.  All mutation goes through methods so
// the invariants hold: pending edits are validated before any request
// leaves the browser, and the displayed ranking is always exactly the
// last server response.

import { ApiClient, ServiceError } from "./api.js";
import type { EdgeEdit, GroundDoc, SceneDoc } from "./types.js";

export interface WeightTriple {
  alpha: number;
  beta: number;
  gamma: number;
}

export interface Banner {
  readonly kind: "error" | "info";
  readonly message: string;
}

/** null when the edit is acceptable, else a human-readable reason. */
export function editProblem(edit: EdgeEdit): string | null {
  if (edit.kind !== "vp" && edit.kind !== "po") return `unknown edge kind "${edit.kind}"`;
  if (!edit.from.trim() || !edit.to.trim()) return "both endpoints are required";
  if (!Number.isFinite(edit.weight) || edit.weight < 0 || edit.weight > 1) {
    return `weight ${edit.weight} outside [0, 1]`;
  }
  return null;
}

export class ExplorerState {
  sceneId: string | null = null;
  scene: SceneDoc | null = null;
  verb = "";
  weights: WeightTriple = { alpha: 1, beta: 1, gamma: 1 };
  pendingEdits: EdgeEdit[] = [];
  lastResult: { doc: GroundDoc; raw: string } | null = null;
  whatifResult: { doc: GroundDoc; raw: string } | null = null;
  selectedRoiId: string | null = null;
  kbVersion: number | null = null;
  banner: Banner | null = null;
  /** Index of the pending edit the server rejected, if any. */
  rejectedEditIndex: number | null = null;

  constructor(private readonly api: ApiClient) {}

  private weightsTuple(): [number, number, number] {
    return [this.weights.alpha, this.weights.beta, this.weights.gamma];
  }

  private report(err: unknown): void {
    const message = err instanceof Error ? err.message : String(err);
    this.banner = { kind: "error", message };
  }

  dismissBanner(): void {
    this.banner = null;
  }

  async loadScene(sceneId: string): Promise<void> {
    try {
      this.scene = await this.api.scene(sceneId);
      this.sceneId = sceneId;
      this.lastResult = null;
      this.whatifResult = null;
      this.selectedRoiId = null;
      this.kbVersion = await this.api.kbVersion();
    } catch (err) {
      this.report(err);
    }
  }

  /** Query the loaded scene; the response replaces the displayed ranking. */
  async ground(): Promise<void> {
    if (!this.sceneId) throw new Error("no scene loaded");
    try {
      this.lastResult = await this.api.ground({
        scene_id: this.sceneId,
        verb: this.verb,
        weights: this.weightsTuple(),
      });
      this.selectedRoiId = this.lastResult.doc.selected_roi_id;
    } catch (err) {
      this.report(err); // state preserved: lastResult untouched on failure
    }
  }

  /** Client-side gate: invalid edits never reach the network. */
  addPendingEdit(edit: EdgeEdit): string | null {
    const problem = editProblem(edit);
    if (problem === null) {
      this.pendingEdits.push(edit);
      this.rejectedEditIndex = null;
    }
    return problem;
  }

  removePendingEdit(index: number): void {
    this.pendingEdits.splice(index, 1);
    this.rejectedEditIndex = null;
  }

  /** Transient scoring; server KB version is untouched. */
  async whatif(): Promise<void> {
    if (!this.sceneId) throw new Error("no scene loaded");
    if (this.pendingEdits.length === 0) throw new Error("no pending edits");
    try {
      this.whatifResult = await this.api.whatif(
        { scene_id: this.sceneId, verb: this.verb, weights: this.weightsTuple() },
        this.pendingEdits,
      );
    } catch (err) {
      this.report(err);
    }
  }

  /**
   * Commit the pending batch.  On a 422 nothing was applied server-side;
   * the batch is kept and the offending edit (when the server names one)
   * is flagged for highlighting.
   */
  async commit(): Promise<void> {
    if (this.pendingEdits.length === 0) throw new Error("no pending edits");
    try {
      this.kbVersion = await this.api.commitEdits(this.pendingEdits);
      this.pendingEdits = [];
      this.whatifResult = null;
      this.rejectedEditIndex = null;
      await this.ground(); // refresh the ranking against the new KB
    } catch (err) {
      if (err instanceof ServiceError && err.status === 422) {
        this.rejectedEditIndex = this.findRejectedEdit(err.message);
      }
      this.report(err);
    }
  }

  private findRejectedEdit(message: string): number | null {
    const i = this.pendingEdits.findIndex(
      (e) => message.includes(e.from) || message.includes(e.to),
    );
    return i >= 0 ? i : null;
  }
}
