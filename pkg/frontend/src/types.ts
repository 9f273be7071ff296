// Wire types for the grounding service v1 API.  Fields mirror the
// canonical JSON documents exactly; the UI never derives numbers from
// them, it only displays them.

/** Non-finite energies arrive as the strings "inf" / "-inf". */
export type Energy = number | "inf" | "-inf";

export interface GroundingPath {
  readonly property: string;
  readonly object: string;
  readonly w_vp: number;
  readonly w_po: number;
  readonly contribution: number;
}

export interface RankedEntry {
  readonly roi_id: string;
  readonly e_grasp: Energy;
  readonly e_aff: Energy;
  readonly e_align: Energy;
  readonly e_total: Energy;
  readonly ungraspable: boolean;
  readonly paths: readonly GroundingPath[];
}

export interface Weights {
  readonly alpha: number;
  readonly beta: number;
  readonly gamma: number;
}

export interface GroundDoc {
  readonly format: "affresult/1";
  readonly verb: string;
  readonly selected_roi_id: string;
  readonly kb_version: number;
  readonly weights: Weights;
  readonly ranked: readonly RankedEntry[];
  readonly transient?: boolean;
}

export interface SceneCandidateDoc {
  readonly roi_id: string;
  readonly bbox: readonly [number, number, number, number];
  readonly embedding_id: string;
  readonly hypothesis_label?: string;
}

export interface SceneDoc {
  readonly format: "affscene/1";
  readonly scene_id: string;
  readonly candidates: readonly SceneCandidateDoc[];
}

export type EdgeKind = "vp" | "po";

export interface EdgeEdit {
  readonly kind: EdgeKind;
  readonly from: string;
  readonly to: string;
  readonly weight: number;
}

export interface ApiError {
  readonly status: number;
  readonly message: string;
}
