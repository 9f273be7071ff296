// Pure HTML renderers.  Every function maps server documents to markup
// strings; the only numbers ever printed are server response fields,
// rendered with the canonical formatter so they match the payload bytes.
// Bar widths and box coordinates are layout only.

import { formatEnergy } from "./format.js";
import type { Banner } from "./state.js";
import type { EdgeEdit, Energy, GroundDoc, RankedEntry, SceneDoc } from "./types.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Layout-only bar length in [0, 100] for a bounded-ish energy. */
function barWidth(v: Energy): number {
  if (typeof v === "string") return 100;
  const clamped = Math.max(-2, Math.min(2, v));
  return Math.abs(clamped) * 50;
}

function barClass(v: Energy): string {
  if (typeof v === "string") return "bar inf";
  return v < 0 ? "bar favorable" : "bar unfavorable";
}

function termRow(label: string, v: Energy): string {
  return (
    `<div class="term"><span class="term-label">${label}</span>` +
    `<span class="${barClass(v)}" style="width:${barWidth(v)}%"></span>` +
    `<span class="term-value">${formatEnergy(v)}</span></div>`
  );
}

export function renderEntry(entry: RankedEntry, rank: number, selected: boolean): string {
  const cls = selected ? "candidate selected" : "candidate";
  const flag = entry.ungraspable ? ' <span class="ungraspable">ungraspable</span>' : "";
  return (
    `<li class="${cls}" data-roi="${escapeHtml(entry.roi_id)}">` +
    `<div class="head"><span class="rank">#${rank}</span>` +
    `<span class="roi">${escapeHtml(entry.roi_id)}</span>${flag}` +
    `<span class="total">${formatEnergy(entry.e_total)}</span></div>` +
    termRow("grasp", entry.e_grasp) +
    termRow("affordance", entry.e_aff) +
    termRow("alignment", entry.e_align) +
    `</li>`
  );
}

/** Candidates in exactly the server's order, winner first. */
export function renderRanking(doc: GroundDoc, selectedRoiId: string | null): string {
  const items = doc.ranked
    .map((e, i) => renderEntry(e, i + 1, e.roi_id === selectedRoiId))
    .join("");
  return (
    `<div class="ranking" data-verb="${escapeHtml(doc.verb)}"` +
    ` data-winner="${escapeHtml(doc.selected_roi_id)}"><ol>${items}</ol></div>`
  );
}

/** Bounding boxes to scale on a neutral canvas; no image payloads. */
export function renderSceneOverlay(scene: SceneDoc, selectedRoiId: string | null): string {
  const xs = scene.candidates.flatMap((c) => [c.bbox[0], c.bbox[0] + c.bbox[2]]);
  const ys = scene.candidates.flatMap((c) => [c.bbox[1], c.bbox[1] + c.bbox[3]]);
  const pad = 10;
  const minX = Math.min(...xs) - pad;
  const minY = Math.min(...ys) - pad;
  const width = Math.max(...xs) + pad - minX;
  const height = Math.max(...ys) + pad - minY;
  const boxes = scene.candidates
    .map((c) => {
      const cls = c.roi_id === selectedRoiId ? "bbox selected" : "bbox";
      const label = c.hypothesis_label
        ? `${c.roi_id} (${c.hypothesis_label})`
        : c.roi_id;
      return (
        `<rect class="${cls}" x="${c.bbox[0]}" y="${c.bbox[1]}"` +
        ` width="${c.bbox[2]}" height="${c.bbox[3]}" data-roi="${escapeHtml(c.roi_id)}"/>` +
        `<text x="${c.bbox[0]}" y="${c.bbox[1] - 2}">${escapeHtml(label)}</text>`
      );
    })
    .join("");
  return (
    `<svg class="scene" viewBox="${minX} ${minY} ${width} ${height}"` +
    ` role="img" aria-label="scene ${escapeHtml(scene.scene_id)}">${boxes}</svg>`
  );
}

/** verb -> property -> object edges with weight labels, served order. */
export function renderPaths(verb: string, entry: RankedEntry): string {
  if (entry.paths.length === 0) {
    return `<p class="no-paths">no connecting properties</p>`;
  }
  const rows = entry.paths
    .map(
      (p) =>
        `<li class="path">` +
        `<span class="node verb">${escapeHtml(verb)}</span>` +
        `<span class="edge">${formatEnergy(p.w_vp)}</span>` +
        `<span class="node property">${escapeHtml(p.property)}</span>` +
        `<span class="edge">${formatEnergy(p.w_po)}</span>` +
        `<span class="node object">${escapeHtml(p.object)}</span>` +
        `<span class="contribution">${formatEnergy(p.contribution)}</span>` +
        `</li>`,
    )
    .join("");
  return `<ul class="paths">${rows}</ul>`;
}

/** Side-by-side current vs what-if rankings. */
export function renderComparison(before: GroundDoc, after: GroundDoc): string {
  return (
    `<div class="comparison">` +
    `<section class="before"><h3>current</h3>${renderRanking(before, before.selected_roi_id)}</section>` +
    `<section class="after"><h3>what-if${after.transient ? "" : " (committed)"}</h3>` +
    `${renderRanking(after, after.selected_roi_id)}</section></div>`
  );
}

export function renderBanner(banner: Banner | null): string {
  if (!banner) return "";
  return (
    `<div class="banner ${banner.kind}" role="alert">` +
    `<span>${escapeHtml(banner.message)}</span>` +
    `<button class="dismiss" type="button">dismiss</button></div>`
  );
}

export function renderVersion(version: number | null): string {
  const text = version === null ? "–" : String(version);
  return `<span class="kb-version" data-version="${text}">KB v${text}</span>`;
}

export function renderPendingEdits(edits: readonly EdgeEdit[], rejectedIndex: number | null): string {
  if (edits.length === 0) return `<p class="no-edits">no pending edits</p>`;
  const rows = edits
    .map((e, i) => {
      const cls = i === rejectedIndex ? "edit rejected" : "edit";
      return (
        `<li class="${cls}">${e.kind} ${escapeHtml(e.from)} → ` +
        `${escapeHtml(e.to)} = ${formatEnergy(e.weight)}` +
        `<button class="remove" data-index="${i}" type="button">remove</button></li>`
      );
    })
    .join("");
  return `<ul class="pending">${rows}</ul>`;
}
