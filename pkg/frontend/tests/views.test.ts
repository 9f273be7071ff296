// Rendering: order and numbers must echo the server payload exactly;
// the views never compute energies.

import { describe, expect, it } from "vitest";
import {
  renderBanner,
  renderComparison,
  renderPaths,
  renderPendingEdits,
  renderRanking,
  renderSceneOverlay,
  renderVersion,
} from "../src/views.js";
import type { GroundDoc, RankedEntry, SceneDoc } from "../src/types.js";
import { fixture } from "./helpers.js";

const groundWrite = JSON.parse(fixture("ground_write.json")) as GroundDoc;
const preflip = JSON.parse(fixture("ground_preflip.json")) as GroundDoc;
const whatifFlip = JSON.parse(fixture("whatif_flip.json")) as GroundDoc;
const scene = JSON.parse(fixture("scene_desk.json")) as SceneDoc;

function roiOrder(html: string): string[] {
  return [...html.matchAll(/<li class="candidate[^"]*" data-roi="([^"]+)"/g)].map(
    (m) => m[1],
  );
}

/** Raw wire token for a field, e.g. `"e_total":-0.889694238`.  Keys in
 * the canonical payload are sorted, so the energies precede roi_id
 * within each ranked entry. */
function rawToken(raw: string, roi: string, field: string): string {
  const entry = raw
    .split('{"e_aff":')
    .slice(1)
    .map((part) => '"e_aff":' + part)
    .find((part) => part.includes(`"roi_id":"${roi}"`));
  const m = entry ? new RegExp(`"${field}":("?[^,}"]+"?)`).exec(entry) : null;
  if (!m) throw new Error(`${field} for ${roi} not in payload`);
  return m[1].replace(/"/g, "");
}

describe("renderRanking", () => {
  it("lists candidates in exactly the server order", () => {
    const html = renderRanking(groundWrite, null);
    expect(roiOrder(html)).toEqual(groundWrite.ranked.map((e) => e.roi_id));
    expect(html).toContain('data-winner="roi_a"');
  });

  it("displays every energy byte-identically to the payload", () => {
    const raw = fixture("ground_write.json");
    const html = renderRanking(groundWrite, null);
    for (const entry of groundWrite.ranked) {
      for (const field of ["e_grasp", "e_aff", "e_align", "e_total"]) {
        expect(html).toContain(`>${rawToken(raw, entry.roi_id, field)}<`);
      }
    }
  });

  it("marks the selected candidate", () => {
    const html = renderRanking(groundWrite, "roi_b");
    expect(html).toContain('class="candidate selected" data-roi="roi_b"');
    expect(html).toContain('class="candidate" data-roi="roi_a"');
  });
});

describe("renderPaths", () => {
  it("draws two edges per path with weight labels, served order", () => {
    const winner = groundWrite.ranked[0];
    const html = renderPaths("write", winner);
    const props = [...html.matchAll(/class="node property">([^<]+)</g)].map((m) => m[1]);
    expect(props).toEqual(winner.paths.map((p) => p.property));
    expect(html).toContain('<span class="node verb">write</span>');
    expect(html).toContain(">0.9<"); // w_vp of the strongest path
    expect(html).toContain(">0.8<"); // its w_po
  });

  it("shows a placeholder for a candidate with no connecting properties", () => {
    const loser = groundWrite.ranked.find((e) => e.paths.length === 0)!;
    expect(renderPaths("write", loser)).toContain("no connecting properties");
  });

  it("echoes a three-path breakdown without reordering", () => {
    const entry: RankedEntry = {
      roi_id: "r",
      e_grasp: 0.1,
      e_aff: -0.5,
      e_align: 0,
      e_total: -0.4,
      ungraspable: false,
      paths: [
        { property: "p3", object: "o", w_vp: 0.9, w_po: 0.9, contribution: 1.8 },
        { property: "p1", object: "o", w_vp: 0.5, w_po: 0.5, contribution: 1 },
        { property: "p2", object: "o", w_vp: 0.1, w_po: 0.1, contribution: 0.2 },
      ],
    };
    const props = [...renderPaths("v", entry).matchAll(/class="node property">([^<]+)</g)];
    expect(props.map((m) => m[1])).toEqual(["p3", "p1", "p2"]);
  });
});

describe("renderComparison", () => {
  it("shows before and after winners side by side", () => {
    const html = renderComparison(preflip, whatifFlip);
    const winners = [...html.matchAll(/data-winner="([^"]+)"/g)].map((m) => m[1]);
    expect(winners).toEqual(["roi_a", "roi_b"]);
    expect(html).toContain("<h3>what-if</h3>");
  });
});

describe("renderSceneOverlay", () => {
  it("draws one box per candidate, to scale, with labels", () => {
    const html = renderSceneOverlay(scene, "roi_a");
    expect(html).toContain('x="10" y="10" width="40" height="40"');
    expect(html).toContain('x="60" y="10" width="40" height="40"');
    expect(html).toContain('class="bbox selected" x="10"');
    expect(html).toContain("roi_a (pen)");
  });
});

describe("chrome", () => {
  it("renders banner, version indicator, and pending edits", () => {
    expect(renderBanner({ kind: "error", message: "unknown verb 'x'" })).toContain(
      "unknown verb 'x'",
    );
    expect(renderBanner(null)).toBe("");
    expect(renderVersion(3)).toContain("KB v3");
    expect(renderVersion(null)).toContain("KB v–");

    const html = renderPendingEdits(
      [
        { kind: "po", from: "tip_shaped", to: "pen", weight: 0.05 },
        { kind: "vp", from: "write", to: "sharp", weight: 0.5 },
      ],
      1,
    );
    expect(html).toContain("tip_shaped → pen = 0.05");
    expect(html).toContain('class="edit rejected"');
    expect(renderPendingEdits([], null)).toContain("no pending edits");
  });
});
