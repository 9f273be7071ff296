// DOM wiring: binds the pure renderers and the session state to the
// page.  All logic lives in state.ts / views.ts so it stays testable
// without a browser.

import { ApiClient } from "./api.js";
import { ExplorerState } from "./state.js";
import {
  renderBanner,
  renderComparison,
  renderPaths,
  renderPendingEdits,
  renderRanking,
  renderSceneOverlay,
  renderVersion,
} from "./views.js";
import type { EdgeKind } from "./types.js";

const api = new ApiClient("");
const state = new ExplorerState(api);

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function readWeight(id: string): number {
  return Number(($(id) as HTMLInputElement).value);
}

function render(): void {
  $("banner").innerHTML = renderBanner(state.banner);
  $("version").innerHTML = renderVersion(state.kbVersion);
  $("pending").innerHTML = renderPendingEdits(state.pendingEdits, state.rejectedEditIndex);
  $("scene").innerHTML = state.scene
    ? renderSceneOverlay(state.scene, state.selectedRoiId)
    : "";

  if (state.whatifResult && state.lastResult) {
    $("results").innerHTML = renderComparison(state.lastResult.doc, state.whatifResult.doc);
  } else if (state.lastResult) {
    $("results").innerHTML = renderRanking(state.lastResult.doc, state.selectedRoiId);
  } else {
    $("results").innerHTML = "";
  }

  const selected = state.lastResult?.doc.ranked.find((e) => e.roi_id === state.selectedRoiId);
  $("paths").innerHTML =
    selected && state.lastResult
      ? renderPaths(state.lastResult.doc.verb, selected)
      : "";

  wireDynamic();
}

function wireDynamic(): void {
  document.querySelectorAll<HTMLElement>(".candidate, .bbox").forEach((el) => {
    el.addEventListener("click", () => {
      state.selectedRoiId = el.dataset.roi ?? null;
      render();
    });
  });
  document.querySelector(".banner .dismiss")?.addEventListener("click", () => {
    state.dismissBanner();
    render();
  });
  document.querySelectorAll<HTMLButtonElement>(".pending .remove").forEach((btn) => {
    btn.addEventListener("click", () => {
      state.removePendingEdit(Number(btn.dataset.index));
      render();
    });
  });
}

async function onGround(): Promise<void> {
  state.verb = ($("verb") as HTMLInputElement).value;
  state.weights = {
    alpha: readWeight("alpha"),
    beta: readWeight("beta"),
    gamma: readWeight("gamma"),
  };
  await state.ground();
  render();
}

async function boot(): Promise<void> {
  const scenes = await api.listScenes();
  const picker = $("scene-picker") as HTMLSelectElement;
  picker.innerHTML = scenes
    .map((s) => `<option value="${s}">${s}</option>`)
    .join("");
  picker.addEventListener("change", async () => {
    await state.loadScene(picker.value);
    render();
  });
  if (scenes.length > 0) await state.loadScene(scenes[0]);

  $("ground").addEventListener("click", () => void onGround());
  $("add-edit").addEventListener("click", () => {
    const problem = state.addPendingEdit({
      kind: ($("edit-kind") as HTMLSelectElement).value as EdgeKind,
      from: ($("edit-from") as HTMLInputElement).value,
      to: ($("edit-to") as HTMLInputElement).value,
      weight: Number(($("edit-weight") as HTMLInputElement).value),
    });
    if (problem) state.banner = { kind: "error", message: problem };
    render();
  });
  $("whatif").addEventListener("click", async () => {
    await state.whatif();
    render();
  });
  $("commit").addEventListener("click", async () => {
    await state.commit();
    render();
  });
  render();
}

void boot();
