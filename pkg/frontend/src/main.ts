/** DOM bootstrap: wires the controller to the page. */

import { HttpTransport, SessionClient } from "./client.js";
import { IdeController } from "./controller.js";
import {
  classicalTacticSpans,
  renderDiagnostics,
  renderErrorBanner,
  renderGoalPanel,
  renderScriptRegions,
  renderStatusLine,
} from "./render.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const serverInput = el<HTMLInputElement>("server-url");
const scriptArea = el<HTMLTextAreaElement>("script");
const scriptView = el<HTMLElement>("script-view");
const goalPanel = el<HTMLElement>("goal-panel");
const statusLine = el<HTMLElement>("status-line");
const messageLog = el<HTMLElement>("message-log");
const banner = el<HTMLElement>("banner");
const navSelect = el<HTMLSelectElement>("navigation");
const modeSelect = el<HTMLSelectElement>("mode");
const unicodeToggle = el<HTMLInputElement>("unicode");
const editControls = el<HTMLElement>("edit-controls");
const editIndex = el<HTMLInputElement>("edit-index");
const editText = el<HTMLInputElement>("edit-text");
const extractName = el<HTMLInputElement>("extract-name");
const extractDialect = el<HTMLSelectElement>("extract-dialect");
const extractOut = el<HTMLElement>("extract-out");

let controller = newController();

function newController(): IdeController {
  const transport = new HttpTransport(serverInput.value.replace(/\/$/, ""));
  return new IdeController(new SessionClient(transport));
}

function refresh(): void {
  const state = controller.displayState;
  banner.innerHTML = controller.error ? renderErrorBanner(controller.error) : "";
  if (!state) {
    goalPanel.innerHTML = `<div class="idle">Load a script to begin.</div>`;
    statusLine.innerHTML = "";
    scriptView.innerHTML = "";
    return;
  }
  goalPanel.innerHTML =
    renderDiagnostics(controller.diagnostics) +
    renderGoalPanel(state, controller.unicode);
  statusLine.innerHTML = renderStatusLine(state);
  scriptView.innerHTML = renderScriptRegions(
    controller.scriptText,
    state.items ?? [],
    state.cursor,
    controller.failingIndex,
  );
  messageLog.textContent = state.message ?? "";
  editControls.style.opacity = controller.canEdit ? "1" : "0.4";
  editControls.title = controller.editDisabledReason ?? "";
  const flagged = controller.flaggedSpans(classicalTacticSpans);
  const flagNote = el<HTMLElement>("classical-flags");
  flagNote.textContent = flagged.length
    ? `${flagged.length} classical-only tactic use(s) will fail in intuitionistic mode`
    : "";
}

async function act(go: () => Promise<unknown>): Promise<void> {
  await go();
  refresh();
}

el<HTMLButtonElement>("load").addEventListener("click", () =>
  act(() => {
    controller = newController();
    controller.navigation = navSelect.value as "Linear" | "RandomAccess";
    controller.mode = modeSelect.value as "intuitionistic" | "classical";
    controller.unicode = unicodeToggle.checked;
    return controller.load(scriptArea.value);
  }),
);
el<HTMLButtonElement>("forward").addEventListener("click", () =>
  act(() => controller.forward()),
);
el<HTMLButtonElement>("backward").addEventListener("click", () =>
  act(() => controller.backward()),
);
el<HTMLButtonElement>("run-to-cursor").addEventListener("click", () =>
  act(() => controller.runToCursor(scriptArea.selectionStart ?? 0)),
);
el<HTMLButtonElement>("run-all").addEventListener("click", () =>
  act(() => controller.runTo(controller.state?.item_count ?? 0)),
);
el<HTMLButtonElement>("rewind").addEventListener("click", () =>
  act(() => controller.runTo(0)),
);
el<HTMLButtonElement>("apply-edit").addEventListener("click", () =>
  act(async () => {
    const out = await controller.editItem(
      Number(editIndex.value),
      editText.value,
    );
    if (!out.ok) controller.error = out.reason;
  }),
);
modeSelect.addEventListener("change", () =>
  act(async () => {
    const out = await controller.toggleMode(
      modeSelect.value as "intuitionistic" | "classical",
    );
    if (!out.ok) {
      controller.error = out.reason;
      modeSelect.value = controller.mode;
    }
  }),
);
navSelect.addEventListener("change", () =>
  act(() =>
    controller.setNavigation(navSelect.value as "Linear" | "RandomAccess"),
  ),
);
unicodeToggle.addEventListener("change", () => {
  controller.unicode = unicodeToggle.checked;
  refresh();
});
el<HTMLButtonElement>("extract").addEventListener("click", () =>
  act(async () => {
    if (!controller.state) return;
    try {
      const client = new SessionClient(
        new HttpTransport(serverInput.value.replace(/\/$/, "")),
      );
      extractOut.textContent = await client.extract(
        controller.state.session_id,
        extractName.value,
        extractDialect.value,
      );
    } catch (e) {
      extractOut.textContent = String(e);
    }
  }),
);
goalPanel.addEventListener("click", (ev) => {
  const target = ev.target as HTMLElement;
  if (target.dataset.action === "qed-step") act(() => controller.forward());
});

refresh();
