/** Pure renderers: WireState in, HTML strings out.
 *
 * Formula text is never rewritten: the exact server string always travels in
 * the data-formula attribute, and the visible text is byte-identical to it
 * unless the Unicode display toggle is on, in which case only the *glyphs*
 * of the connectives change.
 */

import type { Diagnostic, Goal, ItemSpan, WireState } from "./protocol.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

// Order matters: longer operators first so `<->` is not eaten by `->`.
const GLYPHS: [RegExp, string][] = [
  [/\[\|/g, "⟦"],      // ⟦
  [/\|\]/g, "⟧"],      // ⟧
  [/==>/g, "⟹"],       // ⟹
  [/<->/g, "↔"],       // ↔
  [/->/g, "→"],        // →
  [/\/\\/g, "∧"],      // ∧
  [/\\\//g, "∨"],      // ∨
  [/~/g, "¬"],         // ¬
  [/\bforall\b/g, "∀"], // ∀
  [/\bexists\b/g, "∃"], // ∃
  [/\bFalse\b/g, "⊥"],  // ⊥
];

export function displayFormula(formula: string, unicode: boolean): string {
  if (!unicode) return formula;
  let out = formula;
  for (const [re, glyph] of GLYPHS) out = out.replace(re, glyph);
  return out;
}

export function renderGoalCard(goal: Goal, index: number, total: number,
                               unicode: boolean): string {
  const hyps = goal.hypotheses
    .map(
      (h) =>
        `<div class="hyp"><span class="hyp-label">${escapeHtml(h.label)}</span>` +
        ` : <span class="formula" data-formula="${escapeHtml(h.formula)}">` +
        `${escapeHtml(displayFormula(h.formula, unicode))}</span></div>`,
    )
    .join("");
  return (
    `<section class="goal-card" data-goal-index="${index}">` +
    `<header class="goal-header">Goal ${index + 1} of ${total}</header>` +
    hyps +
    `<div class="goal-rule"></div>` +
    `<div class="goal-body"><span class="formula" data-formula="${escapeHtml(goal.goal)}">` +
    `${escapeHtml(displayFormula(goal.goal, unicode))}</span></div>` +
    `</section>`
  );
}

export function renderGoalPanel(state: WireState, unicode: boolean): string {
  if (state.proof_name === null) {
    const thms = state.theorems.length
      ? `<div class="theorems">Proved: ${state.theorems.map(escapeHtml).join(", ")}</div>`
      : "";
    return `<div class="idle">No proof in progress.</div>${thms}`;
  }
  if (state.goals.length === 0) {
    return (
      `<div class="complete" data-qed-ready="true">No more goals.` +
      `<button class="qed-button" data-action="qed-step">Step over Qed</button></div>`
    );
  }
  return state.goals
    .map((g, i) => renderGoalCard(g, i, state.goals.length, unicode))
    .join("");
}

export function renderDiagnostics(diags: Diagnostic[]): string {
  if (diags.length === 0) return "";
  return diags
    .map(
      (d) =>
        `<div class="diagnostic" data-item-index="${d.item_index ?? ""}">` +
        `${escapeHtml(d.message)}</div>`,
    )
    .join("");
}

export function renderErrorBanner(message: string): string {
  return `<div class="error-banner">${escapeHtml(message)}</div>`;
}

/** The script with processed / unprocessed regions distinguished and the
 * failing item (if any) wrapped in an inline error span. */
export function renderScriptRegions(
  source: string,
  items: ItemSpan[],
  cursor: number,
  failingIndex: number | null,
): string {
  const processedEnd = cursor > 0 && items.length >= cursor
    ? items[cursor - 1].end
    : 0;
  const pieces: string[] = [];
  const emit = (from: number, to: number, cls: string) => {
    if (to > from) {
      pieces.push(`<span class="${cls}">${escapeHtml(source.slice(from, to))}</span>`);
    }
  };
  if (failingIndex !== null && failingIndex < items.length) {
    const bad = items[failingIndex];
    emit(0, Math.min(processedEnd, bad.start), "processed");
    emit(Math.min(processedEnd, bad.start), bad.start, "unprocessed");
    emit(bad.start, bad.end, "error-item");
    emit(bad.end, source.length, "unprocessed");
  } else {
    emit(0, processedEnd, "processed");
    emit(processedEnd, source.length, "unprocessed");
  }
  return pieces.join("");
}

const CLASSICAL_TACTICS = /\b(classical_contradiction|nnpp|apply\s+NNPP)\b/g;

/** Spans of classical-only tactic uses, flagged while in intuitionistic mode. */
export function classicalTacticSpans(source: string): ItemSpan[] {
  const out: ItemSpan[] = [];
  for (const m of source.matchAll(CLASSICAL_TACTICS)) {
    out.push({ start: m.index ?? 0, end: (m.index ?? 0) + m[0].length });
  }
  return out;
}

export function renderStatusLine(state: WireState): string {
  const mode = escapeHtml(state.mode);
  const proof = state.proof_name ? ` — proving ${escapeHtml(state.proof_name)}` : "";
  return (
    `<span class="cursor-pos">item ${state.cursor}/${state.item_count}</span>` +
    `<span class="mode-badge">${mode}</span>${proof}`
  );
}
