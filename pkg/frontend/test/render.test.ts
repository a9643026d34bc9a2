import { describe, expect, it } from "vitest";

import {
  classicalTacticSpans,
  displayFormula,
  escapeHtml,
  renderDiagnostics,
  renderGoalCard,
  renderGoalPanel,
  renderScriptRegions,
} from "../src/render.js";
import type { WireState } from "../src/protocol.js";

const GOAL = {
  hypotheses: [
    { label: "P_holds", formula: "P" },
    { label: "f", formula: "(P \\/ (P -> False)) -> False" },
  ],
  goal: "False",
};

function state(overrides: Partial<WireState>): WireState {
  return {
    session_id: "s1",
    cursor: 3,
    item_count: 10,
    navigation: "Linear",
    mode: "IntuitionisticNJ",
    proof_name: "demo",
    goals: [GOAL],
    message: null,
    theorems: [],
    items: [],
    diagnostics: [],
    ...overrides,
  };
}

describe("goal cards", () => {
  it("lists numbered hypotheses above the rule and the goal below", () => {
    const html = renderGoalCard(GOAL, 0, 2, false);
    expect(html).toContain("Goal 1 of 2");
    const ruleAt = html.indexOf("goal-rule");
    expect(html.indexOf("P_holds")).toBeLessThan(ruleAt);
    expect(html.indexOf("goal-body")).toBeGreaterThan(ruleAt);
  });

  it("keeps formula text byte-equal to the server payload", () => {
    const html = renderGoalCard(GOAL, 0, 1, false);
    // the exact server string, HTML-escaped but otherwise untouched
    const exact = escapeHtml("(P \\/ (P -> False)) -> False");
    expect(html).toContain(`data-formula="${exact}"`);
    expect(html).toContain(`>${exact}</span>`);
  });

  it("unicode toggle changes only the displayed glyphs", () => {
    const html = renderGoalCard(GOAL, 0, 1, true);
    const exact = escapeHtml("(P \\/ (P -> False)) -> False");
    expect(html).toContain(`data-formula="${exact}"`); // data layer untouched
    expect(html).toContain("∨"); // ∨ displayed
    expect(html).toContain("→"); // →
    expect(html).toContain("⊥"); // ⊥ for False
  });
});

describe("displayFormula", () => {
  it("maps every ascii connective", () => {
    expect(displayFormula("~(P /\\ Q) <-> ~P \\/ ~Q", true)).toBe(
      "¬(P ∧ Q) ↔ ¬P ∨ ¬Q",
    );
    expect(displayFormula("forall x : Type, exists y : Type, x = y", true)).toBe(
      "∀ x : Type, ∃ y : Type, x = y",
    );
    expect(displayFormula("[| A; B |] ==> C", true)).toBe(
      "⟦ A; B ⟧ ⟹ C",
    );
  });

  it("is the identity when the toggle is off", () => {
    const s = "~(P /\\ Q) <-> ~P \\/ ~Q";
    expect(displayFormula(s, false)).toBe(s);
  });

  it("does not rewrite identifiers containing keyword letters", () => {
    expect(displayFormula("forallish existsx", true)).toBe("forallish existsx");
  });
});

describe("goal panel", () => {
  it("renders one card per open goal", () => {
    const html = renderGoalPanel(state({ goals: [GOAL, GOAL, GOAL] }), false);
    expect(html.match(/goal-card/g)).toHaveLength(3);
  });

  it("renders the completion banner with a qed affordance at zero goals", () => {
    const html = renderGoalPanel(state({ goals: [] }), false);
    expect(html).toContain("No more goals");
    expect(html).toContain('data-action="qed-step"');
  });

  it("renders the idle view outside proofs", () => {
    const html = renderGoalPanel(
      state({ proof_name: null, goals: [], theorems: ["lemma_a"] }),
      false,
    );
    expect(html).toContain("No proof in progress");
    expect(html).toContain("lemma_a");
  });
});

describe("diagnostics and script regions", () => {
  it("renders inline diagnostics anchored to their item", () => {
    const html = renderDiagnostics([
      { item_index: 4, message: "ModeViolation: nnpp requires ClassicalNJ mode" },
    ]);
    expect(html).toContain('data-item-index="4"');
    expect(html).toContain("ModeViolation");
  });

  it("splits processed and unprocessed regions at the cursor item", () => {
    const source = "Compute 1 + 1. Compute 2 + 2.";
    const items = [
      { start: 0, end: 14 },
      { start: 15, end: 29 },
    ];
    const html = renderScriptRegions(source, items, 1, null);
    expect(html).toContain('<span class="processed">Compute 1 + 1.</span>');
    expect(html).toContain('<span class="unprocessed"> Compute 2 + 2.</span>');
  });

  it("wraps the failing item in an error span", () => {
    const source = "Compute 1 + 1. Compute 2 + 2.";
    const items = [
      { start: 0, end: 14 },
      { start: 15, end: 29 },
    ];
    const html = renderScriptRegions(source, items, 1, 1);
    expect(html).toContain('<span class="error-item">Compute 2 + 2.</span>');
  });

  it("finds classical-only tactics for flagging", () => {
    const spans = classicalTacticSpans(
      "intros P Q H.\nclassical_contradiction H_nP.\napply NNPP.\nnnpp.\n",
    );
    expect(spans).toHaveLength(3);
  });
});
