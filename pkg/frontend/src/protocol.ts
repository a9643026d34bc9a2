/** Wire types, mirroring src/nanoprover/protocol.schema.json on the server. */

export interface Hypothesis {
  label: string;
  formula: string;
}

export interface Goal {
  hypotheses: Hypothesis[];
  goal: string;
}

export interface SpanInfo {
  start?: number;
  end?: number;
  line?: number;
  col?: number;
}

export interface Diagnostic {
  item_index: number | null;
  message: string;
  span?: SpanInfo;
}

export interface ItemSpan {
  start: number;
  end: number;
}

export type NavigationMode = "Linear" | "RandomAccess";
export type CalculusMode = "intuitionistic" | "classical";

export interface WireState {
  session_id: string;
  cursor: number;
  item_count: number;
  navigation: NavigationMode;
  mode: string; // rendered: "IntuitionisticNJ" | "ClassicalNJ" | "Hilbert"
  proof_name: string | null;
  goals: Goal[];
  message: string | null;
  theorems: string[];
  items: ItemSpan[];
  diagnostics: Diagnostic[];
}

export interface TheoremInfo {
  name: string;
  statement: string;
  mode: string;
}

/** Runtime shape check: a malformed payload must never replace good state. */
export function isWireState(x: unknown): x is WireState {
  if (typeof x !== "object" || x === null) return false;
  const w = x as Record<string, unknown>;
  return (
    typeof w.session_id === "string" &&
    typeof w.cursor === "number" &&
    typeof w.item_count === "number" &&
    Array.isArray(w.goals) &&
    Array.isArray(w.theorems) &&
    Array.isArray(w.diagnostics) &&
    (w.goals as unknown[]).every(
      (g) =>
        typeof g === "object" && g !== null &&
        typeof (g as Goal).goal === "string" &&
        Array.isArray((g as Goal).hypotheses),
    )
  );
}
