/** The IDE state machine, free of DOM concerns so it is testable headlessly.
 *
 * Holds no proof logic: every goal, theorem and diagnostic comes verbatim
 * from the server, and a malformed payload leaves the last good state
 * untouched behind an error banner.
 */

import { ServerError, SessionClient } from "./client.js";
import { isWireState } from "./protocol.js";
import type {
  CalculusMode,
  Diagnostic,
  ItemSpan,
  NavigationMode,
  WireState,
} from "./protocol.js";

export interface Refusal {
  ok: false;
  reason: string;
}

export interface Accepted {
  ok: true;
}

export type Outcome = Accepted | Refusal;

export class IdeController {
  scriptText = "";
  navigation: NavigationMode = "RandomAccess";
  mode: CalculusMode = "intuitionistic";
  unicode = false;
  state: WireState | null = null;
  lastGood: WireState | null = null;
  error: string | null = null;
  diagnostics: Diagnostic[] = [];

  constructor(private client: SessionClient) {}

  /** Create (or re-create) the session for the current script and settings. */
  async load(script?: string): Promise<Outcome> {
    if (script !== undefined) this.scriptText = script;
    try {
      const state = await this.client.create(
        this.scriptText,
        this.navigation,
        this.mode,
      );
      return this.accept(state);
    } catch (e) {
      this.error = e instanceof ServerError ? e.message : String(e);
      this.state = null;
      return { ok: false, reason: this.error };
    }
  }

  private accept(payload: unknown): Outcome {
    if (!isWireState(payload)) {
      this.error = "malformed payload from the server; keeping the last good state";
      return { ok: false, reason: this.error };
    }
    this.state = payload;
    this.lastGood = payload;
    this.diagnostics = payload.diagnostics;
    this.error = payload.diagnostics.length > 0
      ? payload.diagnostics[0].message
      : null;
    return { ok: true };
  }

  /** The state rendering should use: current, or last good during an error. */
  get displayState(): WireState | null {
    return this.state ?? this.lastGood;
  }

  private async step(
    command: "forward" | "backward" | "run_to" | "edit",
    index?: number,
    text?: string,
  ): Promise<Outcome> {
    if (this.state === null) return { ok: false, reason: "no session" };
    try {
      const out = await this.client.step(
        this.state.session_id,
        command,
        index,
        text,
      );
      return this.accept(out);
    } catch (e) {
      this.error = e instanceof ServerError ? e.message : String(e);
      return { ok: false, reason: this.error };
    }
  }

  forward(): Promise<Outcome> {
    return this.step("forward");
  }

  backward(): Promise<Outcome> {
    return this.step("backward");
  }

  runTo(index: number): Promise<Outcome> {
    return this.step("run_to", index);
  }

  /** Execute every item that starts before the text offset (run to cursor). */
  runToCursor(offset: number): Promise<Outcome> {
    const items = this.state?.items ?? [];
    let index = 0;
    while (index < items.length && items[index].start < offset) index++;
    return this.runTo(index);
  }

  get canEdit(): boolean {
    return this.navigation === "RandomAccess";
  }

  /** Why the edit affordance is disabled, for the tooltip. */
  get editDisabledReason(): string | null {
    return this.canEdit
      ? null
      : "Editing requires RandomAccess navigation; Linear sessions only step.";
  }

  async editItem(index: number, text: string): Promise<Outcome> {
    if (!this.canEdit) {
      return { ok: false, reason: this.editDisabledReason! };
    }
    return this.step("edit", index, text);
  }

  /** Mode is fixed once stepping begins: toggling then requires cursor 0. */
  async toggleMode(mode: CalculusMode): Promise<Outcome> {
    if (mode === this.mode) return { ok: true };
    if (this.state !== null && this.state.cursor > 0) {
      return {
        ok: false,
        reason:
          "the calculus mode is fixed once stepping begins; rewind to the " +
          "start (run_to 0) before switching",
      };
    }
    this.mode = mode;
    if (this.state !== null) return this.load();
    return { ok: true };
  }

  async setNavigation(nav: NavigationMode): Promise<Outcome> {
    if (nav === this.navigation) return { ok: true };
    this.navigation = nav;
    if (this.state !== null) return this.load();
    return { ok: true };
  }

  /** End offset of the processed (executed) script region. */
  get processedEnd(): number {
    const s = this.displayState;
    if (!s || s.cursor === 0 || !s.items || s.items.length < s.cursor) return 0;
    return s.items[s.cursor - 1].end;
  }

  get failingIndex(): number | null {
    for (const d of this.diagnostics) {
      if (d.item_index !== null && d.item_index !== undefined) return d.item_index;
    }
    return null;
  }

  /** Spans of classical-only tactics, to flag while intuitionistic. */
  flaggedSpans(classicalSpansOf: (src: string) => ItemSpan[]): ItemSpan[] {
    if (this.mode !== "intuitionistic") return [];
    return classicalSpansOf(this.scriptText);
  }
}
