/**
 * Event-sourced client state: a pure fold over the server's event stream.
 *
 * The UI renders from this state and never mutates it directly, so a page
 * reload that replays the same log reconstructs the identical state.
 */

import type { ChartSpec, ServerMessage } from "./protocol.js";

export interface TranscriptEntry {
  utteranceId: number;
  speaker: string;
  text: string;
  t: number;
  label?: string;
}

export interface WorkspaceItem {
  specId: string;
  x: number;
  y: number;
  w: number;
  h: number;
  z: number;
}

export const MIN_W = 200;
export const MIN_H = 150;

export class SessionState {
  mode = "";
  persona = "";
  conveyorCapacity = 10;
  conveyor: string[] = []; // spec ids, oldest first (render newest first)
  specs = new Map<string, ChartSpec>();
  workspace = new Map<string, WorkspaceItem>();
  transcript: TranscriptEntry[] = [];
  errors: string[] = [];
  private zCounter = 0;

  apply(message: ServerMessage): void {
    const p = message.payload;
    switch (message.type) {
      case "session_start": {
        this.mode = String(p.mode ?? "");
        this.persona = String(p.persona_name ?? "");
        this.conveyorCapacity = Number(p.conveyor_capacity ?? 10);
        break;
      }
      case "utterance": {
        this.transcript.push({
          utteranceId: Number(p.id),
          speaker: String(p.speaker ?? ""),
          text: String(p.text ?? ""),
          t: message.t,
        });
        break;
      }
      case "classification": {
        const entry = this.transcript.find((e) => e.utteranceId === Number(p.utterance_id));
        if (entry) entry.label = String(p.label ?? "");
        break;
      }
      case "chart_generated": {
        const spec = p.spec as ChartSpec;
        this.specs.set(spec.spec_id, spec);
        if (!this.conveyor.includes(spec.spec_id)) {
          this.conveyor.push(spec.spec_id);
          if (this.conveyor.length > this.conveyorCapacity) this.conveyor.shift();
        }
        break;
      }
      case "chart_selected": {
        const specId = String(p.spec_id);
        if (!this.workspace.has(specId)) {
          this.zCounter += 1;
          const offset = (this.workspace.size % 6) * 30;
          this.workspace.set(specId, {
            specId,
            x: 60 + offset,
            y: 60 + offset,
            w: 420,
            h: 300,
            z: this.zCounter,
          });
        }
        break;
      }
      case "move_resize": {
        const item = this.workspace.get(String(p.spec_id));
        if (item) {
          item.x = Number(p.x);
          item.y = Number(p.y);
          item.w = Math.max(MIN_W, Number(p.w));
          item.h = Math.max(MIN_H, Number(p.h));
        }
        break;
      }
      case "chart_deleted": {
        const specId = String(p.spec_id);
        this.workspace.delete(specId);
        this.conveyor = this.conveyor.filter((id) => id !== specId);
        break;
      }
      case "error": {
        this.errors.push(String(p.message ?? "unknown error"));
        break;
      }
      default:
        break; // refined_query / plan / suppression / session_end need no UI state
    }
  }

  /** Belt order for rendering: newest first. */
  beltSpecs(): ChartSpec[] {
    return [...this.conveyor]
      .reverse()
      .map((id) => this.specs.get(id))
      .filter((s): s is ChartSpec => s !== undefined);
  }

  /** Canonical snapshot for state-reconstruction comparisons. */
  snapshot(): string {
    return JSON.stringify({
      mode: this.mode,
      persona: this.persona,
      conveyor: this.conveyor,
      specs: [...this.specs.keys()].sort(),
      workspace: [...this.workspace.values()].sort((a, b) => a.specId.localeCompare(b.specId)),
      transcript: this.transcript,
    });
  }
}
