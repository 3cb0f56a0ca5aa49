/**
 * Wire protocol types shared with the session server.
 *
 * Server -> client: session events, one message per event, seq-ordered.
 * Client -> server: user gestures; every gesture maps to exactly one message.
 */

export interface Axis {
  label: string;
  kind?: "temporal" | "categorical" | "quantitative";
  units?: string;
}

export interface Series {
  name: string;
  points: Array<[number | string, number]>;
}

export interface HistogramBin {
  lo: number;
  hi: number;
  count: number;
}

export interface Box {
  name: string;
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
  count?: number;
}

export interface ChartSpec {
  spec_id: string;
  chart_type: "line" | "bar" | "scatter" | "histogram" | "boxplot";
  title: string;
  dedupe_key: string;
  origin: "explicit" | "proactive";
  summary: string;
  empty: boolean;
  x_axis: Axis;
  y_axis: Axis;
  series: Series[];
  bins: HistogramBin[];
  boxes: Box[];
}

export type ServerMessage = {
  type: string;
  seq: number;
  t: number;
  payload: Record<string, unknown>;
};

export type ClientMessage =
  | { type: "utterance_text"; payload: { speaker: string; text: string } }
  | { type: "select_chart"; payload: { spec_id: string } }
  | { type: "delete_chart"; payload: { spec_id: string } }
  | { type: "move_resize"; payload: { spec_id: string; x: number; y: number; w: number; h: number } };

export type SendFn = (message: ClientMessage) => void;

/** Orders incoming messages by seq, buffering anything that arrives early. */
export class SequenceBuffer {
  private next = 1;
  private pending = new Map<number, ServerMessage>();

  constructor(private readonly deliver: (message: ServerMessage) => void) {}

  push(message: ServerMessage): void {
    if (message.seq < this.next) return; // duplicate
    this.pending.set(message.seq, message);
    let queued = this.pending.get(this.next);
    while (queued !== undefined) {
      this.pending.delete(this.next);
      this.next += 1;
      this.deliver(queued);
      queued = this.pending.get(this.next);
    }
  }

  reset(): void {
    this.next = 1;
    this.pending.clear();
  }
}
