/** Scripted fake server: records client messages, pushes canned events. */

import type { Transport } from "../src/app.js";
import type { ClientMessage, ServerMessage } from "../src/protocol.js";

export class FakeServer implements Transport {
  sent: ClientMessage[] = [];
  private handlers: Array<(message: ServerMessage) => void> = [];
  private seq = 0;

  send(message: ClientMessage): void {
    this.sent.push(message);
  }

  onMessage(handler: (message: ServerMessage) => void): void {
    this.handlers.push(handler);
  }

  push(message: ServerMessage): void {
    this.seq = Math.max(this.seq, message.seq);
    for (const handler of this.handlers) handler(message);
  }

  feed(messages: ServerMessage[]): void {
    for (const message of messages) this.push(message);
  }

  /** Push a follow-up event with the next sequence number. */
  pushNext(type: string, t: number, payload: Record<string, unknown>): void {
    this.seq += 1;
    this.push({ type, seq: this.seq, t, payload });
  }
}
