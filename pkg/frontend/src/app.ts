/**
 * Application shell: owns the state fold, the widgets, and the transport.
 *
 * The transport is injected as anything that can send JSON and call back
 * with server messages, so tests drive the app with a scripted fake server
 * and the browser entry point plugs in a real WebSocket.
 */

import { ConveyorBelt } from "./conveyor.js";
import { SequenceBuffer, type ClientMessage, type ServerMessage } from "./protocol.js";
import { SessionState } from "./state.js";
import { TranscriptFeed } from "./transcript.js";
import { Workspace } from "./workspace.js";

export interface Transport {
  send(message: ClientMessage): void;
  onMessage(handler: (message: ServerMessage) => void): void;
}

export class App {
  readonly state = new SessionState();
  readonly root: HTMLElement;
  readonly belt: ConveyorBelt;
  readonly workspace: Workspace;
  readonly transcript: TranscriptFeed;
  readonly modeIndicator: HTMLElement;
  private readonly buffer: SequenceBuffer;

  constructor(private readonly transport: Transport, speaker = "A") {
    const send = (message: ClientMessage) => this.transport.send(message);
    this.belt = new ConveyorBelt(send);
    this.workspace = new Workspace(send);
    this.transcript = new TranscriptFeed(send, speaker);
    this.modeIndicator = document.createElement("div");
    this.modeIndicator.className = "mode-indicator";

    this.root = document.createElement("div");
    this.root.className = "app";
    const sidebar = document.createElement("div");
    sidebar.className = "sidebar";
    sidebar.append(this.modeIndicator, this.transcript.root);
    this.root.append(this.workspace.root, this.belt.root, this.belt.preview, sidebar);

    this.buffer = new SequenceBuffer((message) => {
      this.state.apply(message);
      this.render();
    });
    this.transport.onMessage((message) => this.buffer.push(message));
  }

  render(): void {
    this.modeIndicator.textContent = this.state.persona
      ? `${this.state.persona} — ${this.state.mode === "proactive" ? "proactive" : "non-proactive"} mode`
      : "connecting…";
    this.modeIndicator.dataset.mode = this.state.mode;
    this.belt.render(this.state);
    this.workspace.render(this.state);
    this.transcript.render(this.state);
  }
}

/** Browser transport over a real websocket. */
export function websocketTransport(url: string): Transport {
  const socket = new WebSocket(url);
  const handlers: Array<(message: ServerMessage) => void> = [];
  socket.addEventListener("message", (event) => {
    const message = JSON.parse(String(event.data)) as ServerMessage;
    for (const handler of handlers) handler(message);
  });
  return {
    send: (message) => socket.send(JSON.stringify(message)),
    onMessage: (handler) => handlers.push(handler),
  };
}
