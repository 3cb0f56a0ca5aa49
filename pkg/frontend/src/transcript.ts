/** Live transcript feed with per-utterance classification badges. */

import type { SendFn } from "./protocol.js";
import type { SessionState } from "./state.js";

const BADGE_CLASS: Record<string, string> = {
  ExplicitQuery: "badge-explicit",
  ProactiveOpportunity: "badge-proactive",
  NonQuery: "badge-nonquery",
};

export class TranscriptFeed {
  readonly root: HTMLElement;
  readonly input: HTMLInputElement;
  readonly feed: HTMLElement;

  constructor(private readonly send: SendFn, private readonly speaker = "A") {
    this.root = document.createElement("div");
    this.root.className = "transcript";
    this.feed = document.createElement("ol");
    this.feed.className = "transcript-feed";

    const form = document.createElement("form");
    form.className = "utterance-form";
    this.input = document.createElement("input");
    this.input.type = "text";
    this.input.placeholder = "Say something about the data…";
    const button = document.createElement("button");
    button.type = "submit";
    button.textContent = "Send";
    form.append(this.input, button);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      this.submit();
    });

    this.root.append(this.feed, form);
  }

  submit(): void {
    const text = this.input.value.trim();
    if (!text) return; // empty input sends nothing
    this.send({ type: "utterance_text", payload: { speaker: this.speaker, text } });
    this.input.value = "";
  }

  render(state: SessionState): void {
    this.feed.replaceChildren();
    for (const entry of state.transcript) {
      const li = document.createElement("li");
      li.dataset.utteranceId = String(entry.utteranceId);
      const who = document.createElement("strong");
      who.textContent = `${entry.speaker}: `;
      const text = document.createElement("span");
      text.textContent = entry.text;
      li.append(who, text);
      if (entry.label) {
        const badge = document.createElement("span");
        badge.className = `badge ${BADGE_CLASS[entry.label] ?? ""}`;
        badge.textContent = entry.label;
        li.appendChild(badge);
      }
      this.feed.appendChild(li);
    }
  }
}
