/**
 * The conveyor belt: a newest-first strip of generated charts.
 *
 * Hovering a card shows an enlarged centered preview; clicking sends
 * select_chart (the server's chart_selected event then moves it into the
 * workspace). Proactive-origin cards carry a small badge.
 */

import { renderChartSafe } from "./chartRender.js";
import type { ChartSpec, SendFn } from "./protocol.js";
import type { SessionState } from "./state.js";

export class ConveyorBelt {
  readonly root: HTMLElement;
  readonly preview: HTMLElement;

  constructor(private readonly send: SendFn) {
    this.root = document.createElement("div");
    this.root.className = "conveyor";
    this.preview = document.createElement("div");
    this.preview.className = "preview-overlay hidden";
  }

  render(state: SessionState): void {
    this.root.replaceChildren();
    for (const spec of state.beltSpecs()) {
      this.root.appendChild(this.card(spec));
    }
  }

  private card(spec: ChartSpec): HTMLElement {
    const card = document.createElement("div");
    card.className = "belt-card";
    card.dataset.specId = spec.spec_id;

    const title = document.createElement("div");
    title.className = "belt-card-title";
    title.textContent = spec.title;
    card.appendChild(title);
    if (spec.origin === "proactive") {
      const badge = document.createElement("span");
      badge.className = "badge badge-proactive";
      badge.textContent = "proactive";
      card.appendChild(badge);
    }
    card.appendChild(renderChartSafe(spec));

    card.addEventListener("mouseenter", () => this.showPreview(spec));
    card.addEventListener("mouseleave", () => this.hidePreview());
    card.addEventListener("click", () => this.send({ type: "select_chart", payload: { spec_id: spec.spec_id } }));
    return card;
  }

  private showPreview(spec: ChartSpec): void {
    this.preview.replaceChildren();
    const title = document.createElement("h3");
    title.textContent = spec.title;
    const summary = document.createElement("p");
    summary.textContent = spec.summary;
    this.preview.append(title, renderChartSafe(spec), summary);
    this.preview.classList.remove("hidden");
  }

  private hidePreview(): void {
    this.preview.classList.add("hidden");
    this.preview.replaceChildren();
  }
}
