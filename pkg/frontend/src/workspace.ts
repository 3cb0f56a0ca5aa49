/**
 * The workspace: selected charts as movable, resizable, deletable panels.
 *
 * Layout state lives in SessionState (fed by server events), so every
 * gesture goes out as exactly one protocol message and the local layout
 * updates when the event comes back; reload + replay therefore rebuilds the
 * same arrangement. Drags are batched into one move_resize on pointer-up.
 */

import { renderChartSafe } from "./chartRender.js";
import type { SendFn } from "./protocol.js";
import { MIN_H, MIN_W, type SessionState, type WorkspaceItem } from "./state.js";

export class Workspace {
  readonly root: HTMLElement;

  constructor(private readonly send: SendFn) {
    this.root = document.createElement("div");
    this.root.className = "workspace";
  }

  render(state: SessionState): void {
    this.root.replaceChildren();
    const items = [...state.workspace.values()].sort((a, b) => a.z - b.z);
    for (const item of items) {
      const spec = state.specs.get(item.specId);
      if (spec) this.root.appendChild(this.panel(item, spec));
    }
  }

  /** One gesture -> one message; the state updates when the event echoes back. */
  moveBy(item: WorkspaceItem, dx: number, dy: number): void {
    this.send({
      type: "move_resize",
      payload: { spec_id: item.specId, x: item.x + dx, y: item.y + dy, w: item.w, h: item.h },
    });
  }

  resizeTo(item: WorkspaceItem, w: number, h: number): void {
    this.send({
      type: "move_resize",
      payload: { spec_id: item.specId, x: item.x, y: item.y, w: Math.max(MIN_W, w), h: Math.max(MIN_H, h) },
    });
  }

  remove(item: WorkspaceItem): void {
    this.send({ type: "delete_chart", payload: { spec_id: item.specId } });
  }

  private panel(item: WorkspaceItem, spec: Parameters<typeof renderChartSafe>[0]): HTMLElement {
    const panel = document.createElement("div");
    panel.className = "workspace-panel";
    panel.dataset.specId = item.specId;
    panel.style.left = `${item.x}px`;
    panel.style.top = `${item.y}px`;
    panel.style.width = `${item.w}px`;
    panel.style.height = `${item.h}px`;
    panel.style.zIndex = String(item.z);

    const bar = document.createElement("div");
    bar.className = "panel-bar";
    const title = document.createElement("span");
    title.textContent = spec.title;
    const close = document.createElement("button");
    close.className = "panel-close";
    close.textContent = "×";
    close.addEventListener("click", () => this.remove(item));
    bar.append(title, close);
    this.attachDrag(bar, item);

    const body = document.createElement("div");
    body.className = "panel-body";
    body.appendChild(renderChartSafe(spec));
    const summary = document.createElement("p");
    summary.className = "panel-summary";
    summary.textContent = spec.summary;
    body.appendChild(summary);

    const grip = document.createElement("div");
    grip.className = "panel-grip";
    this.attachResize(grip, item);

    panel.append(bar, body, grip);
    return panel;
  }

  private attachDrag(handle: HTMLElement, item: WorkspaceItem): void {
    handle.addEventListener("pointerdown", (down: PointerEvent) => {
      const startX = down.clientX;
      const startY = down.clientY;
      const onUp = (up: PointerEvent) => {
        window.removeEventListener("pointerup", onUp);
        const dx = up.clientX - startX;
        const dy = up.clientY - startY;
        if (dx !== 0 || dy !== 0) this.moveBy(item, dx, dy);
      };
      window.addEventListener("pointerup", onUp);
    });
  }

  private attachResize(grip: HTMLElement, item: WorkspaceItem): void {
    grip.addEventListener("pointerdown", (down: PointerEvent) => {
      down.stopPropagation();
      const startX = down.clientX;
      const startY = down.clientY;
      const onUp = (up: PointerEvent) => {
        window.removeEventListener("pointerup", onUp);
        this.resizeTo(item, item.w + (up.clientX - startX), item.h + (up.clientY - startY));
      };
      window.addEventListener("pointerup", onUp);
    });
  }
}
