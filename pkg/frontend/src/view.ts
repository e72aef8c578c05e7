/** DOM rendering for the review screen: language panes, highlights, controls. */

import { segmentText } from "./highlight.js";
import { AnnotatorSession, keyAction } from "./session.js";
import type { Flag, ReviewItemPayload } from "./types.js";

const FLAG_LABELS: Record<Flag, string> = {
  misaligned: "misaligned",
  multiple_names: "more than one name",
};

export class ReviewView {
  private busy = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly session: AnnotatorSession,
    private readonly doc: Document = document,
  ) {}

  attach(): void {
    this.doc.addEventListener("keydown", (event) => {
      void this.handleKey((event as KeyboardEvent).key);
    });
    this.render();
  }

  async handleKey(key: string): Promise<void> {
    const action = keyAction(key);
    if (!action || this.busy) return;
    if (action.kind === "submit") {
      await this.submit(action.verdict);
    } else if (action.kind === "flag") {
      this.session.toggleFlag(action.flag);
      this.render();
    } else {
      if (action.direction === 1) this.session.advance();
      else this.session.back();
      this.render();
    }
  }

  async submit(verdict: "accept" | "reject"): Promise<void> {
    this.busy = true;
    try {
      const result = await this.session.submit(verdict);
      if (result.acked && this.session.state().exhausted) {
        await this.session.load();
      }
    } finally {
      this.busy = false;
    }
    this.render();
  }

  async retryQueued(): Promise<void> {
    this.busy = true;
    try {
      await this.session.flushQueue();
      if (this.session.state().exhausted) {
        await this.session.load();
      }
    } finally {
      this.busy = false;
    }
    this.render();
  }

  render(): void {
    const state = this.session.state();
    this.root.replaceChildren();

    const header = this.el("div", "header");
    const progress = this.el("span", "progress");
    progress.textContent =
      `${this.session.annotatorId} — ${state.votedCount}/${state.totalItems} voted`;
    header.appendChild(progress);

    if (state.offline || state.queueLength > 0) {
      const banner = this.el("div", "banner");
      banner.textContent =
        `${state.queueLength} vote(s) queued locally — server unreachable. `;
      const retry = this.el("button", "retry");
      retry.textContent = "Retry now";
      retry.addEventListener("click", () => void this.retryQueued());
      banner.appendChild(retry);
      header.appendChild(banner);
    }
    this.root.appendChild(header);

    const item = state.current;
    if (!item) {
      const done = this.el("p", "done");
      done.textContent = "No items left to review.";
      this.root.appendChild(done);
      return;
    }
    this.root.appendChild(this.renderItem(item));
    this.root.appendChild(this.renderControls(item));
  }

  renderItem(item: ReviewItemPayload): HTMLElement {
    const container = this.el("div", "item");
    const title = this.el("h2", "item-title");
    title.textContent = `${item.passage_id}` + (item.gold_name ? ` — ${item.gold_name}` : "");
    container.appendChild(title);

    const panes = this.el("div", "panes");
    for (const lang of Object.keys(item.texts).sort()) {
      const pane = this.el("div", "pane");
      const label = this.el("h3", "lang");
      label.textContent = lang;
      pane.appendChild(label);

      const body = this.el("p", "text");
      const text = item.texts[lang] ?? "";
      for (const segment of segmentText(text, item.highlights[lang] ?? [])) {
        const span = this.doc.createElement("span");
        if (segment.highlighted) span.className = "hl";
        span.textContent = segment.text;
        body.appendChild(span);
      }
      pane.appendChild(body);
      panes.appendChild(pane);
    }
    container.appendChild(panes);
    return container;
  }

  renderControls(item: ReviewItemPayload): HTMLElement {
    const controls = this.el("div", "controls");
    const accept = this.el("button", "accept");
    accept.textContent = "Accept (a)";
    accept.addEventListener("click", () => void this.submit("accept"));
    const reject = this.el("button", "reject");
    reject.textContent = "Reject (r)";
    reject.addEventListener("click", () => void this.submit("reject"));
    controls.append(accept, reject);

    const flags = this.session.flagsFor(item.item_id);
    for (const flag of Object.keys(FLAG_LABELS) as Flag[]) {
      const toggle = this.el("label", "flag");
      const box = this.doc.createElement("input");
      box.type = "checkbox";
      box.checked = flags.has(flag);
      box.addEventListener("change", () => {
        this.session.toggleFlag(flag);
        this.render();
      });
      toggle.appendChild(box);
      toggle.append(` ${FLAG_LABELS[flag]}`);
      controls.appendChild(toggle);
    }
    return controls;
  }

  private el(tag: string, className: string): HTMLElement {
    const element = this.doc.createElement(tag);
    element.className = className;
    return element;
  }
}
