/** Bootstrap: read the annotator id, build the session, mount the view. */

import { ReviewApi } from "./api.js";
import { AnnotatorSession } from "./session.js";
import { ReviewView } from "./view.js";

function annotatorId(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("annotator");
  if (fromQuery) return fromQuery;
  const stored = window.localStorage.getItem("bookprobe-annotator");
  if (stored) return stored;
  const entered = window.prompt("Annotator id:") ?? "anonymous";
  window.localStorage.setItem("bookprobe-annotator", entered);
  return entered;
}

async function start(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  const session = new AnnotatorSession(new ReviewApi(""), annotatorId(), window.localStorage);
  const view = new ReviewView(root, session);
  window.addEventListener("online", () => void view.retryQueued());
  await session.load();
  view.attach();
}

void start();
