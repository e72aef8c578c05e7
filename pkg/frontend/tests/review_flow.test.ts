/**
 * Acceptance flow against the real review server: three scripted annotator
 * sessions drive the UI controller end to end, the unanimity export is
 * checked exactly, and a kill -9 restart must lose no acked votes.
 *
 * Requires the python package to be importable (pip install -e . at the repo
 * root); the server is spawned as a child process.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ReviewApi } from "../src/api.js";
import { MemoryStore } from "../src/queue.js";
import { AnnotatorSession } from "../src/session.js";
import type { ReviewItemPayload } from "../src/types.js";

const ANNOTATORS = ["ann1", "ann2", "ann3"] as const;

function serverItems(n: number): ReviewItemPayload[] {
  return Array.from({ length: n }, (_, i) => ({
    item_id: i,
    passage_id: `bk-${String(i).padStart(5, "0")}`,
    book_id: "bk",
    gold_name: "Mara",
    texts: { en: `Paragraph ${i} where Mara waits.`, es: `Párrafo ${i} donde espera Mara.` },
    // "Paragraph <i> where " is 17 chars plus the digits of i; "Mara" follows.
    highlights: { en: [[17 + String(i).length, 21 + String(i).length]] as Array<[number, number]> },
  }));
}

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

function spawnServer(itemsPath: string, votesPath: string, port: number): ChildProcess {
  return spawn(
    "python3",
    [
      "-m", "bookprobe.cli", "serve",
      "--items", itemsPath,
      "--votes", votesPath,
      "--annotators", ANNOTATORS.join(","),
      "--port", String(port),
    ],
    { stdio: "ignore" },
  );
}

async function waitForServer(baseUrl: string, timeoutMs = 20000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${baseUrl}/api/progress`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error(`review server at ${baseUrl} did not start`);
}

async function killHard(child: ChildProcess): Promise<void> {
  if (child.exitCode !== null) return;
  const gone = new Promise((resolve) => child.once("exit", resolve));
  child.kill("SIGKILL");
  await gone;
}

describe("scripted three-annotator review flow", () => {
  const workdir = mkdtempSync(join(tmpdir(), "bookprobe-ui-"));
  const itemsPath = join(workdir, "items.jsonl");
  const votesPath = join(workdir, "votes.log");
  let port: number;
  let baseUrl: string;
  let server: ChildProcess;

  beforeAll(async () => {
    const items = serverItems(10);
    writeFileSync(itemsPath, items.map((item) => JSON.stringify(item)).join("\n") + "\n");
    port = await freePort();
    baseUrl = `http://127.0.0.1:${port}`;
    server = spawnServer(itemsPath, votesPath, port);
    await waitForServer(baseUrl);
  }, 30000);

  afterAll(async () => {
    await killHard(server);
  });

  it("produces exactly the unanimity-filtered keep set, then survives kill -9", async () => {
    // Script: every annotator works through their queue in UI order.
    //   item 6: ann3 skips (two votes -> pending)
    //   item 7: ann2 rejects (mixed verdicts -> dropped)
    //   item 9: ann3 accepts but flags it (flagged -> dropped)
    const sessions = Object.fromEntries(
      ANNOTATORS.map((annotator) => [
        annotator,
        new AnnotatorSession(new ReviewApi(baseUrl), annotator, new MemoryStore(), 20),
      ]),
    );

    for (const annotator of ANNOTATORS) {
      const session = sessions[annotator]!;
      await session.load();
      while (session.current()) {
        const item = session.current()!;
        if (annotator === "ann3" && item.item_id === 6) {
          const before = item.item_id;
          session.advance();
          if (session.current()?.item_id === before) break; // skipped last item
          continue;
        }
        if (annotator === "ann2" && item.item_id === 7) {
          const result = await session.submit("reject");
          expect(result.acked).toBe(true);
          continue;
        }
        if (annotator === "ann3" && item.item_id === 9) {
          session.toggleFlag("multiple_names");
          const result = await session.submit("accept");
          expect(result.acked).toBe(true);
          continue;
        }
        const result = await session.submit("accept");
        expect(result.acked).toBe(true);
      }
    }

    const api = new ReviewApi(baseUrl);
    const exported = await api.exportSets();
    expect(exported.kept).toEqual([0, 1, 2, 3, 4, 5, 8]);
    expect(exported.dropped).toEqual([7, 9]);
    expect(exported.pending).toEqual([6]);

    const progressBefore = await api.progress();
    expect(progressBefore.annotators["ann1"]).toBe(10);
    expect(progressBefore.annotators["ann2"]).toBe(10);
    expect(progressBefore.annotators["ann3"]).toBe(9);

    // Kill the server without warning and restart on the same log.
    await killHard(server);
    server = spawnServer(itemsPath, votesPath, port);
    await waitForServer(baseUrl);

    const progressAfter = await api.progress();
    expect(progressAfter).toEqual(progressBefore);
    const exportedAfter = await api.exportSets();
    expect(exportedAfter).toEqual(exported);
  }, 60000);
});
