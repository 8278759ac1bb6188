import { spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { request } from "node:http";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import type { FetchLike } from "../src/api.js";

// vitest runs from the frontend package root, one level into the repo
export const REPO_ROOT = resolve(process.cwd(), "..");

/** Plain node:http fetch with just what ApiClient touches; keeps the
 * tests off the DOM emulator's network stack. */
export const nodeFetch: FetchLike = (input, init = {}) =>
  new Promise((resolvePromise, rejectPromise) => {
    const req = request(
      input,
      {
        method: init.method ?? "GET",
        headers: (init.headers as Record<string, string>) ?? {},
      },
      (res) => {
        const chunks: Buffer[] = [];
        res.on("data", (chunk: Buffer) => chunks.push(chunk));
        res.on("end", () => {
          const text = Buffer.concat(chunks).toString("utf-8");
          const status = res.statusCode ?? 0;
          resolvePromise({
            ok: status >= 200 && status < 300,
            status,
            statusText: res.statusMessage ?? "",
            json: async () => JSON.parse(text) as unknown,
            text: async () => text,
          } as unknown as Response);
        });
      },
    );
    req.on("error", rejectPromise);
    if (typeof init.body === "string") req.write(init.body);
    req.end();
  });

export interface RunningService {
  base: string;
  stop(): Promise<void>;
}

/** Boot the real factsheet service on a private port with a throwaway
 * store, waiting until its schema endpoint answers. */
export async function startService(port: number): Promise<RunningService> {
  const storeDir = mkdtempSync(join(tmpdir(), `efs-webform-${port}-`));
  const child = spawn(
    "python3",
    ["-m", "efs.cli", "serve", "--addr", `127.0.0.1:${port}`, "--store", storeDir],
    { cwd: REPO_ROOT, stdio: ["ignore", "ignore", "pipe"] },
  );
  let stderr = "";
  child.stderr?.on("data", (chunk: Buffer) => {
    stderr += String(chunk);
  });

  const base = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 15_000;
  for (;;) {
    if (child.exitCode !== null) {
      rmSync(storeDir, { recursive: true, force: true });
      throw new Error(`service exited with ${child.exitCode}\n${stderr}`);
    }
    try {
      const response = await nodeFetch(`${base}/api/v1/schema`);
      if (response.ok) break;
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      child.kill();
      rmSync(storeDir, { recursive: true, force: true });
      throw new Error(`service never answered on ${base}\n${stderr}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }

  return {
    base,
    stop: () =>
      new Promise<void>((resolve) => {
        const cleanup = () => {
          rmSync(storeDir, { recursive: true, force: true });
          resolve();
        };
        if (child.exitCode !== null) {
          cleanup();
          return;
        }
        child.once("exit", cleanup);
        child.kill();
      }),
  };
}

/** Poll until a condition holds; for settling debounced round trips. */
export async function until(
  check: () => boolean,
  timeoutMs = 10_000,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!check()) {
    if (Date.now() > deadline) {
      throw new Error("condition never became true");
    }
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}
