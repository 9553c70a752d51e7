/**
 * Start the dialogweave HTTP service for the e2e suite and stop it after.
 * Requires the Python package to be installed (pip install -e ..).
 */

import { spawn, type ChildProcess } from "node:child_process";

const PORT = 8766;
export const BASE_URL = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | undefined;

async function ready(): Promise<boolean> {
  try {
    const r = await fetch(`${BASE_URL}/parse`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ expr: "~" }),
    });
    return r.ok;
  } catch {
    return false;
  }
}

export async function setup(): Promise<void> {
  if (await ready()) return; // a server is already running
  server = spawn(
    "python3",
    ["-m", "dialogweave.cli", "serve", "--port", String(PORT)],
    { stdio: "ignore" },
  );
  for (let i = 0; i < 60; i++) {
    if (await ready()) return;
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error("dialogweave service did not come up on " + BASE_URL);
}

export async function teardown(): Promise<void> {
  server?.kill("SIGTERM");
}
