// Spawns the backend service in mock mode (bundled uiflow fixtures) for the
// UI flow test. Writes the base URL to tests/.service.json.

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import net from "node:net";
import os from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";

const here = path.dirname(fileURLToPath(import.meta.url));

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = net.createServer();
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

async function waitHealthy(url: string, child: ChildProcess, logs: string[]): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`service exited early (${child.exitCode}):\n${logs.join("")}`);
    }
    try {
      const response = await fetch(`${url}/api/v1/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error(`service never became healthy:\n${logs.join("")}`);
}

export default async function setup(): Promise<() => void> {
  const fixturesDir = execFileSync(
    "python3",
    ["-c", "from pagewright.bundled import bundled_path; print(bundled_path('fixtures', 'uiflow'))"],
    { encoding: "utf-8" },
  ).trim();

  const port = await freePort();
  const dataRoot = mkdtempSync(path.join(os.tmpdir(), "pagewright-ui-"));
  const url = `http://127.0.0.1:${port}`;

  const logs: string[] = [];
  const child = spawn(
    "python3",
    [
      "-m", "pagewright.cli", "serve",
      "--host", "127.0.0.1",
      "--port", String(port),
      "--data-root", dataRoot,
      "--provider", "mock",
      "--fixtures", fixturesDir,
      "--no-install",
      "--port-range-start", "4500",
    ],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  child.stdout?.on("data", (chunk) => logs.push(String(chunk)));
  child.stderr?.on("data", (chunk) => logs.push(String(chunk)));

  await waitHealthy(url, child, logs);
  writeFileSync(path.join(here, "tests", ".service.json"), JSON.stringify({ url }));

  return () => {
    child.kill("SIGTERM");
    rmSync(dataRoot, { recursive: true, force: true });
  };
}
