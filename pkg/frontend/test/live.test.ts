/**
 * Live round trip against a real monitor process: consume its stream,
 * post an operator halt, and watch the confirming state message flip the
 * chip to the halted style.  Requires the backend package on PATH
 * (`pip install -e .` from the repository root installs the CLI).
 */
import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { StreamClient, postCommand } from "../src/client.js";
import { renderStateChip } from "../src/render.js";
import {
  commandResolved,
  commandSubmitted,
  controls,
  gridRows,
  initialState,
  reduce,
  stateChip,
  type DashboardState,
} from "../src/viewmodel.js";
import { FIXTURES_DIR, waitFor } from "./helpers.js";

let child: ChildProcess;
let baseUrl = "";
let client: StreamClient;
let state: DashboardState = initialState();

beforeAll(async () => {
  child = spawn(
    "antmon",
    [
      "replay",
      `${FIXTURES_DIR}cycles_live.csv`,
      "--serve",
      "--port",
      "0",
      "--heartbeat",
      "0.2",
    ],
    { stdio: ["ignore", "ignore", "pipe"] },
  );
  const port = await new Promise<number>((resolve, reject) => {
    let seen = "";
    const timer = setTimeout(
      () => reject(new Error(`server did not announce a port; stderr: ${seen}`)),
      15_000,
    );
    child.stderr!.on("data", (chunk: Buffer) => {
      seen += chunk.toString();
      const m = seen.match(/serving on http:\/\/127\.0\.0\.1:(\d+)/);
      if (m) {
        clearTimeout(timer);
        resolve(Number(m[1]));
      }
    });
    child.on("exit", (code) =>
      reject(new Error(`monitor exited early (code ${code}); stderr: ${seen}`)),
    );
  });
  baseUrl = `http://127.0.0.1:${port}`;

  client = new StreamClient({
    baseUrl,
    backlog: 1000,
    staleAfterMs: 60_000,
    onMessage: (msg) => {
      state = reduce(state, msg);
    },
  });
  client.start();

  // The short replay finishes immediately; wait until the whole day arrived.
  await waitFor(
    () => gridRows(state).length === 8 &&
      gridRows(state).every((r) => r.scoreStatus === "finalized"),
    15_000,
    "all replayed cycles on the stream",
  );
}, 30_000);

afterAll(() => {
  client?.stop();
  child?.kill();
});

describe("operator halt against a live monitor", () => {
  it("halt round-trips to a halted state chip", async () => {
    state = commandSubmitted(state, { command: "halt" });
    expect(controls(state).enabled).toBe(false);

    const result = await postCommand(baseUrl, { command: "halt" });
    expect(result).toEqual({ ok: true, state: "outc_halted" });
    state = commandResolved(state, result);

    // The confirming state message arrives over the stream and unlocks the UI.
    await waitFor(
      () => stateChip(state).state === "outc_halted",
      10_000,
      "halted state on the stream",
    );
    expect(controls(state).enabled).toBe(true);
    expect(renderStateChip(stateChip(state))).toContain("chip-outc_halted");
  });

  it("resume restores the in-control chip", async () => {
    state = commandSubmitted(state, { command: "resume" });
    const result = await postCommand(baseUrl, { command: "resume" });
    expect(result).toEqual({ ok: true, state: "inc" });
    state = commandResolved(state, result);
    await waitFor(
      () => stateChip(state).state === "inc",
      10_000,
      "in-control state on the stream",
    );
    expect(renderStateChip(stateChip(state))).toContain("chip-inc");
  });

  it("rejects an invalid transition and surfaces it inline", async () => {
    state = commandSubmitted(state, { command: "resume" });
    const result = await postCommand(baseUrl, { command: "resume" });
    expect(result).toEqual({ ok: false, error: "invalid_transition" });
    state = commandResolved(state, result);
    expect(controls(state).enabled).toBe(true);
    expect(controls(state).error).toBe("invalid_transition");
  });
});
