// End-to-end: spawn the real match server, join as the human side over
// the HTTP protocol, and play a session to episode_end with mask-legal
// actions, exactly as the browser client would.

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { SessionClient } from "../src/client.js";
import type { ObservationPayload } from "../src/protocol.js";
import { paletteFor } from "../src/palette.js";

const PYTHON = process.env.PYTHON ?? "python3";
let server: ChildProcess | null = null;
let base = "";
let client: SessionClient;

async function waitReady(url: string, attempts = 60): Promise<void> {
  for (let i = 0; i < attempts; i++) {
    try {
      const response = await fetch(`${url}/api/scenarios`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`server at ${url} never became ready`);
}

beforeAll(async () => {
  const port = 21000 + Math.floor(Math.random() * 3000);
  base = `http://127.0.0.1:${port}`;
  server = spawn(PYTHON, ["-m", "poac.cli", "serve", "--port", String(port)], {
    cwd: new URL("../..", import.meta.url).pathname,
    stdio: "ignore",
  });
  await waitReady(base);
  client = new SessionClient(base);
}, 30_000);

afterAll(() => {
  server?.kill("SIGKILL");
});

describe("human-vs-KAI0 through the protocol", () => {
  it("completes end to end with mask-legal play", async () => {
    const scenarios = await client.scenarios();
    expect(scenarios).toHaveLength(6);
    const scenario = { ...(scenarios[0] as object), max_ticks: 30 };

    const descriptor = await client.createSession({
      scenario, seed: 11, red: "human", blue: "KAI0",
    });
    expect(descriptor.state).toBe("running");

    let acks = 0;
    let steps = 0;
    let winner: string | null = null;
    let sawFoggedEnemy = false;
    let rngState = 0x9e3779b9;
    const nextRandom = () => {
      rngState = (rngState * 1664525 + 1013904223) >>> 0;
      return rngState / 2 ** 32;
    };

    for await (const message of client.stream(descriptor.session, "red")) {
      if (message.kind === "observation") {
        const payload = message.payload as unknown as ObservationPayload;
        // the server applies fog before the payload ever reaches us
        const blue = payload.render_state.units.filter((u) => u.color === "blue");
        if (blue.length < 3) sawFoggedEnemy = true;
        const actions: Record<string, string> = {};
        for (const uid of payload.decidable) {
          const agent = payload.agents[String(uid)]!;
          const unit = payload.render_state.units.find((u) => u.uid === uid)!;
          const options = paletteFor(agent.mask, "red", { row: unit.row, col: unit.col })
            .filter((entry) => entry.kind !== "empty");
          const pick = options[Math.floor(nextRandom() * options.length)]!;
          actions[String(uid)] = pick.action;
        }
        await client.act(descriptor.session, "red", message.tick!, actions);
      } else if (message.kind === "act_ack") {
        acks += 1;
      } else if (message.kind === "step_result") {
        steps += 1;
      } else if (message.kind === "episode_end") {
        winner = message.payload.winner as string;
      } else if (message.kind === "error") {
        throw new Error(`server rejected play: ${message.payload.message}`);
      }
    }

    expect(winner).not.toBeNull();
    expect(["red", "blue", "draw"]).toContain(winner);
    expect(acks).toBeGreaterThan(0);
    expect(steps).toBeGreaterThan(0);
    expect(steps).toBeLessThanOrEqual(30);
    expect(sawFoggedEnemy).toBe(true);  // 13x23 spawn: tanks see each other but not all three

    const finished = await client.describe(descriptor.session);
    expect(finished.state).toBe("finished");
  }, 60_000);

  it("replay endpoints require a configured directory", async () => {
    const response = await fetch(`${base}/api/replays`);
    expect(response.ok).toBe(true);
    expect(await response.json()).toEqual([]);
  });
});
