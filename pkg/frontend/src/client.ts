// HTTP-bridge session client: create sessions, long-poll the message
// feed, submit acts.  Every payload the UI renders flows through here.

import type { Envelope, Side } from "./protocol.js";

export interface SessionDescriptor {
  session: string;
  scenario: string;
  seed: number;
  red: string;
  blue: string;
  state: string;
  tick: number;
  winner: string;
  error: string | null;
}

export interface CreateSessionRequest {
  scenario: number | object;
  seed: number;
  red: string;
  blue: string;
  realtime_ms?: number;
  record?: boolean;
}

export interface Frame {
  tick: number;
  render_state: import("./protocol.js").RenderState;
  events: import("./protocol.js").GameEvent[];
  reward_red: number;
}

export interface FramesDoc {
  header: { scenario: string; seed: number; red: string; blue: string };
  side: string;
  frames: Frame[];
  footer: { winner: string; ticks: number; final_bloods: number[] } | null;
  truncated: boolean;
}

async function expectJson(response: Response): Promise<any> {
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const message = body && typeof body.error === "string" ? body.error : response.statusText;
    throw new Error(`server error ${response.status}: ${message}`);
  }
  return body;
}

export class SessionClient {
  constructor(private readonly base: string = "") {}

  async createSession(req: CreateSessionRequest): Promise<SessionDescriptor> {
    const response = await fetch(`${this.base}/api/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
    return expectJson(response);
  }

  async describe(session: string): Promise<SessionDescriptor> {
    return expectJson(await fetch(`${this.base}/api/sessions/${session}`));
  }

  async poll(
    session: string, side: Side, after: number, timeoutS = 25,
  ): Promise<{ messages: Envelope[]; next: number }> {
    const url = `${this.base}/api/sessions/${session}/messages?side=${side}&after=${after}&timeout=${timeoutS}`;
    return expectJson(await fetch(url));
  }

  async act(
    session: string, side: Side, tick: number, actions: Record<string, string>,
  ): Promise<void> {
    const response = await fetch(`${this.base}/api/sessions/${session}/act`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ side, tick, actions }),
    });
    await expectJson(response);
  }

  /** Long-poll loop; yields every message in order until the caller stops. */
  async *stream(session: string, side: Side, signal?: AbortSignal): AsyncGenerator<Envelope> {
    let cursor = 0;
    while (!signal?.aborted) {
      const { messages, next } = await this.poll(session, side, cursor);
      cursor = next;
      for (const message of messages) {
        yield message;
        if (message.kind === "episode_end" || message.kind === "error") {
          if (message.kind === "episode_end") return;
        }
      }
    }
  }

  async scenarios(): Promise<Array<{ scenario_id: number; name: string }>> {
    return expectJson(await fetch(`${this.base}/api/scenarios`));
  }

  async replays(): Promise<string[]> {
    return expectJson(await fetch(`${this.base}/api/replays`));
  }

  async frames(name: string, side: "red" | "blue" | "all"): Promise<FramesDoc> {
    return expectJson(await fetch(`${this.base}/api/replays/${name}/frames?side=${side}`));
  }
}
