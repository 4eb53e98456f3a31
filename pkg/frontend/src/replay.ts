// Replay viewer state: a tick scrubber over server-rendered frames with a
// per-side fog toggle and an event log.  Frames for each side are fetched
// lazily through the injected loader, so tests can feed recorded fixtures
// without a server.

import type { Frame, FramesDoc } from "./client.js";
import { describeEvent } from "./protocol.js";

export type FogSide = "red" | "blue" | "all";

export interface EventLogLine {
  tick: number;
  text: string;
  kind: string;
}

export class ReplayController {
  private docs = new Map<FogSide, FramesDoc>();
  private _side: FogSide = "all";
  private _index = 0;
  playing = false;

  constructor(private readonly loader: (side: FogSide) => Promise<FramesDoc>) {}

  async load(side: FogSide): Promise<void> {
    if (!this.docs.has(side)) {
      this.docs.set(side, await this.loader(side));
    }
    this._side = side;
    this._index = Math.min(this._index, this.length - 1);
  }

  get side(): FogSide {
    return this._side;
  }

  get doc(): FramesDoc {
    const doc = this.docs.get(this._side);
    if (!doc) throw new Error(`frames for side ${this._side} not loaded`);
    return doc;
  }

  get length(): number {
    return this.doc.frames.length;
  }

  get index(): number {
    return this._index;
  }

  get frame(): Frame {
    const frame = this.doc.frames[this._index];
    if (!frame) throw new Error(`frame ${this._index} out of range`);
    return frame;
  }

  seek(index: number): void {
    this._index = Math.max(0, Math.min(index, this.length - 1));
  }

  /** Advance one frame; returns false (and stops playback) at the end. */
  advance(): boolean {
    if (this._index + 1 >= this.length) {
      this.playing = false;
      return false;
    }
    this._index += 1;
    return true;
  }

  /** Log of everything that happened up to (and including) the cursor. */
  eventLog(): EventLogLine[] {
    const lines: EventLogLine[] = [];
    for (let i = 1; i <= this._index && i < this.length; i++) {
      const frame = this.doc.frames[i]!;
      for (const event of frame.events) {
        lines.push({ tick: frame.tick, text: describeEvent(event), kind: String(event[0]) });
      }
    }
    return lines;
  }

  /** Winner banner text, shown only once the cursor reaches the end. */
  winnerBanner(): string | null {
    if (this._index < this.length - 1) return null;
    const footer = this.doc.footer;
    if (!footer) return "replay truncated";
    return footer.winner === "draw" ? "draw" : `${footer.winner} wins`;
  }
}
