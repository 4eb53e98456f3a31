// Application wiring: the live-play view (human vs bots or agents) and
// the replay viewer.  All game knowledge comes from server payloads; this
// file only routes clicks to action strings and payloads to the canvas.

import { drawBoard } from "./board.js";
import { SessionClient } from "./client.js";
import { boardPixelSize, pixelToCell } from "./hexmath.js";
import { paletteFor, type PaletteEntry } from "./palette.js";
import {
  STOP_ACTION,
  describeEvent,
  type Envelope,
  type GameEvent,
  type ObservationPayload,
  type RenderState,
  type Side,
} from "./protocol.js";
import { ReplayController, type FogSide } from "./replay.js";
import { buildBoard, cellKey, type BoardViewModel } from "./viewmodel.js";

const HEX_SIZE = 16;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function log(container: HTMLElement, text: string, kind = ""): void {
  const line = document.createElement("div");
  line.className = `log-line ${kind}`;
  line.textContent = text;
  container.appendChild(line);
  container.scrollTop = container.scrollHeight;
}

// ---------------------------------------------------------------------------
// Live play

class PlayView {
  private client = new SessionClient();
  private canvas = el<HTMLCanvasElement>("play-board");
  private palette = el<HTMLDivElement>("palette");
  private eventLog = el<HTMLDivElement>("play-log");
  private status = el<HTMLDivElement>("play-status");
  private pendingList = el<HTMLDivElement>("pending");

  private session: string | null = null;
  private side: Side = "red";
  private vm: BoardViewModel | null = null;
  private observation: ObservationPayload | null = null;
  private observationTick = 0;
  private pending = new Map<number, string>();
  private selected: number | null = null;
  private abort: AbortController | null = null;

  constructor() {
    el<HTMLButtonElement>("start").addEventListener("click", () => void this.start());
    el<HTMLButtonElement>("end-turn").addEventListener("click", () => void this.commit());
    this.canvas.addEventListener("click", (ev) => this.onBoardClick(ev));
    document.addEventListener("keydown", (ev) => this.onKey(ev));
    void this.populateScenarios();
  }

  private async populateScenarios(): Promise<void> {
    try {
      const scenarios = await this.client.scenarios();
      const select = el<HTMLSelectElement>("scenario");
      select.innerHTML = "";
      for (const s of scenarios) {
        const option = document.createElement("option");
        option.value = String(s.scenario_id);
        option.textContent = `${s.scenario_id}: ${s.name}`;
        select.appendChild(option);
      }
    } catch {
      this.status.textContent = "server unreachable; is `poac serve` running?";
    }
  }

  private async start(): Promise<void> {
    this.abort?.abort();
    this.abort = new AbortController();
    this.eventLog.innerHTML = "";
    this.side = el<HTMLSelectElement>("side").value as Side;
    const opponent = el<HTMLSelectElement>("opponent").value;
    const request = {
      scenario: Number(el<HTMLSelectElement>("scenario").value),
      seed: Number(el<HTMLInputElement>("seed").value) || 0,
      red: this.side === "red" ? "human" : opponent,
      blue: this.side === "blue" ? "human" : opponent,
    };
    const descriptor = await this.client.createSession(request);
    this.session = descriptor.session;
    this.status.textContent = `session ${descriptor.session}: you are ${this.side}`;
    void this.pump();
  }

  private async pump(): Promise<void> {
    if (!this.session) return;
    try {
      for await (const message of this.client.stream(this.session, this.side, this.abort?.signal)) {
        this.handle(message);
      }
    } catch (err) {
      this.status.textContent = `connection lost (${err}); rejoining...`;
      setTimeout(() => void this.pump(), 1000);  // resume: cursor restarts, render catches up
    }
  }

  private handle(message: Envelope): void {
    switch (message.kind) {
      case "observation": {
        const payload = message.payload as unknown as ObservationPayload;
        this.observation = payload;
        this.observationTick = message.tick ?? 0;
        this.vm = buildBoard(payload.render_state);
        this.pending.clear();
        this.selected = payload.decidable[0] ?? null;
        this.status.textContent = `tick ${this.observationTick}: your move`;
        this.redraw();
        break;
      }
      case "step_result": {
        const rs = message.payload.render_state as RenderState;
        this.vm = buildBoard(rs);
        for (const event of (message.payload.events as GameEvent[]) ?? []) {
          log(this.eventLog, `t${message.tick}: ${describeEvent(event)}`, String(event[0]));
        }
        this.observation = null;
        this.redraw();
        break;
      }
      case "episode_end": {
        const winner = message.payload.winner as string;
        this.status.textContent = winner === "draw" ? "episode over: draw" : `episode over: ${winner} wins`;
        this.vm = buildBoard(message.payload.render_state as RenderState);
        this.observation = null;
        this.redraw();
        break;
      }
      case "act_ack":
        break;
      case "error":
        log(this.eventLog, `server: ${message.payload.message}`, "error");
        break;
    }
  }

  private onBoardClick(ev: MouseEvent): void {
    if (!this.vm) return;
    const rect = this.canvas.getBoundingClientRect();
    const cell = pixelToCell(
      { x: ev.clientX - rect.left, y: ev.clientY - rect.top },
      HEX_SIZE, this.vm.rows, this.vm.cols,
    );
    if (!cell) return;
    const unit = this.vm.byCell.get(cellKey(cell.row, cell.col));
    if (unit && unit.color === this.side && this.isDecidable(unit.uid)) {
      this.selected = unit.uid;
      this.redraw();
      return;
    }
    // clicking a highlighted cell issues the matching move
    const entry = this.currentPalette().find(
      (e) => e.kind === "move" && e.targetCell
        && e.targetCell.row === cell.row && e.targetCell.col === cell.col,
    );
    if (entry && this.selected !== null) {
      this.choose(this.selected, entry.action);
      return;
    }
    if (unit && unit.color !== this.side && this.selected !== null) {
      const shot = this.currentPalette().find(
        (e) => (e.kind === "shoot" || e.kind === "guide") && e.targetUid === unit.uid,
      );
      if (shot) this.choose(this.selected, shot.action);
    }
  }

  private onKey(ev: KeyboardEvent): void {
    if (this.selected === null) return;
    const index = "123456".indexOf(ev.key);
    if (index >= 0) {
      const entry = this.currentPalette().find((e) => e.kind === "move" && e.dir === index);
      if (entry) this.choose(this.selected, entry.action);
    }
  }

  private isDecidable(uid: number): boolean {
    return this.observation?.decidable.includes(uid) ?? false;
  }

  private currentPalette(): PaletteEntry[] {
    if (!this.observation || this.selected === null) return [];
    const agent = this.observation.agents[String(this.selected)];
    if (!agent) return [];
    const unit = this.vm?.byUid.get(this.selected);
    if (!unit) return [];
    return paletteFor(agent.mask, this.side, { row: unit.row, col: unit.col });
  }

  private choose(uid: number, action: string): void {
    this.pending.set(uid, action);
    const remaining = this.observation?.decidable.filter((u) => !this.pending.has(u)) ?? [];
    this.selected = remaining[0] ?? this.selected;
    this.redraw();
  }

  private async commit(): Promise<void> {
    if (!this.session || !this.observation) return;
    const actions: Record<string, string> = {};
    for (const uid of this.observation.decidable) {
      actions[String(uid)] = this.pending.get(uid) ?? STOP_ACTION;
    }
    await this.client.act(this.session, this.side, this.observationTick, actions);
  }

  private redraw(): void {
    if (!this.vm) return;
    const palette = this.currentPalette();
    sizeCanvas(this.canvas, this.vm);
    const ctx = this.canvas.getContext("2d")!;
    drawBoard(ctx, this.vm, {
      size: HEX_SIZE,
      selectedUid: this.selected,
      highlightCells: palette.filter((e) => e.targetCell).map((e) => e.targetCell!),
      targetUids: palette.filter((e) => e.targetUid !== undefined).map((e) => e.targetUid!),
    });
    this.renderPalette(palette);
    this.renderPending();
  }

  private renderPalette(entries: PaletteEntry[]): void {
    this.palette.innerHTML = "";
    if (this.selected === null || !this.observation) return;
    const title = document.createElement("div");
    title.className = "palette-title";
    title.textContent = `unit ${this.selected}`;
    this.palette.appendChild(title);
    for (const entry of entries) {
      const button = document.createElement("button");
      button.textContent = entry.label;
      button.className = `palette-${entry.kind}`;
      button.addEventListener("click", () => this.choose(this.selected!, entry.action));
      this.palette.appendChild(button);
    }
  }

  private renderPending(): void {
    this.pendingList.innerHTML = "";
    if (!this.observation) return;
    for (const uid of this.observation.decidable) {
      const row = document.createElement("div");
      const chosen = this.pending.get(uid);
      row.textContent = `unit ${uid}: ${chosen ?? "(stop)"}`;
      this.pendingList.appendChild(row);
    }
  }
}

// ---------------------------------------------------------------------------
// Replay viewer

class ReplayView {
  private client = new SessionClient();
  private canvas = el<HTMLCanvasElement>("replay-board");
  private controller: ReplayController | null = null;
  private timer: number | null = null;

  constructor() {
    el<HTMLButtonElement>("replay-load").addEventListener("click", () => void this.loadSelected());
    el<HTMLButtonElement>("replay-play").addEventListener("click", () => this.togglePlay());
    el<HTMLInputElement>("replay-slider").addEventListener("input", (ev) => {
      this.controller?.seek(Number((ev.target as HTMLInputElement).value));
      this.redraw();
    });
    el<HTMLSelectElement>("replay-fog").addEventListener("change", () => void this.switchFog());
    void this.populate();
  }

  private async populate(): Promise<void> {
    try {
      const names = await this.client.replays();
      const select = el<HTMLSelectElement>("replay-name");
      select.innerHTML = "";
      for (const name of names) {
        const option = document.createElement("option");
        option.value = name;
        option.textContent = name;
        select.appendChild(option);
      }
    } catch {
      el<HTMLDivElement>("replay-status").textContent = "no replay directory served";
    }
  }

  private async loadSelected(): Promise<void> {
    const name = el<HTMLSelectElement>("replay-name").value;
    if (!name) return;
    try {
      this.controller = new ReplayController((side) => this.client.frames(name, side));
      await this.controller.load(el<HTMLSelectElement>("replay-fog").value as FogSide);
    } catch (err) {
      el<HTMLDivElement>("replay-status").textContent = `load refused: ${err}`;
      this.controller = null;
      return;
    }
    const slider = el<HTMLInputElement>("replay-slider");
    slider.max = String(this.controller.length - 1);
    slider.value = "0";
    this.controller.seek(0);
    this.redraw();
  }

  private async switchFog(): Promise<void> {
    if (!this.controller) return;
    await this.controller.load(el<HTMLSelectElement>("replay-fog").value as FogSide);
    this.redraw();
  }

  private togglePlay(): void {
    if (!this.controller) return;
    this.controller.playing = !this.controller.playing;
    el<HTMLButtonElement>("replay-play").textContent = this.controller.playing ? "pause" : "play";
    if (this.controller.playing && this.timer === null) {
      this.timer = window.setInterval(() => {
        if (!this.controller?.playing || !this.controller.advance()) {
          if (this.timer !== null) window.clearInterval(this.timer);
          this.timer = null;
          el<HTMLButtonElement>("replay-play").textContent = "play";
        }
        el<HTMLInputElement>("replay-slider").value = String(this.controller?.index ?? 0);
        this.redraw();
      }, 90);
    }
  }

  private redraw(): void {
    if (!this.controller) return;
    const frame = this.controller.frame;
    const vm = buildBoard(frame.render_state);
    sizeCanvas(this.canvas, vm);
    drawBoard(this.canvas.getContext("2d")!, vm, { size: HEX_SIZE });
    const logBox = el<HTMLDivElement>("replay-log");
    logBox.innerHTML = "";
    for (const line of this.controller.eventLog().slice(-200)) {
      log(logBox, `t${line.tick}: ${line.text}`, line.kind);
    }
    const banner = this.controller.winnerBanner();
    el<HTMLDivElement>("replay-status").textContent = banner
      ? `tick ${frame.tick} — ${banner}`
      : `tick ${frame.tick} / ${this.controller.length - 1}`;
  }
}

function sizeCanvas(canvas: HTMLCanvasElement, vm: BoardViewModel): void {
  const pixel = boardPixelSize(vm.rows, vm.cols, HEX_SIZE);
  const width = Math.ceil(pixel.x);
  const height = Math.ceil(pixel.y);
  if (canvas.width !== width || canvas.height !== height) {
    canvas.width = width;
    canvas.height = height;
  }
}

function switchTab(name: "play" | "replay"): void {
  el<HTMLDivElement>("tab-play").style.display = name === "play" ? "" : "none";
  el<HTMLDivElement>("tab-replay").style.display = name === "replay" ? "" : "none";
  el<HTMLButtonElement>("show-play").classList.toggle("active", name === "play");
  el<HTMLButtonElement>("show-replay").classList.toggle("active", name === "replay");
}

el<HTMLButtonElement>("show-play").addEventListener("click", () => switchTab("play"));
el<HTMLButtonElement>("show-replay").addEventListener("click", () => switchTab("replay"));
new PlayView();
new ReplayView();
switchTab("play");
