/**
 * Browser entry point: owns the DOM, the audio cue, and the single stream
 * consumer.  All state lives in the pure view-model; this file only feeds
 * messages in and paints the selector outputs out.
 */

import { StreamClient, postCommand } from "./client.js";
import type { CommandRequest } from "./types.js";
import {
  renderAlarmBanner,
  renderAlarmList,
  renderControls,
  renderGrid,
  renderScorePanel,
  renderStaleBanner,
  renderStateChip,
} from "./render.js";
import {
  alarmBanner,
  alarmList,
  commandResolved,
  commandSubmitted,
  controls,
  gridRows,
  initialState,
  markConnected,
  markStale,
  reduce,
  scorePanel,
  stateChip,
  type DashboardState,
} from "./viewmodel.js";

const baseUrl = window.location.origin;

let state: DashboardState = initialState();
let frame: number | null = null;

function mount(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing mount point #${id}`);
  return el;
}

const els = {
  banners: mount("banners"),
  chip: mount("state-chip"),
  grid: mount("grid"),
  panel: mount("score-panel"),
  alarms: mount("alarms"),
  controls: mount("controls"),
};

function paint(): void {
  frame = null;
  const banner = alarmBanner(state);
  els.banners.innerHTML =
    renderStaleBanner(state.stale, state.connected) + renderAlarmBanner(banner);
  els.chip.innerHTML = renderStateChip(stateChip(state));
  els.grid.innerHTML = renderGrid(gridRows(state));
  els.panel.innerHTML = renderScorePanel(scorePanel(state));
  els.alarms.innerHTML = renderAlarmList(alarmList(state));
  els.controls.innerHTML = renderControls(controls(state));
  els.grid.scrollTop = els.grid.scrollHeight;
  setTone(banner.tone);
}

function apply(next: DashboardState): void {
  state = next;
  if (frame === null) frame = requestAnimationFrame(paint);
}

// --- repeating audible cue until every alarm is acknowledged ---------------

let audio: AudioContext | null = null;
let toneTimer: ReturnType<typeof setInterval> | null = null;

function beep(): void {
  if (!audio) return;
  const osc = audio.createOscillator();
  const gain = audio.createGain();
  osc.frequency.value = 880;
  gain.gain.setValueAtTime(0.08, audio.currentTime);
  gain.gain.exponentialRampToValueAtTime(0.0001, audio.currentTime + 0.25);
  osc.connect(gain).connect(audio.destination);
  osc.start();
  osc.stop(audio.currentTime + 0.25);
}

function setTone(active: boolean): void {
  if (active && toneTimer === null) {
    toneTimer = setInterval(beep, 1200);
    beep();
  } else if (!active && toneTimer !== null) {
    clearInterval(toneTimer);
    toneTimer = null;
  }
}

// Browsers gate audio behind a user gesture; arm the context on first click.
document.addEventListener(
  "click",
  () => {
    if (!audio && typeof AudioContext !== "undefined") {
      audio = new AudioContext();
    }
  },
  { once: true },
);

// --- operator commands ------------------------------------------------------

async function submitAction(cmd: CommandRequest): Promise<void> {
  apply(commandSubmitted(state, cmd));
  const result = await postCommand(baseUrl, cmd);
  apply(commandResolved(state, result));
}

document.addEventListener("click", (ev) => {
  const target = (ev.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (!target || target.hasAttribute("disabled")) return;
  const action = target.dataset.action;
  if (action === "halt" || action === "resume") {
    void submitAction({ command: action });
  } else if (action === "acknowledge") {
    const alarmId = Number(target.dataset.alarm);
    if (Number.isFinite(alarmId)) {
      void submitAction({ command: "acknowledge", alarm_id: alarmId });
    }
  } else if (action === "note") {
    const input = document.getElementById("note-input") as HTMLInputElement | null;
    const text = input?.value.trim();
    if (text) {
      void submitAction({ command: "note", text });
      if (input) input.value = "";
    }
  }
});

// --- stream consumer (the page's single event-loop reader) ------------------

const client = new StreamClient({
  baseUrl,
  backlog: 5000,
  staleAfterMs: 15_000,
  onMessage: (msg) => apply(reduce(state, msg)),
  onStatus: (status) =>
    apply(markConnected(markStale(state, status.stale), status.connected)),
});

client.start();
paint();
