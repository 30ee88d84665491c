/**
 * Pure view-model for the supervisor dashboard.
 *
 * `reduce` folds stream messages into an immutable `DashboardState`; the
 * selector functions project that state into render-ready view objects.
 * Nothing in this module touches the DOM, the network, or the clock, so
 * every view is a deterministic function of the messages received — the
 * property the snapshot tests rely on.
 */

import type {
  AlarmMessage,
  AnnotationMessage,
  CommandRequest,
  CommandResult,
  OpenAlarmRef,
  RowColor,
  ScoreMessage,
  ScoreStatus,
  StateMessage,
  StreamMessage,
  SystemStateName,
  Thresholds,
} from "./types.js";
import { DEFAULT_THRESHOLDS } from "./types.js";

/** One fryer cycle as the grid sees it: annotation plus latest score. */
export interface CycleEntry {
  readonly annotation: AnnotationMessage | null;
  readonly score: ScoreMessage | null;
}

/** Latest known view of one alarm (stream event merged with state refs). */
export interface AlarmEntry {
  readonly alarmId: number;
  readonly kind: string;
  readonly cycleId: number;
  readonly timestamp: string;
  readonly triggers: readonly string[];
  readonly acknowledged: boolean;
  readonly operatorAction: string;
  readonly note: string;
  readonly slope: number | null;
}

export interface DashboardState {
  /** Cycle entries keyed by ISO timestamp (unique and time-ordered). */
  readonly cycles: ReadonlyMap<string, CycleEntry>;
  readonly alarms: ReadonlyMap<number, AlarmEntry>;
  readonly system: { readonly state: SystemStateName; readonly since: string | null };
  readonly openAlarms: readonly OpenAlarmRef[];
  readonly lastSeq: number;
  readonly duplicatesDropped: number;
  /** Command in flight; buttons stay disabled until a state message lands. */
  readonly pendingCommand: CommandRequest | null;
  /** Rejection from the last command, shown inline until the next attempt. */
  readonly commandError: string | null;
  readonly stale: boolean;
  readonly connected: boolean;
}

export function initialState(): DashboardState {
  return {
    cycles: new Map(),
    alarms: new Map(),
    system: { state: "inc", since: null },
    openAlarms: [],
    lastSeq: 0,
    duplicatesDropped: 0,
    pendingCommand: null,
    commandError: null,
    stale: false,
    connected: false,
  };
}

function alarmFromMessage(msg: AlarmMessage): AlarmEntry {
  return {
    alarmId: msg.alarm_id,
    kind: msg.type === "forecast" ? "forecast" : msg.kind,
    cycleId: msg.cycle_id,
    timestamp: msg.timestamp,
    triggers: msg.triggers,
    acknowledged: msg.acknowledged,
    operatorAction: msg.operator_action,
    note: msg.note,
    slope: msg.slope,
  };
}

function mergeOpenAlarmRefs(
  alarms: ReadonlyMap<number, AlarmEntry>,
  refs: readonly OpenAlarmRef[],
): ReadonlyMap<number, AlarmEntry> {
  let changed = false;
  const next = new Map(alarms);
  for (const ref of refs) {
    const existing = next.get(ref.alarm_id);
    if (!existing) continue;
    if (
      existing.acknowledged !== ref.acknowledged ||
      existing.operatorAction !== ref.operator_action
    ) {
      next.set(ref.alarm_id, {
        ...existing,
        acknowledged: ref.acknowledged,
        operatorAction: ref.operator_action,
      });
      changed = true;
    }
  }
  return changed ? next : alarms;
}

/** Fold one stream message into the state.  Pure; returns a new state. */
export function reduce(state: DashboardState, msg: StreamMessage): DashboardState {
  if (msg.type === "heartbeat") {
    // Heartbeats carry no data but prove the stream is alive.
    return state.stale ? { ...state, stale: false } : state;
  }
  if (msg.seq <= state.lastSeq) {
    // Replayed backlog after a reconnect; already applied.
    return { ...state, duplicatesDropped: state.duplicatesDropped + 1 };
  }
  const base: DashboardState = { ...state, lastSeq: msg.seq, stale: false };

  switch (msg.type) {
    case "annotation": {
      const cycles = new Map(state.cycles);
      const entry = cycles.get(msg.timestamp) ?? { annotation: null, score: null };
      cycles.set(msg.timestamp, { ...entry, annotation: msg });
      return { ...base, cycles };
    }
    case "score": {
      const cycles = new Map(state.cycles);
      const entry = cycles.get(msg.timestamp) ?? { annotation: null, score: null };
      // A finalized record supersedes the provisional one; never the reverse.
      if (entry.score?.status === "finalized" && msg.status === "provisional") {
        return { ...base, cycles };
      }
      cycles.set(msg.timestamp, { ...entry, score: msg });
      return { ...base, cycles };
    }
    case "alarm":
    case "forecast": {
      const alarms = new Map(state.alarms);
      alarms.set(msg.alarm_id, alarmFromMessage(msg));
      return { ...base, alarms };
    }
    case "state": {
      const alarms = mergeOpenAlarmRefs(state.alarms, msg.open_alarms);
      return {
        ...base,
        alarms,
        system: { state: msg.state, since: msg.since },
        openAlarms: msg.open_alarms,
        // The state message is the confirmation every accepted command
        // produces, so the controls unlock here.
        pendingCommand: null,
      };
    }
  }
}

export function reduceAll(
  state: DashboardState,
  messages: Iterable<StreamMessage>,
): DashboardState {
  let acc = state;
  for (const msg of messages) acc = reduce(acc, msg);
  return acc;
}

/** Record a command the moment it is posted; disables the controls. */
export function commandSubmitted(
  state: DashboardState,
  cmd: CommandRequest,
): DashboardState {
  return { ...state, pendingCommand: cmd, commandError: null };
}

/** Record the command endpoint's reply.  Accepted commands stay pending
 * until their confirming state message arrives on the stream. */
export function commandResolved(
  state: DashboardState,
  result: CommandResult,
): DashboardState {
  if (result.ok) return state;
  return { ...state, pendingCommand: null, commandError: result.error };
}

/** Flip the stale-data flag (driven by the client's silence timer). */
export function markStale(state: DashboardState, stale: boolean): DashboardState {
  return state.stale === stale ? state : { ...state, stale };
}

export function markConnected(
  state: DashboardState,
  connected: boolean,
): DashboardState {
  return state.connected === connected ? state : { ...state, connected };
}

// ---------------------------------------------------------------------------
// Selectors
// ---------------------------------------------------------------------------

export interface GridCellView {
  readonly value: number;
  /** True when the backend marked this slot index as a change-point. */
  readonly changepoint: boolean;
}

export interface GridRowView {
  readonly cycleId: number;
  readonly timestamp: string;
  readonly cells: readonly GridCellView[];
  readonly color: RowColor;
  readonly hot: boolean;
  readonly cold: boolean;
  readonly wide: boolean;
  readonly scoreStatus: ScoreStatus | null;
  readonly totalScore: number | null;
}

/** Grid rows in time order, one per cycle, colours straight off the wire. */
export function gridRows(state: DashboardState): GridRowView[] {
  const keys = [...state.cycles.keys()].sort();
  const rows: GridRowView[] = [];
  for (const key of keys) {
    const entry = state.cycles.get(key);
    const ann = entry?.annotation;
    if (!ann) continue; // score-only entries have nothing to draw yet
    const cps = new Set(ann.changepoints);
    rows.push({
      cycleId: ann.cycle_id,
      timestamp: ann.timestamp,
      cells: ann.readings.map((value, i) => ({
        value,
        changepoint: cps.has(i),
      })),
      color: ann.color,
      hot: ann.extreme_max,
      cold: ann.extreme_min,
      wide: ann.extreme_range,
      scoreStatus: entry?.score?.status ?? null,
      totalScore: entry?.score?.total_score ?? null,
    });
  }
  return rows;
}

export interface ScorePointView {
  readonly cycleId: number;
  readonly timestamp: string;
  readonly status: ScoreStatus;
  readonly base: number;
  readonly modified: number;
  readonly threat: number;
  readonly environmental: number;
  readonly total: number;
  readonly esDeficient: boolean;
}

export interface HeatGridView {
  /** ISO dates, one column per operating day seen on the stream. */
  readonly days: readonly string[];
  /** Hour-of-day rows in operating order (07:00 through 02:00). */
  readonly hours: readonly number[];
  /** Max total score per [hour][day]; null where no cycle landed. */
  readonly cells: ReadonlyArray<ReadonlyArray<number | null>>;
  readonly max: number;
}

export interface ScorePanelView {
  readonly points: readonly ScorePointView[];
  readonly thresholds: Thresholds;
  /** Total-score values of the latest day, for the distribution sparkline. */
  readonly sparkline: readonly number[];
  readonly heat: HeatGridView;
}

/** Operating-day hour order: the line runs 07:00 through 02:58. */
export const OPERATING_HOURS: readonly number[] = [
  7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 0, 1, 2,
];

function scorePoints(state: DashboardState): ScorePointView[] {
  const keys = [...state.cycles.keys()].sort();
  const points: ScorePointView[] = [];
  for (const key of keys) {
    const score = state.cycles.get(key)?.score;
    if (!score) continue;
    points.push({
      cycleId: score.cycle_id,
      timestamp: score.timestamp,
      status: score.status,
      base: score.base_score,
      modified: score.modified_score,
      threat: score.threat_score,
      environmental: score.environmental_score,
      total: score.total_score,
      esDeficient: score.es_deficient,
    });
  }
  return points;
}

function heatGrid(points: readonly ScorePointView[]): HeatGridView {
  const days = [...new Set(points.map((p) => p.timestamp.slice(0, 10)))].sort();
  const dayIndex = new Map(days.map((d, i) => [d, i]));
  const cells: (number | null)[][] = OPERATING_HOURS.map(() =>
    days.map(() => null),
  );
  const hourRow = new Map(OPERATING_HOURS.map((h, i) => [h, i]));
  let max = 0;
  for (const p of points) {
    const row = hourRow.get(Number(p.timestamp.slice(11, 13)));
    const col = dayIndex.get(p.timestamp.slice(0, 10));
    if (row === undefined || col === undefined) continue;
    const cell = cells[row]![col];
    if (cell === null || cell === undefined || p.total > cell) {
      cells[row]![col] = p.total;
    }
    if (p.total > max) max = p.total;
  }
  return { days, hours: OPERATING_HOURS, cells, max };
}

export function scorePanel(
  state: DashboardState,
  thresholds: Thresholds = DEFAULT_THRESHOLDS,
): ScorePanelView {
  const points = scorePoints(state);
  const lastDay = points.length
    ? points[points.length - 1]!.timestamp.slice(0, 10)
    : null;
  const sparkline = points
    .filter((p) => p.timestamp.slice(0, 10) === lastDay)
    .map((p) => p.total);
  return { points, thresholds, sparkline, heat: heatGrid(points) };
}

export interface StateChipView {
  readonly state: SystemStateName;
  readonly label: string;
  readonly since: string | null;
}

const STATE_LABELS: Record<SystemStateName, string> = {
  inc: "In control",
  suspected_outc: "Suspected out-of-control",
  outc_halted: "Halted — out of control",
};

export function stateChip(state: DashboardState): StateChipView {
  return {
    state: state.system.state,
    label: STATE_LABELS[state.system.state],
    since: state.system.since,
  };
}

export interface AlarmBannerView {
  readonly active: boolean;
  /** Repeating audible cue keeps sounding until every alarm is acknowledged. */
  readonly tone: boolean;
  readonly text: string;
}

export function alarmBanner(state: DashboardState): AlarmBannerView {
  const unacked = [...state.alarms.values()]
    .filter((a) => a.kind !== "forecast" && !a.acknowledged)
    .sort((a, b) => a.alarmId - b.alarmId);
  if (!unacked.length) return { active: false, tone: false, text: "" };
  const latest = unacked[unacked.length - 1]!;
  const extra = unacked.length > 1 ? ` (+${unacked.length - 1} more)` : "";
  return {
    active: true,
    tone: true,
    text: `Alarm #${latest.alarmId} at ${latest.timestamp} — ${latest.triggers.join(", ")}${extra}`,
  };
}

export interface AlarmListItemView {
  readonly alarmId: number;
  readonly kind: string;
  readonly timestamp: string;
  readonly triggers: readonly string[];
  readonly acknowledged: boolean;
  readonly operatorAction: string;
  readonly note: string;
}

export function alarmList(state: DashboardState): AlarmListItemView[] {
  return [...state.alarms.values()]
    .sort((a, b) => b.alarmId - a.alarmId)
    .map((a) => ({
      alarmId: a.alarmId,
      kind: a.kind,
      timestamp: a.timestamp,
      triggers: a.triggers,
      acknowledged: a.acknowledged,
      operatorAction: a.operatorAction,
      note: a.note,
    }));
}

export interface ControlsView {
  /** All controls lock while a command awaits its confirming state message. */
  readonly enabled: boolean;
  readonly pendingAction: string | null;
  readonly haltVisible: boolean;
  readonly resumeVisible: boolean;
  readonly error: string | null;
}

export function controls(state: DashboardState): ControlsView {
  return {
    enabled: state.pendingCommand === null,
    pendingAction: state.pendingCommand?.command ?? null,
    haltVisible: state.system.state !== "outc_halted",
    resumeVisible: state.system.state === "outc_halted",
    error: state.commandError,
  };
}
