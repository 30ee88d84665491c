/**
 * Wire contracts for the monitor's JSON-lines event stream and command
 * endpoint.  Every number shown anywhere in the dashboard comes from one of
 * these messages — the client never recomputes a score.
 */

/** Row colour assigned by the backend annotator. */
export type RowColor = "none" | "violet" | "red" | "orange" | "blue";

/** Monitor run-state names as they appear on the stream. */
export type SystemStateName = "inc" | "suspected_outc" | "outc_halted";

/** A score record is provisional until its lookahead window closes. */
export type ScoreStatus = "provisional" | "finalized";

/** Per-cycle annotation: readings, colour, flags and change-points. */
export interface AnnotationMessage {
  type: "annotation";
  seq: number;
  cycle_id: number;
  timestamp: string;
  readings: number[];
  color: RowColor;
  extreme_max: boolean;
  extreme_min: boolean;
  extreme_range: boolean;
  changepoints: number[];
  changepoint_count: number;
}

/** Per-cycle score record (one provisional, later one finalized). */
export interface ScoreMessage {
  type: "score";
  seq: number;
  cycle_id: number;
  timestamp: string;
  status: ScoreStatus;
  base_score: number;
  lookahead_factor: number;
  trend_factor: number;
  modified_score: number;
  threat_score: number;
  environmental_score: number;
  total_score: number;
  es_deficient: boolean;
}

/** Raised alarm or forecast warning. */
export interface AlarmMessage {
  type: "alarm" | "forecast";
  seq: number;
  alarm_id: number;
  cycle_id: number;
  timestamp: string;
  kind: string;
  triggers: string[];
  acknowledged: boolean;
  operator_action: string;
  note: string;
  slope: number | null;
}

export interface OpenAlarmRef {
  alarm_id: number;
  acknowledged: boolean;
  operator_action: string;
}

/** Monitor state transition (also re-sent after accepted commands). */
export interface StateMessage {
  type: "state";
  seq: number;
  state: SystemStateName;
  since: string | null;
  open_alarms: OpenAlarmRef[];
}

/** Keep-alive emitted during quiet stretches; carries no sequence number. */
export interface HeartbeatMessage {
  type: "heartbeat";
  timestamp: string;
}

export type StreamMessage =
  | AnnotationMessage
  | ScoreMessage
  | AlarmMessage
  | StateMessage
  | HeartbeatMessage;

/** Operator command posted to the command endpoint. */
export interface CommandRequest {
  command: "halt" | "resume" | "acknowledge" | "note";
  alarm_id?: number;
  text?: string;
  timestamp?: string;
}

export type CommandResult =
  | { ok: true; state: SystemStateName }
  | { ok: false; error: string };

const MESSAGE_TYPES = new Set([
  "annotation",
  "score",
  "alarm",
  "forecast",
  "state",
  "heartbeat",
]);

/**
 * Parse one stream line.  Returns null for blank lines and unrecognised
 * message types so newer backends can add types without breaking old UIs.
 */
export function parseMessage(line: string): StreamMessage | null {
  const trimmed = line.trim();
  if (!trimmed) return null;
  let raw: unknown;
  try {
    raw = JSON.parse(trimmed);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const type = (raw as { type?: unknown }).type;
  if (typeof type !== "string" || !MESSAGE_TYPES.has(type)) return null;
  return raw as StreamMessage;
}

/** Alarm thresholds mirrored from the monitor's default policy, used only
 * to draw reference lines on the score panel. */
export const DEFAULT_THRESHOLDS = {
  base: 12.0,
  modified: 15.0,
  environmental: 8.5,
  total: 20.0,
} as const;

export type Thresholds = { [K in keyof typeof DEFAULT_THRESHOLDS]: number };
