/**
 * Deterministic HTML renderers.  Each function maps a view object to a
 * markup string — same view in, same string out — which is what the
 * snapshot suite locks down.  No DOM access happens here; `main.ts` owns
 * mounting and event wiring.
 */

import type {
  AlarmBannerView,
  AlarmListItemView,
  ControlsView,
  GridRowView,
  HeatGridView,
  ScorePanelView,
  ScorePointView,
  StateChipView,
} from "./viewmodel.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function hhmm(timestamp: string): string {
  return timestamp.slice(11, 16);
}

// ---------------------------------------------------------------------------
// Cycle grid
// ---------------------------------------------------------------------------

export function renderGridRow(row: GridRowView): string {
  const cells = row.cells
    .map((cell) => {
      const badge = cell.changepoint ? '<span class="cp-badge">CP</span>' : "";
      return `<td class="cell">${cell.value.toFixed(1)}${badge}</td>`;
    })
    .join("");
  const flags = [
    row.hot ? '<span class="flag flag-hot" title="max at or above 195">M</span>' : "",
    row.cold ? '<span class="flag flag-cold" title="min at or below 174">m</span>' : "",
    row.wide ? '<span class="flag flag-wide" title="range at least 13">R</span>' : "",
  ].join("");
  const marker =
    row.scoreStatus === "finalized"
      ? '<span class="marker marker-finalized" title="finalized">●</span>'
      : row.scoreStatus === "provisional"
        ? '<span class="marker marker-provisional" title="provisional">◌</span>'
        : "";
  const total = row.totalScore === null ? "—" : row.totalScore.toFixed(2);
  return (
    `<tr class="grid-row color-${row.color}" data-cycle="${row.cycleId}">` +
    `<td class="time">${escapeHtml(hhmm(row.timestamp))}</td>` +
    cells +
    `<td class="flags">${flags}</td>` +
    `<td class="total">${total}</td>` +
    `<td class="status">${marker}</td>` +
    `</tr>`
  );
}

export function renderGrid(rows: readonly GridRowView[]): string {
  const header =
    "<tr><th>time</th>" +
    Array.from({ length: 8 }, (_, i) => `<th>r${i}</th>`).join("") +
    "<th>flags</th><th>TS</th><th></th></tr>";
  const body = rows.map(renderGridRow).join("\n");
  return `<table class="cycle-grid"><thead>${header}</thead><tbody>\n${body}\n</tbody></table>`;
}

// ---------------------------------------------------------------------------
// Score panel
// ---------------------------------------------------------------------------

const PANEL_W = 640;
const PANEL_H = 200;
const PAD = 8;

function polyline(
  values: readonly number[],
  lo: number,
  hi: number,
  cls: string,
): string {
  if (!values.length) return "";
  const span = hi - lo || 1;
  const stepX = values.length > 1 ? (PANEL_W - 2 * PAD) / (values.length - 1) : 0;
  const pts = values
    .map((v, i) => {
      const x = PAD + i * stepX;
      const y = PANEL_H - PAD - ((v - lo) / span) * (PANEL_H - 2 * PAD);
      return `${x.toFixed(2)},${y.toFixed(2)}`;
    })
    .join(" ");
  return `<polyline class="${cls}" fill="none" points="${pts}"/>`;
}

function refLine(value: number, lo: number, hi: number, cls: string): string {
  const span = hi - lo || 1;
  const y = PANEL_H - PAD - ((value - lo) / span) * (PANEL_H - 2 * PAD);
  if (y < 0 || y > PANEL_H) return "";
  return (
    `<line class="ref ${cls}" x1="${PAD}" x2="${PANEL_W - PAD}" ` +
    `y1="${y.toFixed(2)}" y2="${y.toFixed(2)}"/>`
  );
}

const SERIES: ReadonlyArray<[keyof ScorePointView & string, string]> = [
  ["base", "series-base"],
  ["modified", "series-modified"],
  ["threat", "series-threat"],
  ["environmental", "series-environmental"],
  ["total", "series-total"],
];

export function renderScoreChart(view: ScorePanelView): string {
  const values = view.points.flatMap((p) => [
    p.base,
    p.modified,
    p.threat,
    p.environmental,
    p.total,
  ]);
  const refs = Object.values(view.thresholds);
  const lo = Math.min(0, ...values);
  const hi = Math.max(...refs, ...values, 1);
  const lines = SERIES.map(([key, cls]) =>
    polyline(
      view.points.map((p) => p[key] as number),
      lo,
      hi,
      cls,
    ),
  ).join("");
  const refLines =
    refLine(view.thresholds.base, lo, hi, "ref-base") +
    refLine(view.thresholds.modified, lo, hi, "ref-modified") +
    refLine(view.thresholds.environmental, lo, hi, "ref-environmental") +
    refLine(view.thresholds.total, lo, hi, "ref-total");
  return (
    `<svg class="score-chart" viewBox="0 0 ${PANEL_W} ${PANEL_H}" ` +
    `preserveAspectRatio="none">${refLines}${lines}</svg>`
  );
}

export function renderSparkline(values: readonly number[]): string {
  const w = 160;
  const h = 40;
  if (!values.length) {
    return `<svg class="sparkline" viewBox="0 0 ${w} ${h}"></svg>`;
  }
  const lo = Math.min(...values, 0);
  const hi = Math.max(...values, 1);
  const span = hi - lo || 1;
  const stepX = values.length > 1 ? (w - 4) / (values.length - 1) : 0;
  const pts = values
    .map((v, i) => {
      const x = 2 + i * stepX;
      const y = h - 2 - ((v - lo) / span) * (h - 4);
      return `${x.toFixed(2)},${y.toFixed(2)}`;
    })
    .join(" ");
  return (
    `<svg class="sparkline" viewBox="0 0 ${w} ${h}">` +
    `<polyline fill="none" points="${pts}"/></svg>`
  );
}

export function renderHeatGrid(view: HeatGridView): string {
  const header =
    "<tr><th></th>" +
    view.days.map((d) => `<th>${escapeHtml(d.slice(5))}</th>`).join("") +
    "</tr>";
  const rows = view.hours
    .map((hour, r) => {
      const cells = view.days
        .map((_, c) => {
          const v = view.cells[r]?.[c] ?? null;
          if (v === null) return '<td class="heat-cell empty"></td>';
          const alpha = view.max > 0 ? Math.min(1, Math.max(0, v / view.max)) : 0;
          return (
            `<td class="heat-cell" style="--heat:${alpha.toFixed(3)}">` +
            `${v.toFixed(1)}</td>`
          );
        })
        .join("");
      const label = `${String(hour).padStart(2, "0")}:00`;
      return `<tr><th>${label}</th>${cells}</tr>`;
    })
    .join("\n");
  return `<table class="heat-grid"><thead>${header}</thead><tbody>\n${rows}\n</tbody></table>`;
}

export function renderScorePanel(view: ScorePanelView): string {
  const latest = view.points.length
    ? view.points[view.points.length - 1]!
    : null;
  const readout = latest
    ? `<dl class="score-readout">` +
      `<dt>BS</dt><dd>${latest.base.toFixed(2)}</dd>` +
      `<dt>MBS</dt><dd>${latest.modified.toFixed(2)}</dd>` +
      `<dt>ThS</dt><dd>${latest.threat.toFixed(2)}</dd>` +
      `<dt>ES</dt><dd>${latest.environmental.toFixed(2)}${latest.esDeficient ? "*" : ""}</dd>` +
      `<dt>TS</dt><dd>${latest.total.toFixed(2)}</dd>` +
      `</dl>`
    : '<p class="empty">no scores yet</p>';
  return (
    `<div class="score-panel">` +
    readout +
    renderScoreChart(view) +
    `<div class="spark-row"><span>today's TS</span>${renderSparkline(view.sparkline)}</div>` +
    renderHeatGrid(view.heat) +
    `</div>`
  );
}

// ---------------------------------------------------------------------------
// Status and controls
// ---------------------------------------------------------------------------

export function renderStateChip(chip: StateChipView): string {
  const since = chip.since ? ` <small>since ${escapeHtml(hhmm(chip.since))}</small>` : "";
  return (
    `<span class="chip chip-${chip.state}">${escapeHtml(chip.label)}${since}</span>`
  );
}

export function renderAlarmBanner(banner: AlarmBannerView): string {
  if (!banner.active) return "";
  return `<div class="banner banner-alarm" data-tone="${banner.tone}">${escapeHtml(banner.text)}</div>`;
}

export function renderStaleBanner(stale: boolean, connected: boolean): string {
  if (!connected) {
    return '<div class="banner banner-stale">connection lost — reconnecting…</div>';
  }
  if (stale) {
    return '<div class="banner banner-stale">stream silent — data may be stale</div>';
  }
  return "";
}

export function renderAlarmList(items: readonly AlarmListItemView[]): string {
  if (!items.length) return '<p class="empty">no alarms</p>';
  const rows = items
    .map((a) => {
      const ack = a.acknowledged
        ? '<span class="acked">acknowledged</span>'
        : `<button class="ack-btn" data-action="acknowledge" data-alarm="${a.alarmId}">acknowledge</button>`;
      const note = a.note ? ` <em>${escapeHtml(a.note)}</em>` : "";
      return (
        `<li class="alarm-item kind-${escapeHtml(a.kind)}" data-alarm="${a.alarmId}">` +
        `<strong>#${a.alarmId}</strong> ${escapeHtml(a.kind)} at ${escapeHtml(hhmm(a.timestamp))} ` +
        `[${a.triggers.map(escapeHtml).join(", ")}] ${ack}${note}</li>`
      );
    })
    .join("\n");
  return `<ul class="alarm-list">\n${rows}\n</ul>`;
}

export function renderControls(view: ControlsView): string {
  const dis = view.enabled ? "" : " disabled";
  const halt = view.haltVisible
    ? `<button class="cmd-btn halt" data-action="halt"${dis}>halt line</button>`
    : "";
  const resume = view.resumeVisible
    ? `<button class="cmd-btn resume" data-action="resume"${dis}>resume</button>`
    : "";
  const pending = view.pendingAction
    ? `<span class="pending">waiting for ${escapeHtml(view.pendingAction)} confirmation…</span>`
    : "";
  const error = view.error
    ? `<span class="cmd-error">rejected: ${escapeHtml(view.error)}</span>`
    : "";
  return `<div class="controls">${halt}${resume}${pending}${error}</div>`;
}
