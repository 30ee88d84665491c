/**
 * Stream consumer and command poster.
 *
 * One long-lived fetch reads the monitor's JSON-lines stream; a silence
 * timer raises the stale flag, and a dropped connection triggers an
 * automatic reconnect that re-requests backlog (the reducer's sequence
 * numbers make replayed messages idempotent).  Works on the browser and
 * Node fetch implementations alike, which is how the integration test
 * drives a real server.
 */

import type {
  CommandRequest,
  CommandResult,
  StreamMessage,
  SystemStateName,
} from "./types.js";
import { parseMessage } from "./types.js";

export interface StreamStatus {
  connected: boolean;
  stale: boolean;
}

export interface StreamClientOptions {
  baseUrl: string;
  onMessage: (msg: StreamMessage) => void;
  onStatus?: (status: StreamStatus) => void;
  /** How many buffered messages to request when (re)connecting. */
  backlog?: number;
  /** Silence on the wire longer than this marks the data stale. */
  staleAfterMs?: number;
  /** Base delay between reconnect attempts (doubles up to 8x). */
  reconnectDelayMs?: number;
}

const sleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class StreamClient {
  private readonly opts: Required<Omit<StreamClientOptions, "onStatus">> &
    Pick<StreamClientOptions, "onStatus">;
  private running = false;
  private controller: AbortController | null = null;
  private staleTimer: ReturnType<typeof setTimeout> | null = null;
  private status: StreamStatus = { connected: false, stale: false };

  constructor(options: StreamClientOptions) {
    this.opts = {
      backlog: 1000,
      staleAfterMs: 30_000,
      reconnectDelayMs: 500,
      ...options,
    };
  }

  start(): void {
    if (this.running) return;
    this.running = true;
    void this.loop();
  }

  stop(): void {
    this.running = false;
    this.controller?.abort();
    this.clearStaleTimer();
  }

  private setStatus(patch: Partial<StreamStatus>): void {
    const next = { ...this.status, ...patch };
    if (next.connected === this.status.connected && next.stale === this.status.stale) {
      return;
    }
    this.status = next;
    this.opts.onStatus?.(next);
  }

  private clearStaleTimer(): void {
    if (this.staleTimer !== null) {
      clearTimeout(this.staleTimer);
      this.staleTimer = null;
    }
  }

  private armStaleTimer(): void {
    this.clearStaleTimer();
    this.staleTimer = setTimeout(() => {
      this.setStatus({ stale: true });
    }, this.opts.staleAfterMs);
  }

  private async loop(): Promise<void> {
    let delay = this.opts.reconnectDelayMs;
    while (this.running) {
      try {
        await this.consumeOnce();
        delay = this.opts.reconnectDelayMs; // clean close: reset backoff
      } catch {
        // fall through to reconnect
      }
      this.setStatus({ connected: false });
      this.clearStaleTimer();
      if (!this.running) break;
      await sleep(delay);
      delay = Math.min(delay * 2, this.opts.reconnectDelayMs * 8);
    }
  }

  private async consumeOnce(): Promise<void> {
    this.controller = new AbortController();
    const url = `${this.opts.baseUrl}/stream?backlog=${this.opts.backlog}`;
    const resp = await fetch(url, { signal: this.controller.signal });
    if (!resp.ok || !resp.body) {
      throw new Error(`stream request failed: ${resp.status}`);
    }
    this.setStatus({ connected: true, stale: false });
    this.armStaleTimer();
    const reader = resp.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    try {
      for (;;) {
        const { done, value } = await reader.read();
        if (done) break;
        buffer += decoder.decode(value, { stream: true });
        let idx;
        while ((idx = buffer.indexOf("\n")) >= 0) {
          const line = buffer.slice(0, idx);
          buffer = buffer.slice(idx + 1);
          const msg = parseMessage(line);
          if (msg) {
            this.setStatus({ stale: false });
            this.armStaleTimer();
            this.opts.onMessage(msg);
          }
        }
      }
    } finally {
      reader.releaseLock();
    }
  }
}

/** Post one operator command; never throws, always returns a result. */
export async function postCommand(
  baseUrl: string,
  cmd: CommandRequest,
): Promise<CommandResult> {
  let resp: Response;
  try {
    resp = await fetch(`${baseUrl}/command`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(cmd),
    });
  } catch {
    return { ok: false, error: "network" };
  }
  try {
    const body = (await resp.json()) as {
      ok?: boolean;
      error?: string;
      state?: string;
    } | null;
    if (body && body.ok === true && typeof body.state === "string") {
      return { ok: true, state: body.state as SystemStateName };
    }
    return { ok: false, error: body?.error ?? `http_${resp.status}` };
  } catch {
    return { ok: false, error: `http_${resp.status}` };
  }
}
