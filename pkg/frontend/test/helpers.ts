import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

import type {
  AnnotationMessage,
  ScoreMessage,
  StreamMessage,
} from "../src/types.js";
import { parseMessage } from "../src/types.js";

export const FIXTURES_DIR = fileURLToPath(new URL("./fixtures/", import.meta.url));

/** The recorded 50-message stream log the snapshot suite replays. */
export function loadFixture(): StreamMessage[] {
  const text = readFileSync(new URL("./fixtures/messages.ndjson", import.meta.url), "utf8");
  const messages = text
    .split("\n")
    .map(parseMessage)
    .filter((m): m is StreamMessage => m !== null);
  if (messages.length !== 50) {
    throw new Error(`fixture must hold 50 messages, got ${messages.length}`);
  }
  return messages;
}

export function annotationsOf(messages: StreamMessage[]): AnnotationMessage[] {
  return messages.filter((m): m is AnnotationMessage => m.type === "annotation");
}

export function scoresOf(messages: StreamMessage[]): ScoreMessage[] {
  return messages.filter((m): m is ScoreMessage => m.type === "score");
}

/** Poll until `cond` holds; fails the test after `timeoutMs`. */
export async function waitFor(
  cond: () => boolean,
  timeoutMs = 10_000,
  label = "condition",
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (cond()) return;
    await new Promise((r) => setTimeout(r, 25));
  }
  throw new Error(`timed out waiting for ${label}`);
}
