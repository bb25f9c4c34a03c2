/** Shared fixture loading for the dashboard tests. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { ServerMessage, StartMessage } from "../src/protocol.js";
import type { ViewState } from "../src/state.js";
import { applyServerMessage, createViewState, recordStartRequest } from "../src/state.js";

export interface SessionFixture {
  start: StartMessage;
  /** Every server frame of one recorded session, in arrival order. */
  messages: ServerMessage[];
}

const FIXTURE_PATH = join(
  dirname(fileURLToPath(import.meta.url)),
  "fixtures",
  "session_fixture.json",
);

export function loadFixture(): SessionFixture {
  return JSON.parse(readFileSync(FIXTURE_PATH, "utf-8")) as SessionFixture;
}

/** Replay the fixture (or a prefix of it) into a fresh view state. */
export function replayFixture(upTo?: number): { state: ViewState; fixture: SessionFixture } {
  const fixture = loadFixture();
  const state = createViewState();
  state.connected = true;
  recordStartRequest(state, fixture.start);
  const messages = upTo === undefined ? fixture.messages : fixture.messages.slice(0, upTo);
  for (const message of messages) {
    applyServerMessage(state, message);
  }
  return { state, fixture };
}
