/**
 * Browser bootstrap: wires the socket client, the mirrored view state,
 * the input debouncer, and the two canvas renderers to the page.
 *
 * One render loop (requestAnimationFrame) repaints from the current
 * snapshot; everything else is event-driven — server messages mutate
 * the state, keyboard events queue steer intents, and each pose tick
 * flushes at most one queued intent back to the server.
 */

import { GatewayClient } from "./client.js";
import { CueAnimator } from "./cues.js";
import { SteerInput } from "./input.js";
import type {
  EnvironmentSpec,
  PerceptionMode,
  SensitivityLevel,
  ServerMessage,
  StartMessage,
} from "./protocol.js";
import { CueRenderer, SceneRenderer } from "./render.js";
import {
  applyServerMessage,
  createViewState,
  recordStartRequest,
  setConnected,
} from "./state.js";

function mustGet<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) {
    throw new Error(`missing element #${id}`);
  }
  return element as T;
}

const sceneCanvas = mustGet<HTMLCanvasElement>("scene");
const cueCanvas = mustGet<HTMLCanvasElement>("cues");
const urlInput = mustGet<HTMLInputElement>("gateway-url");
const pathInput = mustGet<HTMLInputElement>("path-name");
const seedInput = mustGet<HTMLInputElement>("seed");
const perceptionSelect = mustGet<HTMLSelectElement>("perception");
const sensitivitySelect = mustGet<HTMLSelectElement>("sensitivity");
const environmentInput = mustGet<HTMLTextAreaElement>("environment-json");
const connectButton = mustGet<HTMLButtonElement>("connect");
const startButton = mustGet<HTMLButtonElement>("start");
const resetButton = mustGet<HTMLButtonElement>("reset");
const autoButton = mustGet<HTMLButtonElement>("auto");
const statusLine = mustGet<HTMLElement>("status");
const metricsPanel = mustGet<HTMLElement>("metrics");
const scenePanel = mustGet<HTMLElement>("scene-objects");
const errorsPanel = mustGet<HTMLElement>("errors");

const state = createViewState();
const animator = new CueAnimator();
const input = new SteerInput();
const sceneRenderer = new SceneRenderer(sceneCanvas.width, sceneCanvas.height);
const cueRenderer = new CueRenderer(cueCanvas.width, cueCanvas.height);

let client: GatewayClient | null = null;

function describeStatus(): string {
  if (!state.connected) {
    return "disconnected";
  }
  switch (state.phase) {
    case "idle":
      return "connected — ready to start";
    case "running":
      return `running ${state.pathName ?? ""} · tick ${state.tick} · t=${state.tS.toFixed(1)}s · steer ${state.steer}`;
    case "finished":
      return state.completed ? "trial complete" : "trial timed out";
  }
}

function renderMetricsPanel(): void {
  if (!state.metrics) {
    metricsPanel.textContent = state.phase === "running" ? "trial in progress…" : "no trial yet";
    return;
  }
  const m = state.metrics;
  metricsPanel.innerHTML = [
    `<dt>completed</dt><dd>${state.completed ? "yes" : "no"}${state.timedOut ? " (timed out)" : ""}</dd>`,
    `<dt>completion time</dt><dd>${m.completion_time_s.toFixed(1)} s</dd>`,
    `<dt>waypoints reached</dt><dd>${m.waypoints_reached} / ${state.waypoints.length}</dd>`,
    `<dt>time outside corridor</dt><dd>${m.pct_time_outside_tolerance.toFixed(1)}%</dd>`,
    `<dt>corridor exits</dt><dd>${m.exit_reenter_count}</dd>`,
    `<dt>cues / playbacks</dt><dd>${state.cueCount} / ${state.playbackCount}</dd>`,
  ].join("");
}

function renderScenePanel(): void {
  if (state.scene.length === 0) {
    scenePanel.textContent = state.hazard ? "HAZARD" : "clear view";
    return;
  }
  const rows = state.scene.map((o) => {
    const distance = o.distance_m === null ? "—" : `${o.distance_m.toFixed(2)} m`;
    const hazard = o.immediate_hazard ? " ⚠" : "";
    return `<li>${o.label} @ ${o.cell} · ${distance} · seen ×${o.persistence_count}${hazard}</li>`;
  });
  scenePanel.innerHTML = `<ul>${rows.join("")}</ul>`;
}

function renderErrorsPanel(): void {
  errorsPanel.textContent = state.errors.slice(-3).join(" · ");
}

function refreshPanels(): void {
  statusLine.textContent = describeStatus();
  connectButton.textContent = state.connected ? "Disconnect" : "Reconnect";
  renderMetricsPanel();
  renderScenePanel();
  renderErrorsPanel();
}

function onMessage(message: ServerMessage): void {
  applyServerMessage(state, message);
  switch (message.type) {
    case "session_started":
      input.setActive(true);
      animator.clear();
      break;
    case "pose_update": {
      // One steer per tick: flush the newest queued intent, if any.
      const command = input.take();
      if (command && client) {
        client.send({ type: "steer", command });
      }
      break;
    }
    case "cue_event":
      animator.begin(
        {
          pattern: message.pattern,
          perceived: message.perceived,
          durationMs: message.duration_ms,
        },
        performance.now(),
      );
      break;
    case "trial_complete":
    case "session_reset":
      input.setActive(false);
      break;
    default:
      break;
  }
  refreshPanels();
}

function connect(): void {
  if (client && state.connected) {
    client.close();
    return;
  }
  client = new GatewayClient(
    urlInput.value,
    {
      onMessage,
      onStatus: (status) => {
        setConnected(state, status === "open");
        if (status !== "open") {
          input.setActive(false);
        }
        refreshPanels();
      },
    },
    (url) => new WebSocket(url),
  );
  client.connect();
}

function parseEnvironment(): EnvironmentSpec | undefined {
  const text = environmentInput.value.trim();
  if (!text) {
    return undefined;
  }
  try {
    return JSON.parse(text) as EnvironmentSpec;
  } catch {
    state.errors.push("environment box does not contain valid JSON");
    refreshPanels();
    return undefined;
  }
}

function start(): void {
  if (!client || !client.isOpen()) {
    state.errors.push("not connected");
    refreshPanels();
    return;
  }
  const message: StartMessage = {
    type: "start",
    path: pathInput.value.trim() || "path1",
    seed: Number(seedInput.value) || 0,
    perception: perceptionSelect.value as PerceptionMode,
    sensitivity: sensitivitySelect.value as SensitivityLevel,
    realtime: true,
  };
  const environment = parseEnvironment();
  if (environment) {
    message.environment = environment;
  }
  recordStartRequest(state, message);
  client.send(message);
}

connectButton.addEventListener("click", connect);
startButton.addEventListener("click", start);
resetButton.addEventListener("click", () => {
  client?.send({ type: "reset" });
});
autoButton.addEventListener("click", () => {
  input.request("auto");
});

window.addEventListener("keydown", (event) => {
  if (input.press(event.key)) {
    event.preventDefault();
  }
});

function frame(): void {
  const sceneCtx = sceneCanvas.getContext("2d");
  const cueCtx = cueCanvas.getContext("2d");
  if (sceneCtx) {
    sceneRenderer.render(sceneCtx, state);
  }
  if (cueCtx) {
    cueRenderer.render(cueCtx, animator.view(performance.now()));
  }
  requestAnimationFrame(frame);
}

refreshPanels();
requestAnimationFrame(frame);
connect();
