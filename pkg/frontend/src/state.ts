/**
 * Mirrored session state.
 *
 * The dashboard runs no physics and no prediction: every dynamic field
 * in ViewState is copied verbatim from a server message. The only
 * client-sourced fields are the room layout and obstacle list, which
 * come from the start request the user themselves submitted (the server
 * does not echo the environment back). Rendering reads this snapshot;
 * server messages fold into it through applyServerMessage.
 */

import type {
  EnvironmentSpec,
  PerceptionMode,
  SceneObject,
  SensitivityLevel,
  ServerMessage,
  StartMessage,
  SteerCommand,
  TrialMetrics,
} from "./protocol.js";

// ---------------------------------------------------------------------------
// State shape
// ---------------------------------------------------------------------------

export type SessionPhase = "idle" | "running" | "finished";

export interface AgentPose {
  xM: number;
  yM: number;
  headingDeg: number;
}

/** A cue event as reported by the server, kept for animation/history. */
export interface CueRecord {
  tS: number;
  pattern: string;
  perceived: string;
  startMs: number;
  durationMs: number;
}

/** An obstacle footprint for the scene view (from the start request). */
export interface ObstacleMarker {
  label: string;
  xM: number;
  yM: number;
  radiusM: number;
  moving: boolean;
  /** Patrol loop for moving obstacles, drawn as a dotted track. */
  routeM: [number, number][];
}

export interface RoomSpec {
  widthM: number;
  depthM: number;
}

export interface ViewState {
  phase: SessionPhase;
  connected: boolean;
  sessionId: string | null;

  pathName: string | null;
  waypoints: [number, number][];
  waypointReached: boolean[];
  room: RoomSpec;
  obstacles: ObstacleMarker[];

  pose: AgentPose | null;
  steer: SteerCommand;
  tick: number;
  tS: number;
  tickHz: number;
  seed: number | null;
  perception: PerceptionMode | null;
  sensitivity: SensitivityLevel | null;

  /** Every pose the server reported, in order, for the breadcrumb trail. */
  trail: [number, number][];

  cues: CueRecord[];
  latestCue: CueRecord | null;
  scene: SceneObject[];
  hazard: boolean;

  metrics: TrialMetrics | null;
  completed: boolean | null;
  timedOut: boolean | null;
  cueCount: number;
  playbackCount: number;

  errors: string[];
}

const DEFAULT_ROOM: RoomSpec = { widthM: 6.0, depthM: 6.0 };

export function createViewState(): ViewState {
  return {
    phase: "idle",
    connected: false,
    sessionId: null,
    pathName: null,
    waypoints: [],
    waypointReached: [],
    room: { ...DEFAULT_ROOM },
    obstacles: [],
    pose: null,
    steer: "auto",
    tick: 0,
    tS: 0,
    tickHz: 0,
    seed: null,
    perception: null,
    sensitivity: null,
    trail: [],
    cues: [],
    latestCue: null,
    scene: [],
    hazard: false,
    metrics: null,
    completed: null,
    timedOut: null,
    cueCount: 0,
    playbackCount: 0,
    errors: [],
  };
}

// ---------------------------------------------------------------------------
// Client-side inputs (connection status, the start request itself)
// ---------------------------------------------------------------------------

export function setConnected(state: ViewState, connected: boolean): void {
  state.connected = connected;
}

/**
 * Record the room layout from an outbound start request. Obstacles are
 * the one thing the server does not report back, so the view mirrors
 * the environment the user asked the server to simulate.
 */
export function recordStartRequest(state: ViewState, start: StartMessage): void {
  const env: EnvironmentSpec = start.environment ?? {};
  state.room = {
    widthM: env.room_width_m ?? DEFAULT_ROOM.widthM,
    depthM: env.room_depth_m ?? DEFAULT_ROOM.depthM,
  };
  const markers: ObstacleMarker[] = [];
  for (const o of env.static_obstacles ?? []) {
    markers.push({
      label: o.label,
      xM: o.x_m,
      yM: o.y_m,
      radiusM: o.radius_m,
      moving: false,
      routeM: [],
    });
  }
  for (const o of env.dynamic_obstacles ?? []) {
    const first = o.route[0] ?? [0, 0];
    markers.push({
      label: o.label,
      xM: first[0],
      yM: first[1],
      radiusM: o.radius_m,
      moving: true,
      routeM: o.route.map((p) => [p[0], p[1]]),
    });
  }
  state.obstacles = markers;
  if (start.sensitivity) {
    state.sensitivity = start.sensitivity;
  }
}

// ---------------------------------------------------------------------------
// Server message reducer
// ---------------------------------------------------------------------------

/** Fold one server message into the view state. */
export function applyServerMessage(state: ViewState, message: ServerMessage): void {
  switch (message.type) {
    case "session_started": {
      state.phase = "running";
      state.sessionId = message.session_id;
      state.pathName = message.path_name;
      state.waypoints = message.waypoints.map((w) => [w[0], w[1]]);
      state.waypointReached = state.waypoints.map(() => false);
      state.seed = message.seed;
      state.perception = message.perception;
      state.tickHz = message.tick_hz;
      const [x, y, heading] = message.start_pose;
      state.pose = { xM: x, yM: y, headingDeg: heading };
      state.steer = "auto";
      state.tick = 0;
      state.tS = 0;
      state.trail = [];
      state.cues = [];
      state.latestCue = null;
      state.scene = [];
      state.hazard = false;
      state.metrics = null;
      state.completed = null;
      state.timedOut = null;
      state.cueCount = 0;
      state.playbackCount = 0;
      break;
    }
    case "pose_update": {
      state.pose = { xM: message.x_m, yM: message.y_m, headingDeg: message.heading_deg };
      state.steer = message.steer;
      state.tick = message.tick;
      state.tS = message.t_s;
      state.trail.push([message.x_m, message.y_m]);
      break;
    }
    case "cue_event": {
      const record: CueRecord = {
        tS: message.t_s,
        pattern: message.pattern,
        perceived: message.perceived,
        startMs: message.start_ms,
        durationMs: message.duration_ms,
      };
      state.cues.push(record);
      state.latestCue = record;
      break;
    }
    case "scene_update": {
      state.scene = message.objects;
      state.hazard = message.hazard;
      break;
    }
    case "waypoint_reached": {
      if (message.index >= 0 && message.index < state.waypointReached.length) {
        state.waypointReached[message.index] = true;
      }
      break;
    }
    case "trial_complete": {
      state.phase = "finished";
      state.metrics = message.metrics;
      state.completed = message.completed;
      state.timedOut = message.timed_out;
      state.cueCount = message.cues;
      state.playbackCount = message.playbacks;
      break;
    }
    case "sensitivity_set": {
      state.sensitivity = message.sensitivity;
      break;
    }
    case "session_reset": {
      const room = state.room;
      const obstacles = state.obstacles;
      const connected = state.connected;
      const errors = state.errors;
      Object.assign(state, createViewState());
      state.room = room;
      state.obstacles = obstacles;
      state.connected = connected;
      state.errors = errors;
      break;
    }
    case "error": {
      state.errors.push(message.message);
      break;
    }
  }
}
