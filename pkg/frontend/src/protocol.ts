/**
 * Wire protocol between the dashboard and the navigation gateway.
 *
 * Every frame on the socket is a JSON object tagged with `type`; server
 * frames additionally carry the `session_id` they belong to. The types
 * here mirror the gateway payloads field for field: the dashboard
 * renders what the server reports and never invents state of its own.
 */

// ---------------------------------------------------------------------------
// Shared vocabulary
// ---------------------------------------------------------------------------

export type SteerCommand = "auto" | "stop" | "forward" | "left" | "right";
export type PerceptionMode = "perfect" | "confused";
export type SensitivityLevel = "low" | "medium" | "high";

/** The thirteen tactile patterns the temples can play. */
export const PATTERN_IDS = [
  "tap_front",
  "tap_center",
  "tap_back",
  "tap_left",
  "tap_right",
  "slide_front_fast",
  "slide_back_fast",
  "slide_right_fast",
  "slide_left_fast",
  "slide_front_slow",
  "slide_back_slow",
  "slide_right_slow",
  "slide_left_slow",
] as const;

export type PatternId = (typeof PATTERN_IDS)[number];

export function isKnownPattern(id: string): id is PatternId {
  return (PATTERN_IDS as readonly string[]).includes(id);
}

/** A named walking path: waypoints in room coordinates, meters. */
export interface PathSpec {
  name: string;
  waypoints: [number, number][];
}

/** A fixed cylindrical obstacle standing in the room. */
export interface StaticObstacleSpec {
  label: string;
  x_m: number;
  y_m: number;
  radius_m: number;
  height_m: number;
}

/** A cylinder patrolling a closed loop of waypoints at fixed speed. */
export interface DynamicObstacleSpec {
  label: string;
  radius_m: number;
  height_m: number;
  route: [number, number][];
  speed_mps: number;
}

/** Room description submitted with `start`; the server simulates it. */
export interface EnvironmentSpec {
  room_width_m?: number;
  room_depth_m?: number;
  static_obstacles?: StaticObstacleSpec[];
  dynamic_obstacles?: DynamicObstacleSpec[];
}

// ---------------------------------------------------------------------------
// Client -> server
// ---------------------------------------------------------------------------

export interface StartMessage {
  type: "start";
  /** A bundled path name, or an inline path of waypoints. */
  path?: string | PathSpec;
  seed?: number;
  perception?: PerceptionMode;
  /** When false the server ticks as fast as it can (replays, tests). */
  realtime?: boolean;
  tick_hz?: number;
  timeout_s?: number;
  sensitivity?: SensitivityLevel;
  environment?: EnvironmentSpec;
}

export interface SteerMessage {
  type: "steer";
  command: SteerCommand;
}

export interface SetSensitivityMessage {
  type: "set_sensitivity";
  sensitivity: SensitivityLevel;
}

export interface ResetMessage {
  type: "reset";
}

export type ClientMessage =
  | StartMessage
  | SteerMessage
  | SetSensitivityMessage
  | ResetMessage;

// ---------------------------------------------------------------------------
// Server -> client
// ---------------------------------------------------------------------------

interface ServerFrame {
  session_id: string;
}

export interface SessionStartedMessage extends ServerFrame {
  type: "session_started";
  path_name: string;
  waypoints: [number, number][];
  seed: number;
  perception: PerceptionMode;
  tick_hz: number;
  /** x_m, y_m, heading_deg at the first tick. */
  start_pose: [number, number, number];
}

/** One simulation tick; always the first message of its tick. */
export interface PoseUpdateMessage extends ServerFrame {
  type: "pose_update";
  tick: number;
  t_s: number;
  x_m: number;
  y_m: number;
  heading_deg: number;
  /** The steer mode in force this tick ("auto" unless overridden). */
  steer: SteerCommand;
}

/** A haptic pattern began playing on the temples. */
export interface CueEventMessage extends ServerFrame {
  type: "cue_event";
  t_s: number;
  /** Pattern the guidance policy asked for. */
  pattern: string;
  /** Pattern the wearer is modeled to feel; may differ when confused. */
  perceived: string;
  start_ms: number;
  duration_ms: number;
}

/** One consolidated object in the wearer's forward view. */
export interface SceneObject {
  label: string;
  cell: string;
  distance_m: number | null;
  persistence_count: number;
  priority: number;
  immediate_hazard: boolean;
}

export interface SceneUpdateMessage extends ServerFrame {
  type: "scene_update";
  objects: SceneObject[];
  hazard: boolean;
}

export interface WaypointReachedMessage extends ServerFrame {
  type: "waypoint_reached";
  index: number;
  t_s: number;
}

export interface TrialMetrics {
  completion_time_s: number;
  waypoints_reached: number;
  pct_time_outside_tolerance: number;
  exit_reenter_count: number;
}

export interface TrialCompleteMessage extends ServerFrame {
  type: "trial_complete";
  completed: boolean;
  timed_out: boolean;
  metrics: TrialMetrics;
  cues: number;
  playbacks: number;
}

export interface SensitivitySetMessage extends ServerFrame {
  type: "sensitivity_set";
  sensitivity: SensitivityLevel;
}

export interface SessionResetMessage extends ServerFrame {
  type: "session_reset";
}

export interface ErrorMessage extends ServerFrame {
  type: "error";
  message: string;
}

export type ServerMessage =
  | SessionStartedMessage
  | PoseUpdateMessage
  | CueEventMessage
  | SceneUpdateMessage
  | WaypointReachedMessage
  | TrialCompleteMessage
  | SensitivitySetMessage
  | SessionResetMessage
  | ErrorMessage;

const SERVER_TYPES: ReadonlySet<string> = new Set([
  "session_started",
  "pose_update",
  "cue_event",
  "scene_update",
  "waypoint_reached",
  "trial_complete",
  "sensitivity_set",
  "session_reset",
  "error",
]);

/**
 * Decode one wire frame. Returns null for frames that are not valid
 * JSON objects or whose type is unknown — the dashboard ignores those
 * rather than guessing.
 */
export function parseServerMessage(raw: string): ServerMessage | null {
  let value: unknown;
  try {
    value = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    return null;
  }
  const type = (value as { type?: unknown }).type;
  if (typeof type !== "string" || !SERVER_TYPES.has(type)) {
    return null;
  }
  return value as ServerMessage;
}
