/**
 * Canvas renderers for the scene view and the cue view.
 *
 * Both renderers draw against a narrow structural slice of the 2D
 * canvas API (DrawSurface) so tests can substitute a recording stub and
 * assert exactly what would hit the screen. All geometry is derived
 * from ViewState — the renderers compute pixels, never state.
 */

import type { ActiveCueView } from "./cues.js";
import type { RoomSpec, ViewState } from "./state.js";

// ---------------------------------------------------------------------------
// Drawing surface
// ---------------------------------------------------------------------------

/** The subset of CanvasRenderingContext2D the renderers use. */
export interface DrawSurface {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  lineCap: CanvasLineCap;
  lineJoin: CanvasLineJoin;
  globalAlpha: number;
  font: string;
  textAlign: CanvasTextAlign;
  textBaseline: CanvasTextBaseline;
  save(): void;
  restore(): void;
  beginPath(): void;
  closePath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, radius: number, startAngle: number, endAngle: number): void;
  fill(): void;
  stroke(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  setLineDash(segments: number[]): void;
}

// ---------------------------------------------------------------------------
// Palette
// ---------------------------------------------------------------------------

export const COLOR_BACKGROUND = "#10141c";
export const COLOR_FLOOR = "#1a2130";
export const COLOR_WALL = "#3a4661";
export const COLOR_PATH = "#5a6a8a";
/** Tolerance band while the agent walks inside it: calm, unobtrusive. */
export const COLOR_BAND_INSIDE = "rgba(96, 116, 156, 0.30)";
/** Tolerance band while the agent has strayed outside it. */
export const COLOR_BAND_OUTSIDE = "rgba(232, 164, 74, 0.45)";
export const COLOR_TRAIL = "#7fd1b9";
export const COLOR_WAYPOINT_PENDING = "#8fa3c8";
export const COLOR_WAYPOINT_REACHED = "#55c78a";
export const COLOR_AGENT_AUTO = "#f2f5fa";
export const COLOR_AGENT_MANUAL = "#ffd166";
export const COLOR_OBSTACLE = "#c85a5a";
export const COLOR_OBSTACLE_MOVING = "#c8874f";
export const COLOR_HAZARD = "#e05555";
export const COLOR_TEXT = "#c7d0e0";
export const COLOR_OVERLAY = "rgba(8, 10, 16, 0.72)";

/** Half-width of the walkable corridor drawn around the path, meters. */
export const PATH_TOLERANCE_M = 0.3;

// ---------------------------------------------------------------------------
// Geometry helpers
// ---------------------------------------------------------------------------

function pointSegmentDistance(
  px: number,
  py: number,
  ax: number,
  ay: number,
  bx: number,
  by: number,
): number {
  const dx = bx - ax;
  const dy = by - ay;
  const lengthSq = dx * dx + dy * dy;
  if (lengthSq === 0) {
    return Math.hypot(px - ax, py - ay);
  }
  let t = ((px - ax) * dx + (py - ay) * dy) / lengthSq;
  t = Math.max(0, Math.min(1, t));
  return Math.hypot(px - (ax + t * dx), py - (ay + t * dy));
}

/** Shortest distance from a point to a polyline, meters. */
export function distanceToPolyline(point: [number, number], line: [number, number][]): number {
  if (line.length === 0) {
    return Infinity;
  }
  const first = line[0]!;
  if (line.length === 1) {
    return Math.hypot(point[0] - first[0], point[1] - first[1]);
  }
  let best = Infinity;
  for (let i = 0; i + 1 < line.length; i += 1) {
    const a = line[i]!;
    const b = line[i + 1]!;
    best = Math.min(best, pointSegmentDistance(point[0], point[1], a[0], a[1], b[0], b[1]));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Scene view
// ---------------------------------------------------------------------------

export class SceneRenderer {
  constructor(
    readonly widthPx: number,
    readonly heightPx: number,
    readonly marginPx: number = 28,
  ) {}

  /** Pixels per meter for a room fitted inside the margins. */
  scale(room: RoomSpec): number {
    return Math.min(
      (this.widthPx - 2 * this.marginPx) / room.widthM,
      (this.heightPx - 2 * this.marginPx) / room.depthM,
    );
  }

  /** Room coordinates (y up) to canvas pixels (y down), room centered. */
  worldToScreen(room: RoomSpec, xM: number, yM: number): [number, number] {
    const s = this.scale(room);
    const originX = (this.widthPx - room.widthM * s) / 2;
    const originY = (this.heightPx - room.depthM * s) / 2;
    return [originX + xM * s, this.heightPx - originY - yM * s];
  }

  render(ctx: DrawSurface, state: ViewState): void {
    ctx.save();
    ctx.clearRect(0, 0, this.widthPx, this.heightPx);
    ctx.fillStyle = COLOR_BACKGROUND;
    ctx.fillRect(0, 0, this.widthPx, this.heightPx);

    this.drawRoom(ctx, state);
    if (state.waypoints.length > 0) {
      this.drawToleranceBand(ctx, state);
      this.drawPath(ctx, state);
    }
    this.drawObstacles(ctx, state);
    this.drawTrail(ctx, state);
    this.drawWaypoints(ctx, state);
    this.drawAgent(ctx, state);
    if (state.hazard) {
      this.drawHazardBorder(ctx);
    }
    if (!state.connected) {
      this.drawDisconnectedOverlay(ctx);
    }
    ctx.restore();
  }

  private drawRoom(ctx: DrawSurface, state: ViewState): void {
    const [left, bottom] = this.worldToScreen(state.room, 0, 0);
    const [right, top] = this.worldToScreen(state.room, state.room.widthM, state.room.depthM);
    ctx.fillStyle = COLOR_FLOOR;
    ctx.fillRect(left, top, right - left, bottom - top);
    ctx.strokeStyle = COLOR_WALL;
    ctx.lineWidth = 2;
    ctx.setLineDash([]);
    ctx.strokeRect(left, top, right - left, bottom - top);
  }

  /** True when the agent is within the corridor around the path. */
  agentInsideBand(state: ViewState): boolean {
    if (!state.pose || state.waypoints.length === 0) {
      return true;
    }
    const d = distanceToPolyline([state.pose.xM, state.pose.yM], state.waypoints);
    return d <= PATH_TOLERANCE_M + 1e-9;
  }

  private tracePolyline(ctx: DrawSurface, state: ViewState, points: [number, number][]): void {
    ctx.beginPath();
    points.forEach(([x, y], index) => {
      const [sx, sy] = this.worldToScreen(state.room, x, y);
      if (index === 0) {
        ctx.moveTo(sx, sy);
      } else {
        ctx.lineTo(sx, sy);
      }
    });
  }

  private drawToleranceBand(ctx: DrawSurface, state: ViewState): void {
    // A stroke of width 2 * tolerance with round caps/joins covers
    // exactly the points within the tolerance of the polyline.
    ctx.strokeStyle = this.agentInsideBand(state) ? COLOR_BAND_INSIDE : COLOR_BAND_OUTSIDE;
    ctx.lineWidth = 2 * PATH_TOLERANCE_M * this.scale(state.room);
    ctx.lineCap = "round";
    ctx.lineJoin = "round";
    ctx.setLineDash([]);
    this.tracePolyline(ctx, state, state.waypoints);
    ctx.stroke();
  }

  private drawPath(ctx: DrawSurface, state: ViewState): void {
    ctx.strokeStyle = COLOR_PATH;
    ctx.lineWidth = 1.5;
    ctx.lineCap = "butt";
    ctx.lineJoin = "miter";
    ctx.setLineDash([6, 6]);
    this.tracePolyline(ctx, state, state.waypoints);
    ctx.stroke();
    ctx.setLineDash([]);
  }

  private drawObstacles(ctx: DrawSurface, state: ViewState): void {
    for (const obstacle of state.obstacles) {
      const [cx, cy] = this.worldToScreen(state.room, obstacle.xM, obstacle.yM);
      const r = obstacle.radiusM * this.scale(state.room);
      if (obstacle.moving && obstacle.routeM.length > 1) {
        ctx.strokeStyle = COLOR_OBSTACLE_MOVING;
        ctx.lineWidth = 1;
        ctx.setLineDash([3, 5]);
        this.tracePolyline(ctx, state, [...obstacle.routeM, obstacle.routeM[0]!]);
        ctx.stroke();
        ctx.setLineDash([]);
      }
      ctx.beginPath();
      ctx.arc(cx, cy, r, 0, 2 * Math.PI);
      ctx.globalAlpha = 0.45;
      ctx.fillStyle = obstacle.moving ? COLOR_OBSTACLE_MOVING : COLOR_OBSTACLE;
      ctx.fill();
      ctx.globalAlpha = 1;
      ctx.strokeStyle = obstacle.moving ? COLOR_OBSTACLE_MOVING : COLOR_OBSTACLE;
      ctx.lineWidth = 1.5;
      ctx.stroke();
      ctx.fillStyle = COLOR_TEXT;
      ctx.font = "11px system-ui, sans-serif";
      ctx.textAlign = "center";
      ctx.textBaseline = "bottom";
      ctx.fillText(obstacle.label, cx, cy - r - 3);
    }
  }

  private drawTrail(ctx: DrawSurface, state: ViewState): void {
    if (state.trail.length < 2) {
      return;
    }
    ctx.strokeStyle = COLOR_TRAIL;
    ctx.lineWidth = 1.5;
    ctx.lineCap = "round";
    ctx.lineJoin = "round";
    ctx.setLineDash([]);
    this.tracePolyline(ctx, state, state.trail);
    ctx.stroke();
  }

  private drawWaypoints(ctx: DrawSurface, state: ViewState): void {
    const nextIndex = state.waypointReached.findIndex((reached) => !reached);
    state.waypoints.forEach(([x, y], index) => {
      const [cx, cy] = this.worldToScreen(state.room, x, y);
      const reached = state.waypointReached[index] ?? false;
      ctx.beginPath();
      ctx.arc(cx, cy, 6, 0, 2 * Math.PI);
      if (reached) {
        ctx.fillStyle = COLOR_WAYPOINT_REACHED;
        ctx.fill();
      } else {
        ctx.strokeStyle = COLOR_WAYPOINT_PENDING;
        ctx.lineWidth = index === nextIndex ? 3 : 1.5;
        ctx.stroke();
      }
      ctx.fillStyle = COLOR_TEXT;
      ctx.font = "10px system-ui, sans-serif";
      ctx.textAlign = "center";
      ctx.textBaseline = "middle";
      ctx.fillText(String(index), cx, cy - 12);
    });
  }

  private drawAgent(ctx: DrawSurface, state: ViewState): void {
    const pose = state.pose;
    if (!pose) {
      return;
    }
    const heading = (pose.headingDeg * Math.PI) / 180;
    const size = 0.18; // arrow half-length, meters
    const tip: [number, number] = [
      pose.xM + size * Math.cos(heading),
      pose.yM + size * Math.sin(heading),
    ];
    const wing = (offset: number): [number, number] => [
      pose.xM + size * 0.9 * Math.cos(heading + offset),
      pose.yM + size * 0.9 * Math.sin(heading + offset),
    ];
    const points = [tip, wing((140 * Math.PI) / 180), wing((-140 * Math.PI) / 180)];
    ctx.beginPath();
    points.forEach(([x, y], index) => {
      const [sx, sy] = this.worldToScreen(state.room, x, y);
      if (index === 0) {
        ctx.moveTo(sx, sy);
      } else {
        ctx.lineTo(sx, sy);
      }
    });
    ctx.closePath();
    ctx.fillStyle = state.steer === "auto" ? COLOR_AGENT_AUTO : COLOR_AGENT_MANUAL;
    ctx.fill();
  }

  private drawHazardBorder(ctx: DrawSurface): void {
    ctx.strokeStyle = COLOR_HAZARD;
    ctx.lineWidth = 4;
    ctx.setLineDash([]);
    ctx.strokeRect(2, 2, this.widthPx - 4, this.heightPx - 4);
  }

  private drawDisconnectedOverlay(ctx: DrawSurface): void {
    ctx.fillStyle = COLOR_OVERLAY;
    ctx.fillRect(0, 0, this.widthPx, this.heightPx);
    ctx.fillStyle = COLOR_TEXT;
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.font = "16px system-ui, sans-serif";
    ctx.fillText("connection lost", this.widthPx / 2, this.heightPx / 2 - 10);
    ctx.font = "12px system-ui, sans-serif";
    ctx.fillText("use Reconnect to resume", this.widthPx / 2, this.heightPx / 2 + 12);
  }
}

// ---------------------------------------------------------------------------
// Cue view
// ---------------------------------------------------------------------------

export interface BarRect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export class CueRenderer {
  constructor(
    readonly widthPx: number,
    readonly heightPx: number,
    readonly marginPx: number = 36,
  ) {}

  /** Pixel rectangle of one temple bar (left bar above right bar). */
  barRect(temple: "left" | "right"): BarRect {
    const barHeight = 22;
    const gap = (this.heightPx - 2 * barHeight) / 3;
    const y = temple === "left" ? gap : 2 * gap + barHeight;
    return { x: this.marginPx, y, w: this.widthPx - 2 * this.marginPx, h: barHeight };
  }

  /** Horizontal dot position for a strip fraction (0 back .. 1 front). */
  dotX(bar: BarRect, positionFrac: number): number {
    return bar.x + positionFrac * bar.w;
  }

  render(ctx: DrawSurface, view: ActiveCueView | null): void {
    ctx.save();
    ctx.clearRect(0, 0, this.widthPx, this.heightPx);
    ctx.fillStyle = COLOR_BACKGROUND;
    ctx.fillRect(0, 0, this.widthPx, this.heightPx);

    for (const temple of ["left", "right"] as const) {
      const bar = this.barRect(temple);
      ctx.fillStyle = COLOR_FLOOR;
      ctx.fillRect(bar.x, bar.y, bar.w, bar.h);
      ctx.strokeStyle = COLOR_WALL;
      ctx.lineWidth = 1;
      ctx.setLineDash([]);
      ctx.strokeRect(bar.x, bar.y, bar.w, bar.h);
      ctx.fillStyle = COLOR_TEXT;
      ctx.font = "12px system-ui, sans-serif";
      ctx.textAlign = "right";
      ctx.textBaseline = "middle";
      ctx.fillText(temple === "left" ? "L" : "R", bar.x - 8, bar.y + bar.h / 2);
    }
    const lower = this.barRect("right");
    ctx.fillStyle = COLOR_PATH;
    ctx.font = "10px system-ui, sans-serif";
    ctx.textBaseline = "top";
    ctx.textAlign = "left";
    ctx.fillText("back", lower.x, lower.y + lower.h + 4);
    ctx.textAlign = "right";
    ctx.fillText("front", lower.x + lower.w, lower.y + lower.h + 4);

    if (!view) {
      ctx.restore();
      return;
    }
    if (!view.frame.known) {
      this.drawFallbackBadge(ctx, view.frame.label);
      ctx.restore();
      return;
    }
    for (const temple of ["left", "right"] as const) {
      const contact = temple === "left" ? view.frame.left : view.frame.right;
      if (!contact || contact.pressure <= 0) {
        continue;
      }
      const bar = this.barRect(temple);
      ctx.beginPath();
      ctx.arc(
        this.dotX(bar, contact.positionFrac),
        bar.y + bar.h / 2,
        4 + 7 * contact.pressure,
        0,
        2 * Math.PI,
      );
      ctx.globalAlpha = 0.25 + 0.75 * contact.pressure;
      ctx.fillStyle = COLOR_TRAIL;
      ctx.fill();
      ctx.globalAlpha = 1;
    }
    ctx.fillStyle = COLOR_TEXT;
    ctx.font = "12px system-ui, sans-serif";
    ctx.textAlign = "left";
    ctx.textBaseline = "bottom";
    const caption = view.perceived
      ? `${view.pattern} (felt as ${view.perceived})`
      : view.pattern;
    ctx.fillText(caption, 8, this.heightPx - 6);
    ctx.restore();
  }

  private drawFallbackBadge(ctx: DrawSurface, label: string): void {
    ctx.fillStyle = COLOR_BAND_OUTSIDE;
    ctx.fillRect(this.marginPx, this.heightPx / 2 - 14, this.widthPx - 2 * this.marginPx, 28);
    ctx.fillStyle = COLOR_TEXT;
    ctx.font = "12px system-ui, sans-serif";
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(`unknown pattern: ${label}`, this.widthPx / 2, this.heightPx / 2);
  }
}
