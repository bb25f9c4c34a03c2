/**
 * Cue animation model.
 *
 * The dashboard mirrors the device's contact choreography so what moves
 * on screen matches what the wearer feels on the temples. A pattern is
 * animated as a contact dot per temple: a position along the strip
 * (0 = back, 1 = front of the 70 mm span) and a press depth in [0, 1].
 *
 * Three families:
 *  - taps: a triangle press at a fixed spot (front / center / back on
 *    both temples, or the center of one temple);
 *  - longitudinal slides: a constant press sweeping back-to-front or
 *    front-to-back on both temples in parallel;
 *  - lateral slides: a cross-temple handoff — a short press-release on
 *    the far temple overlapping a longer press on the near one, which
 *    reads as motion across the head. slide_left leads with the RIGHT
 *    temple and hands off to the left; slide_right is the mirror.
 *
 * Every animation runs for exactly the duration_ms the server reported
 * in the cue event — never a client-side guess.
 */

import { isKnownPattern } from "./protocol.js";

// ---------------------------------------------------------------------------
// Geometry of the temple strip
// ---------------------------------------------------------------------------

export const POSITION_FRONT = 1.0;
export const POSITION_CENTER = 0.5;
export const POSITION_BACK = 0.0;

/** Lateral handoff: the leading temple presses and releases this fast. */
const HANDOFF_LEAD_MS = 300;
/** ... and the trailing temple starts this far before the lead ends. */
const HANDOFF_OVERLAP_MS = 100;

/** Contact state of one temple at one instant of the animation. */
export interface TempleContact {
  /** 0 = back of the strip, 1 = front (toward the eyes). */
  positionFrac: number;
  /** Press depth, 0 (released) to 1 (full press). */
  pressure: number;
}

/** One animation frame across both temples. */
export interface CueFrame {
  /** False for pattern ids this dashboard has no choreography for. */
  known: boolean;
  /** The pattern id being played, for the caption / fallback badge. */
  label: string;
  left: TempleContact | null;
  right: TempleContact | null;
}

/** Linear 0->1->0 ramp peaking halfway between start and end. */
function trianglePress(t: number, start: number, end: number): number {
  if (t <= start || t >= end || end <= start) {
    return 0;
  }
  const mid = (start + end) / 2;
  return t <= mid ? (t - start) / (mid - start) : (end - t) / (end - mid);
}

function lerp(a: number, b: number, frac: number): number {
  return a + (b - a) * frac;
}

function tapFrame(position: number, temples: "both" | "left" | "right", t: number, d: number): CueFrame {
  const contact: TempleContact = { positionFrac: position, pressure: trianglePress(t, 0, d) };
  return {
    known: true,
    label: "",
    left: temples === "right" ? null : { ...contact },
    right: temples === "left" ? null : { ...contact },
  };
}

function slideFrame(fromPos: number, toPos: number, t: number, d: number): CueFrame {
  const contact: TempleContact = {
    positionFrac: lerp(fromPos, toPos, d > 0 ? t / d : 0),
    pressure: 1,
  };
  return { known: true, label: "", left: { ...contact }, right: { ...contact } };
}

function handoffFrame(lead: "left" | "right", t: number, d: number): CueFrame {
  const leadEnd = Math.min(HANDOFF_LEAD_MS, d);
  const trailStart = Math.max(leadEnd - HANDOFF_OVERLAP_MS, 0);
  const leadContact: TempleContact = {
    positionFrac: POSITION_CENTER,
    pressure: trianglePress(t, 0, leadEnd),
  };
  const trailContact: TempleContact = {
    positionFrac: POSITION_CENTER,
    pressure: trianglePress(t, trailStart, d),
  };
  return {
    known: true,
    label: "",
    left: lead === "left" ? leadContact : trailContact,
    right: lead === "right" ? leadContact : trailContact,
  };
}

/**
 * The contact frame of `pattern` at `elapsedMs` into a playback of
 * `durationMs`. Returns null once the elapsed time passes the duration:
 * the animation lives exactly as long as the reported playback.
 * Unknown pattern ids stay "active" for the duration but carry
 * known=false so the renderer can fall back to a text badge.
 */
export function cueFrame(pattern: string, elapsedMs: number, durationMs: number): CueFrame | null {
  if (elapsedMs < 0 || elapsedMs >= durationMs) {
    return null;
  }
  let frame: CueFrame;
  if (!isKnownPattern(pattern)) {
    frame = { known: false, label: pattern, left: null, right: null };
    return frame;
  }
  const t = elapsedMs;
  const d = durationMs;
  switch (pattern) {
    case "tap_front":
      frame = tapFrame(POSITION_FRONT, "both", t, d);
      break;
    case "tap_center":
      frame = tapFrame(POSITION_CENTER, "both", t, d);
      break;
    case "tap_back":
      frame = tapFrame(POSITION_BACK, "both", t, d);
      break;
    case "tap_left":
      frame = tapFrame(POSITION_CENTER, "left", t, d);
      break;
    case "tap_right":
      frame = tapFrame(POSITION_CENTER, "right", t, d);
      break;
    case "slide_front_fast":
    case "slide_front_slow":
      frame = slideFrame(POSITION_BACK, POSITION_FRONT, t, d);
      break;
    case "slide_back_fast":
    case "slide_back_slow":
      frame = slideFrame(POSITION_FRONT, POSITION_BACK, t, d);
      break;
    case "slide_left_fast":
    case "slide_left_slow":
      frame = handoffFrame("right", t, d);
      break;
    case "slide_right_fast":
    case "slide_right_slow":
      frame = handoffFrame("left", t, d);
      break;
  }
  frame.label = pattern;
  return frame;
}

// ---------------------------------------------------------------------------
// Live animation bookkeeping
// ---------------------------------------------------------------------------

/** What the animator needs from a cue event. */
export interface CueStart {
  pattern: string;
  perceived: string;
  durationMs: number;
}

/** The frame of the currently playing cue plus its captions. */
export interface ActiveCueView {
  frame: CueFrame;
  pattern: string;
  /** Set when the wearer is modeled to feel a different pattern. */
  perceived: string | null;
}

/**
 * Tracks the cue currently playing. Playback on the device is
 * non-preemptive and the server reports each cue when it starts, so a
 * new event simply replaces the previous animation.
 */
export class CueAnimator {
  private cue: CueStart | null = null;
  private startedAtMs = 0;

  begin(cue: CueStart, nowMs: number): void {
    this.cue = cue;
    this.startedAtMs = nowMs;
  }

  clear(): void {
    this.cue = null;
  }

  /** The animation frame at wall-clock `nowMs`, or null when idle. */
  view(nowMs: number): ActiveCueView | null {
    if (!this.cue) {
      return null;
    }
    const frame = cueFrame(this.cue.pattern, nowMs - this.startedAtMs, this.cue.durationMs);
    if (!frame) {
      return null;
    }
    return {
      frame,
      pattern: this.cue.pattern,
      perceived: this.cue.perceived !== this.cue.pattern ? this.cue.perceived : null,
    };
  }
}
