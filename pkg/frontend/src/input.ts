/**
 * Keyboard steering with per-tick debounce.
 *
 * Arrow keys and space map to steer intents. A held key autorepeats
 * keydown events far faster than the simulation ticks, so intents are
 * coalesced: whatever was pressed most recently since the last tick is
 * the single intent forwarded, everything else is dropped. Nothing is
 * captured until a session is running.
 */

import type { SteerCommand } from "./protocol.js";

/** KeyboardEvent.key values the dashboard steers with. */
export const KEY_BINDINGS: Readonly<Record<string, SteerCommand>> = {
  ArrowUp: "forward",
  ArrowLeft: "left",
  ArrowRight: "right",
  " ": "stop",
  Spacebar: "stop",
};

export class SteerInput {
  private pending: SteerCommand | null = null;
  private active = false;

  /** Gate capture on session state; deactivating drops pending intent. */
  setActive(active: boolean): void {
    this.active = active;
    if (!active) {
      this.pending = null;
    }
  }

  isActive(): boolean {
    return this.active;
  }

  /**
   * Feed one keydown. Returns true when the key maps to a steer intent
   * and was captured (callers should preventDefault then).
   */
  press(key: string): boolean {
    const command = KEY_BINDINGS[key];
    if (!command || !this.active) {
      return false;
    }
    this.pending = command;
    return true;
  }

  /** Queue a steer intent from a UI control (same per-tick coalescing). */
  request(command: SteerCommand): void {
    if (this.active) {
      this.pending = command;
    }
  }

  /**
   * Drain the queued intent. Called once per simulation tick, so at
   * most one steer message leaves per tick no matter how fast the
   * keyboard repeated.
   */
  take(): SteerCommand | null {
    const command = this.pending;
    this.pending = null;
    return command;
  }
}
