/**
 * Keyboard capture: the four bindings, per-tick coalescing (one steer
 * per tick no matter how fast keys repeat), and the running-session
 * gate.
 */

import { describe, expect, it } from "vitest";

import { SteerInput } from "../src/input.js";

function activeInput(): SteerInput {
  const input = new SteerInput();
  input.setActive(true);
  return input;
}

describe("key bindings", () => {
  it("maps arrows and space to steer intents", () => {
    const input = activeInput();
    expect(input.press("ArrowUp")).toBe(true);
    expect(input.take()).toBe("forward");
    expect(input.press("ArrowLeft")).toBe(true);
    expect(input.take()).toBe("left");
    expect(input.press("ArrowRight")).toBe(true);
    expect(input.take()).toBe("right");
    expect(input.press(" ")).toBe(true);
    expect(input.take()).toBe("stop");
  });

  it("ignores keys that are not bound", () => {
    const input = activeInput();
    expect(input.press("w")).toBe(false);
    expect(input.press("Enter")).toBe(false);
    expect(input.take()).toBeNull();
  });
});

describe("per-tick debounce", () => {
  it("forwards at most one intent per tick, the newest one", () => {
    const input = activeInput();
    // A held arrow key autorepeats many keydowns between two ticks...
    input.press("ArrowUp");
    input.press("ArrowUp");
    input.press("ArrowLeft");
    input.press("ArrowRight");
    // ...but the tick flush sees only the most recent intent.
    expect(input.take()).toBe("right");
    expect(input.take()).toBeNull();
  });

  it("an empty tick forwards nothing", () => {
    const input = activeInput();
    expect(input.take()).toBeNull();
  });

  it("UI-requested commands coalesce the same way", () => {
    const input = activeInput();
    input.press("ArrowLeft");
    input.request("auto");
    expect(input.take()).toBe("auto");
    expect(input.take()).toBeNull();
  });
});

describe("session gate", () => {
  it("captures nothing before a session is running", () => {
    const input = new SteerInput();
    expect(input.press("ArrowUp")).toBe(false);
    input.request("stop");
    expect(input.take()).toBeNull();
  });

  it("drops the pending intent when the session ends", () => {
    const input = activeInput();
    input.press("ArrowUp");
    input.setActive(false);
    expect(input.take()).toBeNull();
    expect(input.press("ArrowUp")).toBe(false);
  });
});
