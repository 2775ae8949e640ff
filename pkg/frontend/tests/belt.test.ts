import { describe, expect, it } from "vitest";

import { beltState, IDLE_BELT } from "../src/belt";
import type { TelemetryFrame } from "../src/protocol";
import recorded from "./fixtures/frames_scenario1_avoid.json";

const frames = recorded as unknown as TelemetryFrame[];

describe("belt widget state", () => {
  it("is idle with no frame or no warning", () => {
    expect(beltState(null)).toEqual(IDLE_BELT);
    expect(beltState({ vibration: { region: null, intensity: 0 } })).toEqual(IDLE_BELT);
  });

  it("activates exactly the warned sector at the frame's intensity", () => {
    const state = beltState({ vibration: { region: "front", intensity: 1.0 } });
    expect(state).toEqual({ active: "front", intensity: 1.0 });
  });

  it("equals the latest frame's vibration command over a recorded stream", () => {
    expect(frames.length).toBeGreaterThan(50);
    let sawActive = 0;
    for (const frame of frames) {
      const state = beltState(frame);
      // at most one active sector, and it mirrors the frame exactly
      expect(state.active).toBe(frame.vibration.region);
      if (frame.vibration.region === null) {
        expect(state).toEqual(IDLE_BELT);
      } else {
        expect(state.intensity).toBeCloseTo(frame.vibration.intensity, 9);
        expect(state.intensity).toBeGreaterThan(0);
        expect(state.intensity).toBeLessThanOrEqual(1);
        sawActive++;
      }
    }
    expect(sawActive).toBeGreaterThan(10); // the recorded run does warn
  });

  it("depends only on the latest frame (stateless across any order)", () => {
    const shuffled = [...frames].reverse();
    for (let i = 0; i < shuffled.length; i++) {
      expect(beltState(shuffled[i])).toEqual(beltState(shuffled[i]));
    }
  });
});
