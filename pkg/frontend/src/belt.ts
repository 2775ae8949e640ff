/** Belt widget state: a pure function of the latest telemetry frame. */

import type { Sector, TelemetryFrame } from "./protocol";

export interface BeltState {
  /** At most one sector is active; null means the belt is idle. */
  active: Sector | null;
  /** Brightness of the active sector, in [0, 1]; 0 iff no sector is active. */
  intensity: number;
}

export const IDLE_BELT: BeltState = { active: null, intensity: 0 };

export function beltState(frame: Pick<TelemetryFrame, "vibration"> | null): BeltState {
  if (!frame) return IDLE_BELT;
  const { region, intensity } = frame.vibration;
  if (region === null || intensity <= 0) return IDLE_BELT;
  return { active: region, intensity: Math.min(intensity, 1) };
}
