/** World-to-screen mapping and drawable geometry, kept free of canvas calls
 * so the projection logic is testable without a DOM. */

import type { Sector, TelemetryFrame } from "./protocol";

export interface RoomBounds {
  x_min: number;
  x_max: number;
  y_min: number;
  y_max: number;
}

export interface Viewport {
  width: number;
  height: number;
  /** pixels per meter */
  scale: number;
  /** world point mapped to the canvas center */
  cx: number;
  cy: number;
}

/** Fit the room into the canvas with a margin; +x right, +y up on screen. */
export function fitViewport(room: RoomBounds, width: number, height: number): Viewport {
  const margin = 20;
  const sx = (width - 2 * margin) / (room.x_max - room.x_min);
  const sy = (height - 2 * margin) / (room.y_max - room.y_min);
  return {
    width,
    height,
    scale: Math.min(sx, sy),
    cx: (room.x_min + room.x_max) / 2,
    cy: (room.y_min + room.y_max) / 2,
  };
}

/** World +y (the operator's left) points up on screen. */
export function worldToScreen(v: Viewport, x: number, y: number): [number, number] {
  return [v.width / 2 + (x - v.cx) * v.scale, v.height / 2 - (y - v.cy) * v.scale];
}

export const REGION_COLORS: Record<Sector | "none", string> = {
  front: "#d62728",
  right: "#ff7f0e",
  back: "#9467bd",
  left: "#1f77b4",
  none: "#999999",
};

export interface TrailSegment {
  from: [number, number];
  to: [number, number];
  color: string;
  width: number;
}

/** Path trail colored by warned region, thickness scaled by intensity. */
export function trailSegments(
  frames: Pick<TelemetryFrame, "base" | "vibration">[],
  v: Viewport,
): TrailSegment[] {
  const segments: TrailSegment[] = [];
  for (let i = 0; i + 1 < frames.length; i++) {
    const { region, intensity } = frames[i].vibration;
    segments.push({
      from: worldToScreen(v, frames[i].base[0], frames[i].base[1]),
      to: worldToScreen(v, frames[i + 1].base[0], frames[i + 1].base[1]),
      color: REGION_COLORS[region ?? "none"],
      width: 1 + 4 * intensity,
    });
  }
  return segments;
}
