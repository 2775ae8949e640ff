/** Canvas drawing for the top-down view and the belt widget. */

import { BeltState } from "./belt";
import type { Sector, TelemetryFrame } from "./protocol";
import {
  REGION_COLORS,
  RoomBounds,
  Viewport,
  trailSegments,
  worldToScreen,
} from "./view";

export interface Scene {
  room: RoomBounds;
  /** Ground-truth obstacle polygons; only drawn when revealed. */
  trueObstacles: [number, number][][];
  revealTruth: boolean;
  trail: Pick<TelemetryFrame, "base" | "vibration">[];
}

function drawPolygon(
  ctx: CanvasRenderingContext2D,
  v: Viewport,
  vertices: [number, number][],
  stroke: string,
  fill?: string,
): void {
  if (vertices.length < 2) return;
  ctx.beginPath();
  const [x0, y0] = worldToScreen(v, vertices[0][0], vertices[0][1]);
  ctx.moveTo(x0, y0);
  for (const [wx, wy] of vertices.slice(1)) {
    const [sx, sy] = worldToScreen(v, wx, wy);
    ctx.lineTo(sx, sy);
  }
  ctx.closePath();
  if (fill) {
    ctx.fillStyle = fill;
    ctx.fill();
  }
  ctx.strokeStyle = stroke;
  ctx.stroke();
}

export function renderScene(
  ctx: CanvasRenderingContext2D,
  v: Viewport,
  scene: Scene,
  frame: TelemetryFrame | null,
): void {
  ctx.clearRect(0, 0, v.width, v.height);

  // room outline
  const { x_min, x_max, y_min, y_max } = scene.room;
  drawPolygon(ctx, v, [[x_min, y_min], [x_max, y_min], [x_max, y_max], [x_min, y_max]], "#444");

  if (scene.revealTruth) {
    for (const poly of scene.trueObstacles) {
      drawPolygon(ctx, v, poly, "#bbb", "rgba(160,160,160,0.25)");
    }
  }

  for (const seg of trailSegments(scene.trail, v)) {
    ctx.beginPath();
    ctx.moveTo(seg.from[0], seg.from[1]);
    ctx.lineTo(seg.to[0], seg.to[1]);
    ctx.strokeStyle = seg.color;
    ctx.lineWidth = seg.width;
    ctx.stroke();
  }
  ctx.lineWidth = 1;

  if (!frame) return;

  // perceived obstacle polygons
  for (const poly of frame.obstacles) {
    drawPolygon(ctx, v, poly, "#d62728");
  }

  // scan cloud
  ctx.fillStyle = "rgba(31,119,180,0.5)";
  for (const [wx, wy] of frame.scan) {
    const [sx, sy] = worldToScreen(v, wx, wy);
    ctx.fillRect(sx - 1, sy - 1, 2, 2);
  }

  // footprint samples
  ctx.fillStyle = "#2ca02c";
  for (const [wx, wy] of frame.footprint) {
    const [sx, sy] = worldToScreen(v, wx, wy);
    ctx.beginPath();
    ctx.arc(sx, sy, 2.5, 0, 2 * Math.PI);
    ctx.fill();
  }

  // robot base and operator hand
  const [bx, by] = worldToScreen(v, frame.base[0], frame.base[1]);
  ctx.fillStyle = frame.collision ? "#d62728" : "#333";
  ctx.beginPath();
  ctx.arc(bx, by, 6, 0, 2 * Math.PI);
  ctx.fill();
  ctx.strokeStyle = "#333";
  ctx.beginPath();
  ctx.moveTo(bx, by);
  ctx.lineTo(
    bx + 14 * Math.cos(-frame.base[2]),
    by + 14 * Math.sin(-frame.base[2]),
  );
  ctx.stroke();

  const [hx, hy] = worldToScreen(v, frame.hand[0], frame.hand[1]);
  ctx.fillStyle = "#1f77b4";
  ctx.beginPath();
  ctx.arc(hx, hy, 5, 0, 2 * Math.PI);
  ctx.fill();
}

const SECTOR_ANGLES: Record<Sector, number> = {
  front: -Math.PI / 2,
  right: 0,
  back: Math.PI / 2,
  left: Math.PI,
};

/** Four-sector belt widget; the active sector glows with the intensity. */
export function renderBelt(
  ctx: CanvasRenderingContext2D,
  size: number,
  belt: BeltState,
): void {
  ctx.clearRect(0, 0, size, size);
  const cx = size / 2;
  const r = size * 0.38;
  for (const sector of Object.keys(SECTOR_ANGLES) as Sector[]) {
    const mid = SECTOR_ANGLES[sector];
    const active = belt.active === sector;
    ctx.beginPath();
    ctx.arc(cx, cx, r, mid - Math.PI / 4 + 0.06, mid + Math.PI / 4 - 0.06);
    ctx.lineWidth = size * 0.12;
    ctx.strokeStyle = active
      ? REGION_COLORS[sector]
      : "rgba(120,120,120,0.25)";
    ctx.globalAlpha = active ? 0.25 + 0.75 * belt.intensity : 1;
    ctx.stroke();
    ctx.globalAlpha = 1;
  }
  ctx.lineWidth = 1;
  ctx.fillStyle = "#666";
  ctx.textAlign = "center";
  ctx.font = `${Math.round(size * 0.09)}px sans-serif`;
  ctx.fillText(belt.active ? belt.active.toUpperCase() : "idle", cx, cx + 4);
}
