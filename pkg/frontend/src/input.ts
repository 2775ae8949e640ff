/** Keyboard state to planar hand-velocity commands, clamped to V_MAX. */

import type { HumanCommand } from "./protocol";

/** Matches the simulator's hand-speed clamp. */
export const V_MAX = 1.0;
/** Speed commanded by a single held key. */
export const KEY_SPEED = 0.35;

export class KeyboardInput {
  private held = new Set<string>();

  keyDown(code: string): void {
    this.held.add(code);
  }

  keyUp(code: string): void {
    this.held.delete(code);
  }

  clear(): void {
    this.held.clear();
  }

  /** +x is the travel direction, +y is the operator's left. */
  command(): HumanCommand {
    let vx = 0;
    let vy = 0;
    if (this.held.has("ArrowUp") || this.held.has("KeyW")) vx += KEY_SPEED;
    if (this.held.has("ArrowDown") || this.held.has("KeyS")) vx -= KEY_SPEED;
    if (this.held.has("ArrowLeft") || this.held.has("KeyA")) vy += KEY_SPEED;
    if (this.held.has("ArrowRight") || this.held.has("KeyD")) vy -= KEY_SPEED;
    return clampCommand({ vx, vy });
  }
}

export function clampCommand(cmd: HumanCommand): HumanCommand {
  const speed = Math.hypot(cmd.vx, cmd.vy);
  if (speed <= V_MAX || speed === 0) return cmd;
  const scale = V_MAX / speed;
  return { vx: cmd.vx * scale, vy: cmd.vy * scale };
}
