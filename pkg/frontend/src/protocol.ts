/** Wire types and codecs for the simulator's WebSocket session protocol. */

export const PROTOCOL_VERSION = 1;

export type Sector = "front" | "right" | "back" | "left";

export interface Vibration {
  region: Sector | null;
  intensity: number;
}

export interface TelemetryFrame {
  tick: number;
  t: number;
  base: [number, number, number];
  q: number[];
  ee: number[];
  hand: number[];
  alpha: number;
  force: number[];
  scan: [number, number][];
  obstacles: [number, number][][];
  footprint: [number, number][];
  vibration: Vibration;
  warned_d: number | null;
  min_d: number | null;
  collision: boolean;
  paused: boolean;
}

export interface HelloMessage {
  kind: "hello";
  version: number;
  scenario: string;
  frame_period: number;
}

export interface FrameMessage extends TelemetryFrame {
  kind: "frame";
}

export interface ControlAckMessage {
  kind: "control_ack";
  action: string;
}

export interface ErrorMessage {
  kind: "error";
  message: string;
}

export type ServerMessage = HelloMessage | FrameMessage | ControlAckMessage | ErrorMessage;

export interface HumanCommand {
  vx: number;
  vy: number;
}

export type ControlAction = "pause" | "resume" | "reset" | "select";

const SECTORS: ReadonlySet<string> = new Set(["front", "right", "back", "left"]);

export class ProtocolError extends Error {}

function expectNumber(value: unknown, where: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new ProtocolError(`${where}: expected a finite number, got ${String(value)}`);
  }
  return value;
}

export function decodeServerMessage(raw: string): ServerMessage {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    throw new ProtocolError("message is not valid JSON");
  }
  if (typeof data !== "object" || data === null) {
    throw new ProtocolError("message is not an object");
  }
  const msg = data as Record<string, unknown>;
  switch (msg.kind) {
    case "hello": {
      const version = expectNumber(msg.version, "hello.version");
      if (version !== PROTOCOL_VERSION) {
        throw new ProtocolError(`unsupported protocol version ${version}`);
      }
      return {
        kind: "hello",
        version,
        scenario: String(msg.scenario),
        frame_period: expectNumber(msg.frame_period, "hello.frame_period"),
      };
    }
    case "frame": {
      const vib = msg.vibration as Record<string, unknown> | undefined;
      if (!vib || (vib.region !== null && !SECTORS.has(String(vib.region)))) {
        throw new ProtocolError("frame.vibration.region is invalid");
      }
      const intensity = expectNumber(vib.intensity, "frame.vibration.intensity");
      if (intensity < 0 || intensity > 1) {
        throw new ProtocolError("frame.vibration.intensity outside [0, 1]");
      }
      if ((vib.region === null) !== (intensity === 0)) {
        throw new ProtocolError("vibration region/intensity mismatch");
      }
      expectNumber(msg.tick, "frame.tick");
      expectNumber(msg.t, "frame.t");
      if (!Array.isArray(msg.base) || msg.base.length !== 3) {
        throw new ProtocolError("frame.base must be [x, y, heading]");
      }
      return msg as unknown as FrameMessage;
    }
    case "control_ack":
      return { kind: "control_ack", action: String(msg.action) };
    case "error":
      return { kind: "error", message: String(msg.message) };
    default:
      throw new ProtocolError(`unknown message kind ${String(msg.kind)}`);
  }
}

export function encodeCommand(cmd: HumanCommand): string {
  return JSON.stringify({ kind: "command", vx: cmd.vx, vy: cmd.vy });
}

export function encodeControl(action: ControlAction, scenario?: string): string {
  const msg: Record<string, unknown> = { kind: "control", action };
  if (action === "select") {
    if (!scenario) throw new ProtocolError("select requires a scenario name");
    msg.scenario = scenario;
  }
  return JSON.stringify(msg);
}

export function encodeHello(): string {
  return JSON.stringify({ kind: "hello", version: PROTOCOL_VERSION });
}
