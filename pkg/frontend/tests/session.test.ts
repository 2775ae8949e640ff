import { describe, expect, it } from "vitest";

import type { FrameMessage, TelemetryFrame } from "../src/protocol";
import { SessionConnection, SocketLike } from "../src/session";
import recorded from "./fixtures/frames_scenario1_avoid.json";

const baseFrame = (recorded as unknown as TelemetryFrame[])[0];

/** Scripted stand-in for the simulator's session endpoint: zero-order holds
 * the last command and reflects it in the base position of later frames. */
class FakeServer implements SocketLike {
  onmessage: ((ev: { data: string }) => void) | null = null;
  onclose: (() => void) | null = null;
  onerror: ((ev: unknown) => void) | null = null;
  sent: string[] = [];
  paused = false;
  private command = { vx: 0, vy: 0 };
  private tick = 0;
  private x = 0;

  send(data: string): void {
    this.sent.push(data);
    const msg = JSON.parse(data);
    if (msg.kind === "command") {
      this.command = { vx: msg.vx, vy: msg.vy };
    } else if (msg.kind === "control") {
      if (msg.action === "pause") this.paused = true;
      if (msg.action === "resume") this.paused = false;
      this.emit({ kind: "control_ack", action: msg.action });
    }
  }

  close(): void {
    this.onclose?.();
  }

  hello(): void {
    this.emit({ kind: "hello", version: 1, scenario: "scenario1", frame_period: 0.05 });
  }

  /** One telemetry period: advance by the held command, then emit a frame. */
  stepFrame(): void {
    if (!this.paused) {
      this.tick += 5;
      this.x += this.command.vx * 0.05;
    }
    this.emit({
      ...baseFrame,
      kind: "frame",
      tick: this.tick,
      t: this.tick * 0.01,
      base: [this.x, 0, 0],
      paused: this.paused,
    });
  }

  private emit(msg: unknown): void {
    this.onmessage?.({ data: JSON.stringify(msg) });
  }
}

function connect() {
  const server = new FakeServer();
  const frames: FrameMessage[] = [];
  const errors: string[] = [];
  const acks: string[] = [];
  const session = new SessionConnection("ws://test/session", () => server, {
    onFrame: (f) => frames.push(f),
    onError: (m) => errors.push(m),
    onAck: (a) => acks.push(a),
  });
  return { server, session, frames, errors, acks };
}

describe("session connection", () => {
  it("refuses to send commands before the hello", () => {
    const { server, session } = connect();
    expect(session.state).toBe("connecting");
    expect(session.sendCommand({ vx: 0.1, vy: 0 })).toBe(false);
    expect(server.sent).toHaveLength(0);
    server.hello();
    expect(session.state).toBe("connected");
    expect(session.scenario).toBe("scenario1");
    expect(session.sendCommand({ vx: 0.1, vy: 0 })).toBe(true);
  });

  it("reflects a command in telemetry within 2 telemetry periods", () => {
    const { server, session, frames } = connect();
    server.hello();
    server.stepFrame();
    const before = frames[frames.length - 1].base[0];
    session.sendCommand({ vx: 0.4, vy: 0 });
    server.stepFrame();
    server.stepFrame(); // loopback bound: at most 2 periods
    const after = frames[frames.length - 1].base[0];
    expect(after).toBeGreaterThan(before);
    expect(session.latestFrame?.base[0]).toBe(after);
  });

  it("stops commanding while paused; UI state follows the server", () => {
    const { server, session, acks } = connect();
    server.hello();
    server.stepFrame();
    expect(session.paused).toBe(false);
    session.sendControl("pause");
    expect(acks).toEqual(["pause"]);
    // the ack alone does not flip the state; the next frame does
    expect(session.paused).toBe(false);
    server.stepFrame();
    expect(session.paused).toBe(true);
    expect(session.sendCommand({ vx: 0.5, vy: 0 })).toBe(false);
    const tickWhilePaused = session.latestFrame!.tick;
    server.stepFrame();
    expect(session.latestFrame!.tick).toBe(tickWhilePaused); // time frozen
    session.sendControl("resume");
    server.stepFrame();
    expect(session.paused).toBe(false);
    expect(session.sendCommand({ vx: 0.5, vy: 0 })).toBe(true);
  });

  it("surfaces server errors and bad payloads without dying", () => {
    const { server, session, errors, frames } = connect();
    server.hello();
    server.onmessage?.({ data: '{"kind":"error","message":"nope"}' });
    server.onmessage?.({ data: "garbage" });
    expect(errors).toEqual(["nope", "message is not valid JSON"]);
    server.stepFrame();
    expect(frames).toHaveLength(1);
    expect(session.state).toBe("connected");
  });

  it("transitions to closed when the socket drops", () => {
    const { server, session } = connect();
    server.hello();
    server.close();
    expect(session.state).toBe("closed");
    expect(session.sendCommand({ vx: 0.1, vy: 0 })).toBe(false);
  });
});
