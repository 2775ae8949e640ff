/** WebSocket session: connection state machine and command plumbing.
 *
 * The socket is injected as a minimal interface so tests can drive the
 * session with a scripted fake instead of a network connection.
 */

import {
  ControlAction,
  FrameMessage,
  HumanCommand,
  ProtocolError,
  decodeServerMessage,
  encodeCommand,
  encodeControl,
} from "./protocol";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onerror: ((ev: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export type ConnectionState = "connecting" | "connected" | "closed";

export interface SessionEvents {
  onFrame?: (frame: FrameMessage) => void;
  onError?: (message: string) => void;
  onAck?: (action: string) => void;
  onStateChange?: (state: ConnectionState) => void;
}

export class SessionConnection {
  state: ConnectionState = "connecting";
  scenario: string | null = null;
  framePeriod = 0.05;
  paused = false;
  latestFrame: FrameMessage | null = null;

  private socket: SocketLike;
  private events: SessionEvents;

  constructor(url: string, factory: SocketFactory, events: SessionEvents = {}) {
    this.events = events;
    this.socket = factory(url);
    this.socket.onmessage = (ev) => this.handleMessage(ev.data);
    this.socket.onclose = () => this.setState("closed");
    this.socket.onerror = () => this.setState("closed");
  }

  /** Commands are dropped unless the session is connected and unpaused. */
  sendCommand(cmd: HumanCommand): boolean {
    if (this.state !== "connected" || this.paused) return false;
    this.socket.send(encodeCommand(cmd));
    return true;
  }

  sendControl(action: ControlAction, scenario?: string): boolean {
    if (this.state !== "connected") return false;
    this.socket.send(encodeControl(action, scenario));
    return true;
  }

  close(): void {
    this.socket.close();
    this.setState("closed");
  }

  private setState(state: ConnectionState): void {
    if (this.state === state) return;
    this.state = state;
    this.events.onStateChange?.(state);
  }

  private handleMessage(raw: string): void {
    let msg;
    try {
      msg = decodeServerMessage(raw);
    } catch (err) {
      if (err instanceof ProtocolError) {
        this.events.onError?.(err.message);
        return;
      }
      throw err;
    }
    switch (msg.kind) {
      case "hello":
        this.scenario = msg.scenario;
        this.framePeriod = msg.frame_period;
        this.setState("connected");
        break;
      case "frame":
        // render latest only: stale frames are simply overwritten
        this.latestFrame = msg;
        this.paused = msg.paused;
        this.events.onFrame?.(msg);
        break;
      case "control_ack":
        // UI state follows the server: pause/resume take effect when the
        // next frame reports them, the ack only clears pending indicators
        this.events.onAck?.(msg.action);
        break;
      case "error":
        this.events.onError?.(msg.message);
        break;
    }
  }
}
