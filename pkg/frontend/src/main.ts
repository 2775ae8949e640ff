/** Entry point: wires the session, input, and rendering together.
 *
 * URL query parameters: `endpoint` (WebSocket base, default the page host)
 * and `scenario` (default scenario1).
 */

import { beltState } from "./belt";
import { KeyboardInput } from "./input";
import { renderBelt, renderScene, Scene } from "./render";
import { SessionConnection } from "./session";
import { fitViewport } from "./view";

const params = new URLSearchParams(window.location.search);
const scenario = params.get("scenario") ?? "scenario1";
const endpoint =
  params.get("endpoint") ?? `ws://${window.location.hostname}:8000`;
const httpBase = endpoint.replace(/^ws/, "http");

const canvas = document.getElementById("world") as HTMLCanvasElement;
const beltCanvas = document.getElementById("belt") as HTMLCanvasElement;
const status = document.getElementById("status") as HTMLElement;
const banner = document.getElementById("banner") as HTMLElement;
const revealToggle = document.getElementById("reveal") as HTMLInputElement;

const scene: Scene = {
  room: { x_min: -2, x_max: 8, y_min: -2.5, y_max: 2.5 },
  trueObstacles: [],
  revealTruth: false,
  trail: [],
};

async function loadScenarioSummary(name: string): Promise<void> {
  const res = await fetch(`${httpBase}/scenarios/${name}`);
  if (!res.ok) return;
  const detail = await res.json();
  scene.room = detail.room;
  scene.trueObstacles = detail.obstacles;
  scene.trail = [];
}

const session = new SessionConnection(
  `${endpoint}/session?scenario=${scenario}`,
  (url) => new WebSocket(url) as unknown as import("./session").SocketLike,
  {
    onFrame: (frame) => {
      scene.trail.push({ base: frame.base, vibration: frame.vibration });
      const state = session.paused ? "paused" : "running";
      status.textContent =
        `${session.scenario} · ${state} · t=${frame.t.toFixed(1)} s` +
        ` · alpha=${frame.alpha.toFixed(2)}` +
        (frame.collision ? " · COLLISION" : "");
    },
    onError: (message) => {
      banner.textContent = message;
      banner.hidden = false;
      window.setTimeout(() => (banner.hidden = true), 4000);
    },
    onStateChange: (state) => {
      if (state !== "connected") status.textContent = state;
    },
  },
);

const input = new KeyboardInput();
window.addEventListener("keydown", (ev) => input.keyDown(ev.code));
window.addEventListener("keyup", (ev) => input.keyUp(ev.code));
window.addEventListener("blur", () => input.clear());

revealToggle.addEventListener("change", () => {
  scene.revealTruth = revealToggle.checked;
});
for (const action of ["pause", "resume", "reset"] as const) {
  document.getElementById(action)?.addEventListener("click", () => {
    session.sendControl(action);
    if (action === "reset") scene.trail = [];
  });
}
const picker = document.getElementById("scenario") as HTMLSelectElement | null;
picker?.addEventListener("change", () => {
  session.sendControl("select", picker.value);
  void loadScenarioSummary(picker.value);
});

// commands go out at the telemetry rate (20 Hz)
window.setInterval(() => {
  session.sendCommand(input.command());
}, 50);

function draw(): void {
  const v = fitViewport(scene.room, canvas.width, canvas.height);
  const ctx = canvas.getContext("2d");
  const beltCtx = beltCanvas.getContext("2d");
  if (ctx) renderScene(ctx, v, scene, session.latestFrame);
  if (beltCtx) renderBelt(beltCtx, beltCanvas.width, beltState(session.latestFrame));
  window.requestAnimationFrame(draw);
}

void loadScenarioSummary(scenario);
window.requestAnimationFrame(draw);
