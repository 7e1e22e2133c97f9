// Browser entry point: connects to the logic node, renders the active
// screen on a canvas, and drives it with the mouse standing in for
// gaze (magnetization + dwell), with a click-to-select toggle and a
// latency slider for demo realism.

import { LayoutTable } from "./layout.js";
import { PointerPipeline } from "./pointer.js";
import { paint, screenModel } from "./render.js";
import { ClientStore } from "./store.js";
import { Transport } from "./transport.js";

async function start(): Promise<void> {
  const canvas = document.getElementById("screen") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;
  const statusEl = document.getElementById("status")!;
  const clickToggle = document.getElementById("click-select") as HTMLInputElement;
  const latencySlider = document.getElementById("latency") as HTMLInputElement;
  const latencyLabel = document.getElementById("latency-label")!;

  const layouts: LayoutTable = await (await fetch("/layouts.json")).json();
  const idle = layouts["Idle"]!;
  canvas.width = idle.display[0];
  canvas.height = idle.display[1];

  const store = new ClientStore();
  const url = `ws://${location.host}/ws`;
  const transport = new Transport(
    { url, clientId: `browser-${Math.random().toString(36).slice(2, 8)}`, capabilities: "input" },
    store,
  );

  const pointer = new PointerPipeline(idle);

  clickToggle.onchange = () => {
    pointer.clickToSelect = clickToggle.checked;
    pointer.resetDwell();
  };
  latencySlider.oninput = () => {
    pointer.latencyMs = Number(latencySlider.value);
    latencyLabel.textContent = `${latencySlider.value} ms`;
  };

  function canvasPoint(event: MouseEvent): [number, number] {
    const rect = canvas.getBoundingClientRect();
    return [
      ((event.clientX - rect.left) / rect.width) * canvas.width,
      ((event.clientY - rect.top) / rect.height) * canvas.height,
    ];
  }

  canvas.addEventListener("mousemove", (event) => {
    const tag = store.renderedTag();
    if (tag && layouts[tag]) pointer.setLayout(layouts[tag]!);
    for (const press of pointer.move(canvasPoint(event), performance.now())) {
      transport.sendEvent({ kind: "ButtonPressed", t: Math.round(press.t), button_id: press.button_id });
    }
  });

  canvas.addEventListener("click", (event) => {
    for (const press of pointer.click(canvasPoint(event), performance.now())) {
      transport.sendEvent({ kind: "ButtonPressed", t: Math.round(press.t), button_id: press.button_id });
    }
  });

  function frame(): void {
    const state = store.state;
    statusEl.textContent =
      state.status === "connected"
        ? `connected (${state.sessionId ?? ""})`
        : state.status;
    if (state.snapshot) {
      const layout = layouts[state.snapshot.tag];
      const model = screenModel(state.snapshot, layouts, state.errorBanner);
      paint(ctx, model, layout, pointer.overlay(performance.now()));
    }
    requestAnimationFrame(frame);
  }

  transport.connect();
  requestAnimationFrame(frame);
}

start().catch((err) => {
  const statusEl = document.getElementById("status");
  if (statusEl) statusEl.textContent = `failed to start: ${err}`;
});
