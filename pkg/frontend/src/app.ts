/**
 * Practice console wiring: sliders shape a virtual right hand, the hand is
 * streamed over the session socket, and everything coming back (confidence
 * bars, recognition events, pass/fail) is rendered exactly as received.
 */

import { fetchCatalog, fetchTemplate, Template } from "./api.js";
import {
  buildHand,
  frameMessage,
  jointsFromTemplate,
  placeHand,
  validateJoints,
  Joints,
} from "./handmodel.js";
import {
  projectSkeleton,
  highlightedFingers,
  boneFinger,
  ViewSpec,
} from "./skeleton.js";
import { PracticeSession, SessionView } from "./session.js";

const FINGER_LABELS = ["Thumb", "Index", "Middle", "Ring", "Pinky"];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function sliderBlock(container: HTMLElement, prefix: string, min: number,
                     max: number, initial: number): HTMLInputElement[] {
  const inputs: HTMLInputElement[] = [];
  FINGER_LABELS.forEach((label, i) => {
    const row = document.createElement("label");
    row.className = "slider-row";
    row.textContent = label;
    const input = document.createElement("input");
    input.type = "range";
    input.min = String(min);
    input.max = String(max);
    input.step = "0.01";
    input.value = String(initial);
    input.id = `${prefix}-${i}`;
    row.appendChild(input);
    container.appendChild(row);
    inputs.push(input);
  });
  return inputs;
}

function values(inputs: HTMLInputElement[]): number[] {
  return inputs.map((i) => Number(i.value));
}

async function start() {
  const httpBase = el<HTMLInputElement>("server").value.replace(/\/$/, "");
  const wsBase = httpBase.replace(/^http/, "ws");

  const catalog = await fetchCatalog(httpBase);
  const picker = el<HTMLSelectElement>("target");
  picker.innerHTML = "";
  for (const entry of catalog) {
    const option = document.createElement("option");
    option.value = entry.id;
    option.textContent = `${entry.label} (${entry.category}, ${entry.arity} pose${entry.arity > 1 ? "s" : ""})`;
    picker.appendChild(option);
  }

  const curls = sliderBlock(el("curl-sliders"), "curl", 0, 1, 0.1);
  const spreads = sliderBlock(el("spread-sliders"), "spread", -0.5, 0.5, 0);
  const yaw = el<HTMLInputElement>("yaw");
  const pitch = el<HTMLInputElement>("pitch");
  const shiftX = el<HTMLInputElement>("shift-x");
  const shiftY = el<HTMLInputElement>("shift-y");

  const canvas = el<HTMLCanvasElement>("stage");
  const ctx = canvas.getContext("2d")!;
  const bars = el("bars");
  const banner = el("banner");
  const status = el("status");

  let template: Template | null = null;
  let templatePose = 0;
  let session: PracticeSession | null = null;
  let latest: SessionView | null = null;

  function currentJoints(): Joints {
    const joints = buildHand({ curl: values(curls), spread: values(spreads) });
    const placed = placeHand(joints, Number(yaw.value), Number(pitch.value), [
      Number(shiftX.value),
      Number(shiftY.value),
      0,
    ]);
    validateJoints(placed);
    return placed;
  }

  function drawSkeleton(joints: Joints, view: ViewSpec, stroke: string,
                        highlight: number[] = []) {
    const projected = projectSkeleton(joints, view);
    projected.bones.forEach(([a, b], index) => {
      ctx.beginPath();
      ctx.strokeStyle = highlight.includes(boneFinger(index)) ? "#e5484d" : stroke;
      ctx.lineWidth = 3;
      ctx.moveTo(...projected.points[a]);
      ctx.lineTo(...projected.points[b]);
      ctx.stroke();
    });
    for (const [x, y] of projected.points) {
      ctx.beginPath();
      ctx.fillStyle = stroke;
      ctx.arc(x, y, 3.5, 0, 2 * Math.PI);
      ctx.fill();
    }
  }

  function redraw() {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const view: ViewSpec = {
      yaw: 0,
      pitch: 0,
      scale: 1400,
      cx: canvas.width / 2,
      cy: canvas.height / 2 + 80,
    };
    const mode = el<HTMLSelectElement>("mode").value;
    if (template && mode === "learn") {
      // target overlay in a contrasting style; hidden in test mode
      const hand = template.poses[templatePose]?.hands[0];
      if (hand) drawSkeleton(jointsFromTemplate(hand), view, "#9ab0c4");
    }
    const deviation = latest?.lastFeedback?.deviation ?? null;
    drawSkeleton(currentJoints(), view, "#1f6feb", highlightedFingers(deviation));
  }

  function renderBars(view: SessionView) {
    const entries = Object.entries(view.bars)
      .sort((a, b) => b[1] - a[1])
      .slice(0, 10);
    bars.innerHTML = "";
    for (const [id, value] of entries) {
      const row = document.createElement("div");
      row.className = "bar-row";
      const name = document.createElement("span");
      name.textContent = id;
      const track = document.createElement("div");
      track.className = "bar-track";
      const fill = document.createElement("div");
      fill.className = "bar-fill";
      fill.style.width = `${Math.round(value * 100)}%`;
      const amount = document.createElement("span");
      amount.textContent = value.toFixed(2);
      track.appendChild(fill);
      row.append(name, track, amount);
      bars.appendChild(row);
    }
  }

  function renderView(view: SessionView) {
    latest = view;
    status.textContent = view.status;
    status.className = `status ${view.status}`;
    renderBars(view);
    if (view.banner) {
      banner.textContent = view.banner.text;
      banner.className = `banner ${view.banner.kind}`;
    }
    if (view.lastEvent) {
      el("event").textContent =
        `recognized ${view.lastEvent.signId} ` +
        `(confidence ${view.lastEvent.confidence.toFixed(2)})`;
    }
    redraw();
  }

  async function connect() {
    session?.close();
    const mode = el<HTMLSelectElement>("mode").value as "learn" | "test";
    const target = picker.value;
    template = mode === "learn" ? await fetchTemplate(httpBase, target) : null;
    templatePose = 0;
    renderPoseButtons();
    session = new PracticeSession({
      baseUrl: wsBase,
      mode,
      target,
      makeSocket: (url) => new WebSocket(url) as unknown as import("./session.js").SocketLike,
      frameRate: 30,
      onChange: renderView,
    });
    session.connect();
    session.startStreaming((t) => frameMessage(currentJoints(), t));
  }

  function renderPoseButtons() {
    const holder = el("pose-buttons");
    holder.innerHTML = "";
    if (!template) return;
    template.poses.forEach((_pose, index) => {
      const button = document.createElement("button");
      button.textContent = `pose ${index + 1}`;
      button.onclick = () => {
        templatePose = index;
        redraw();
      };
      holder.appendChild(button);
    });
  }

  el("connect").onclick = () => void connect();
  el("finish").onclick = () => session?.finish();
  [...curls, ...spreads, yaw, pitch, shiftX, shiftY].forEach((input) => {
    input.addEventListener("input", redraw);
  });
  redraw();
}

el("load").onclick = () => void start();
