import init, { EpidemicDemo, PercolationSample, bounds_curve, subcritical_threshold } from "./pkg/contagion_wasm.js";

const $ = (id) => document.getElementById(id);
const OCCUPIED = 1, INFECTED = 2, CONTAMINATED = 4;

function drawCells(canvas, n, colorOf) {
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(n, n);
  for (let i = 0; i < n * n; i++) {
    const [r, g, b] = colorOf(i);
    // flip so y grows upwards
    const row = n - 1 - Math.floor(i / n);
    const j = 4 * (row * n + (i % n));
    img.data[j] = r; img.data[j + 1] = g; img.data[j + 2] = b; img.data[j + 3] = 255;
  }
  const off = new OffscreenCanvas(n, n);
  off.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
}

// epidemic

let demo = null;
let running = false;
let seed = 1n;

function gammaValue() {
  return $("ep-inf").checked ? Infinity : 10 ** Number($("ep-gamma").value);
}

function resetEpidemic() {
  const lambda = Number($("ep-lambda").value);
  $("ep-lambda-v").textContent = lambda.toFixed(2);
  $("ep-gamma-v").textContent = $("ep-inf").checked ? "inf" : gammaValue().toPrecision(3);
  if (demo) demo.free();
  try {
    demo = new EpidemicDemo(Number($("ep-side").value), 1, lambda, gammaValue(), seed++);
  } catch (e) {
    demo = null;
    $("ep-stats").textContent = String(e);
    return;
  }
  drawEpidemic();
}

function drawEpidemic() {
  const cells = demo.cells();
  drawCells($("ep-canvas"), demo.side(), (i) => {
    const c = cells[i];
    if (c & INFECTED) return [221, 51, 51];
    if (c & CONTAMINATED) return c & OCCUPIED ? [214, 140, 60] : [243, 179, 91];
    if (c & OCCUPIED) return [106, 143, 199];
    return [245, 245, 245];
  });
  $("ep-stats").textContent =
    `t = ${demo.time().toFixed(2)}  events = ${demo.events()}  infected = ${demo.infected()}  contaminated = ${demo.contaminated()}` +
    (demo.extinct() ? "  (extinct)" : "");
}

function frame() {
  if (running && demo) {
    demo.step(10 ** Number($("ep-speed").value));
    drawEpidemic();
    if (demo.extinct() && demo.contaminated() === 0) toggleRun(false);
  }
  requestAnimationFrame(frame);
}

function toggleRun(on) {
  running = on;
  $("ep-run").textContent = running ? "pause" : "run";
}

// offspring bound

function drawBounds() {
  const d = Number($("bd-d").value), k = Number($("bd-k").value), m = Number($("bd-m").value);
  const gamma = 10 ** Number($("bd-gamma").value);
  $("bd-gamma-v").textContent = gamma.toPrecision(3);
  const lo = 0.1, hi = 1e5;
  const curve = bounds_curve(d, k, m, gamma, lo, hi, 200);
  const canvas = $("bd-canvas"), ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 40;
  ctx.clearRect(0, 0, W, H);
  const yLo = -4, yHi = 8;
  const X = (l) => pad + ((Math.log10(l) - Math.log10(lo)) / (Math.log10(hi) - Math.log10(lo))) * (W - 2 * pad);
  const Y = (b) => H - pad - ((Math.min(Math.max(Math.log10(b), yLo), yHi) - yLo) / (yHi - yLo)) * (H - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.fillText("recovery rate (log scale)", W / 2 - 50, H - 10);
  ctx.fillText("bound (log)", 4, pad - 10);
  ctx.setLineDash([4, 4]);
  ctx.beginPath(); ctx.moveTo(pad, Y(1)); ctx.lineTo(W - pad, Y(1)); ctx.stroke();
  ctx.setLineDash([]);
  ctx.strokeStyle = "#c33";
  ctx.beginPath();
  for (let i = 0; i < curve.length; i += 2) {
    const x = X(curve[i]), y = Y(curve[i + 1] > 0 ? curve[i + 1] : 1e-300);
    i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
  }
  ctx.stroke();
  const star = subcritical_threshold(gamma, d, k, m);
  $("bd-stats").textContent = Number.isNaN(star)
    ? "invalid parameters"
    : `bound < 1 (certified subcritical) for lambda > ${star.toPrecision(5)}`;
}

// percolation

let pSeed = 1n;

function drawPercolation() {
  const n = Number($("pc-n").value), p = Number($("pc-p").value);
  $("pc-p-v").textContent = p.toFixed(3);
  const s = new PercolationSample(n, p, $("pc-eight").checked, pSeed);
  const cells = s.cells();
  drawCells($("pc-canvas"), n, (i) => [[40, 40, 40], [200, 200, 200], [40, 120, 220]][cells[i]]);
  $("pc-stats").textContent = s.spanning() ? "a cluster joins left and right" : "no spanning cluster";
  s.free();
}

await init();

$("ep-run").onclick = () => toggleRun(!running);
$("ep-reset").onclick = resetEpidemic;
for (const id of ["ep-side", "ep-lambda", "ep-gamma", "ep-inf"]) $(id).oninput = resetEpidemic;
for (const id of ["bd-d", "bd-k", "bd-m", "bd-gamma"]) $(id).oninput = drawBounds;
for (const id of ["pc-n", "pc-p", "pc-eight"]) $(id).oninput = drawPercolation;
$("pc-seed").onclick = () => { pSeed++; drawPercolation(); };

resetEpidemic();
drawBounds();
drawPercolation();
requestAnimationFrame(frame);
