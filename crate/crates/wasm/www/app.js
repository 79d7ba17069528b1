// Demo page wiring: slider state -> wasm calls -> canvas plots.
// No framework; the wasm module is the one produced by
// `wasm-pack build --target web --out-dir www/pkg`.

import init, {
  threshold_scan,
  distance_scan,
  visibility_correction,
} from "./pkg/bosonbench_wasm.js";

const $ = (id) => document.getElementById(id);

// ---------- tiny canvas plotting ----------

function plot(canvas, series, opts) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height;
  const m = { l: 46, r: 12, t: 12, b: 30 };
  ctx.clearRect(0, 0, W, H);

  const xs = series.flatMap((s) => s.points.map((p) => p[0]));
  let ys = series.flatMap((s) => s.points.map((p) => p[1])).filter(Number.isFinite);
  if (!xs.length || !ys.length) return;
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  let y0 = opts.y0 ?? Math.min(...ys), y1 = opts.y1 ?? Math.max(...ys);
  if (y1 - y0 < 1e-9) y1 = y0 + 1;
  const px = (x) => m.l + ((x - x0) / (x1 - x0)) * (W - m.l - m.r);
  const py = (y) => H - m.b - ((y - y0) / (y1 - y0)) * (H - m.t - m.b);

  ctx.strokeStyle = "#2a3342";
  ctx.fillStyle = "#9aa3ad";
  ctx.font = "11px system-ui";
  ctx.lineWidth = 1;
  const xticks = 6, yticks = 5;
  for (let i = 0; i <= yticks; i++) {
    const y = y0 + (i / yticks) * (y1 - y0);
    ctx.beginPath();
    ctx.moveTo(m.l, py(y));
    ctx.lineTo(W - m.r, py(y));
    ctx.stroke();
    ctx.fillText(y.toFixed(2), 6, py(y) + 4);
  }
  for (let i = 0; i <= xticks; i++) {
    const x = x0 + (i / xticks) * (x1 - x0);
    ctx.fillText(Math.round(x), px(x) - 6, H - 10);
  }
  ctx.fillText(opts.xlabel ?? "", W / 2 - 20, H - 2);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash ?? []);
    ctx.lineWidth = 1.8;
    ctx.beginPath();
    let pen = false;
    for (const [x, y] of s.points) {
      if (!Number.isFinite(y) || y > y1 + (y1 - y0)) { pen = false; continue; }
      if (pen) ctx.lineTo(px(x), py(y));
      else ctx.moveTo(px(x), py(y));
      pen = true;
    }
    ctx.stroke();
    ctx.setLineDash([]);
  }
  let lx = m.l + 10;
  for (const s of series) {
    ctx.fillStyle = s.color;
    ctx.fillRect(lx, m.t + 2, 14, 3);
    ctx.fillStyle = "#c7cdd4";
    ctx.fillText(s.label, lx + 18, m.t + 7);
    lx += 18 + ctx.measureText(s.label).width + 16;
  }
  for (const mk of opts.markers ?? []) {
    ctx.fillStyle = mk.color;
    ctx.beginPath();
    ctx.arc(px(mk.x), py(mk.y), 4.5, 0, Math.PI * 2);
    ctx.fill();
  }
}

// ---------- threshold panel ----------

function thresholdRequest() {
  const days = +$("th-days").value;
  const modes = $("th-modes").value;
  const mode_rule =
    modes === "quadratic" ? { kind: "quadratic" }
    : modes === "linear3" ? { kind: "linear", factor: 3.0 }
    : { kind: "fixed", modes: 400 };
  const fixed = +$("th-fixed").value;
  // Split the combined non-source efficiency evenly across the three knobs.
  const each = Math.cbrt(fixed);
  return {
    scenario: {
      error_tolerance: Math.pow(10, +$("th-e").value),
      runtime_budget_s: days * 86400,
      flops: +$("th-flops").value * 1e15,
      rep_rate_hz: 1e9,
      eta_dx: each,
      eta_net: each,
      eta_d: each,
      visibility: +$("th-v").value,
      mode_rule,
      cost_model: { c: 1.0, a: 1.0 },
      log_base: "ln",
      attempt_rate: $("th-attempt").value,
    },
    n_min: 2,
    n_max: 100,
  };
}

function renderThreshold() {
  $("th-v-val").textContent = (+$("th-v").value).toFixed(3);
  $("th-e-val").textContent = "1e" + $("th-e").value;
  $("th-days-val").textContent = $("th-days").value;
  $("th-flops-val").textContent = $("th-flops").value;
  $("th-fixed-val").textContent = (+$("th-fixed").value).toFixed(3);

  const body = JSON.parse(threshold_scan(JSON.stringify(thresholdRequest())));
  const readout = $("th-readout");
  if (!body.ok) {
    readout.innerHTML = `<span class="warn">${body.error}</span>`;
    return;
  }
  const ceiling = body.points.map((p) => [p.n, p.ceiling]);
  const experiment = body.points.map((p) => [p.n, p.experiment]);
  const markers = [];
  if (body.crossing) {
    markers.push({ x: body.crossing.n_star, y: body.crossing.eta_star, color: "#81c784" });
    readout.innerHTML =
      `advantage threshold: <b>N* = ${body.crossing.n_star}</b> at ` +
      `<b>η* = ${body.crossing.eta_star.toFixed(3)}</b> ` +
      `(classical ceiling ${body.crossing.ceiling.toFixed(3)})`;
  } else {
    readout.innerHTML = `<span class="warn">no advantage in range: every feasible source stays classically simulable</span>`;
  }
  plot($("th-plot"), [
    { label: "classical ceiling", color: "#64b5f6", points: ceiling },
    { label: "experimental floor", color: "#ffb74d", points: experiment },
  ], { xlabel: "photons N", y0: 0, y1: 1, markers });
}

// ---------- distance panel ----------

function renderDistance() {
  $("d-v0-val").textContent = (+$("d-v0").value).toFixed(3);
  $("d-rate-val").textContent = (+$("d-rate").value).toFixed(3);
  $("d-nmax-val").textContent = $("d-nmax").value;

  const req = {
    kind: $("d-kind").value,
    v0: +$("d-v0").value,
    rate: +$("d-rate").value,
    n_max: +$("d-nmax").value,
  };
  const body = JSON.parse(distance_scan(JSON.stringify(req)));
  const readout = $("d-readout");
  if (!body.ok) {
    readout.innerHTML = `<span class="warn">${body.error}</span>`;
    return;
  }
  const d = body.points.map((p) => [p.n, p.d ?? NaN]);
  const dDist = body.points.map((p) => [p.n, p.d_dist]);
  const delta = body.points.map((p) => [p.n, p.delta ?? NaN]);
  const at = (n) => body.points.find((p) => p.n === n);
  const p54 = at(54);
  readout.innerHTML = p54 && p54.d !== null
    ? `at N = 54: distance bound <b>${p54.d.toFixed(3)}</b>, separation Δ = <b>${p54.delta.toFixed(3)}</b>`
    : `non-uniform sources are evaluated exactly only up to N = 20; larger N needs external calibration`;
  plot($("d-plot"), [
    { label: "distance bound", color: "#64b5f6", points: d },
    { label: "distinguishable baseline", color: "#9aa3ad", dash: [5, 4], points: dDist },
    { label: "separation Δ", color: "#81c784", points: delta },
  ], { xlabel: "photons N", y0: 0, y1: 1 });
}

// ---------- correction panel ----------

function renderCorrection() {
  const body = JSON.parse(visibility_correction(
    +$("c-vraw").value, +$("c-g2").value,
    +$("c-r").value, +$("c-t").value, +$("c-eps").value,
  ));
  const readout = $("c-readout");
  if (!body.ok) {
    readout.innerHTML = `<span class="warn">${body.error}</span>`;
    readout.dataset.value = "";
    return;
  }
  const flags = [];
  if (body.over_unity) flags.push("exceeds 1 (noisy input; reported unclipped)");
  if (body.splitter_imbalanced) flags.push("R + T deviates more than 1% from a lossless splitter");
  readout.innerHTML =
    `intrinsic visibility <b>${body.value.toFixed(4)}</b>` +
    (flags.length ? ` <span class="warn">${flags.join("; ")}</span>` : ` <span class="ok">✓</span>`);
  readout.dataset.value = body.value;
}

function pushCorrectedV() {
  const v = parseFloat($("c-readout").dataset.value);
  if (!Number.isFinite(v)) return;
  const clipped = Math.min(Math.max(v, 0.8), 1.0);
  $("th-v").value = clipped;
  $("d-v0").value = Math.min(Math.max(v, 0.5), 1.0);
  renderThreshold();
  renderDistance();
}

// ---------- boot ----------

async function main() {
  try {
    await init();
  } catch (e) {
    const el = $("load-error");
    el.hidden = false;
    el.textContent =
      "Failed to load the WebAssembly module. Build it first: " +
      "wasm-pack build crates/wasm --target web --out-dir www/pkg " +
      `(${e})`;
    return;
  }
  for (const id of ["th-v", "th-e", "th-days", "th-flops", "th-fixed", "th-modes", "th-attempt"]) {
    $(id).addEventListener("input", renderThreshold);
  }
  for (const id of ["d-kind", "d-v0", "d-rate", "d-nmax"]) {
    $(id).addEventListener("input", renderDistance);
  }
  for (const id of ["c-vraw", "c-g2", "c-r", "c-t", "c-eps"]) {
    $(id).addEventListener("input", renderCorrection);
  }
  $("c-push").addEventListener("click", pushCorrectedV);
  renderThreshold();
  renderDistance();
  renderCorrection();
}

main();
