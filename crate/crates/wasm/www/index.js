import init, {
  gallery_instance, gallery_list, unit_ball, greedy_ratio_landscape, transfer_curve,
} from "./pkg/gbl_wasm.js";

const $ = (id) => document.getElementById(id);

function showError(e) {
  $("error").textContent = e ? String(e) : "";
}

function frame(ctx, w, h) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#ddd";
  ctx.lineWidth = 1;
}

function polyline(ctx, pts, color, close = false) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  pts.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
  if (close) ctx.closePath();
  ctx.stroke();
}

function drawBall(data) {
  const c = $("ball"), ctx = c.getContext("2d");
  const { width: w, height: h } = c;
  frame(ctx, w, h);
  const all = data.ball.concat(data.renorm_ball, [data.witness.x, data.witness.projection]);
  const r = Math.max(...all.map(([x, y]) => Math.max(Math.abs(x), Math.abs(y)))) * 1.1;
  const sx = (x) => w / 2 + (x / r) * (w / 2);
  const sy = (y) => h / 2 - (y / r) * (h / 2);
  ctx.beginPath();
  ctx.moveTo(0, h / 2); ctx.lineTo(w, h / 2);
  ctx.moveTo(w / 2, 0); ctx.lineTo(w / 2, h);
  ctx.stroke();
  polyline(ctx, data.ball.map(([x, y]) => [sx(x), sy(y)]), "#1f77b4", true);
  polyline(ctx, data.renorm_ball.map(([x, y]) => [sx(x), sy(y)]), "#ff7f0e", true);
  ctx.fillStyle = "#555";
  data.basis.forEach(([x, y], i) => {
    polyline(ctx, [[sx(0), sy(0)], [sx(x), sy(y)]], "#999");
    ctx.fillText(`e${i + 1}`, sx(x) + 4, sy(y) - 4);
  });
  const [wx, wy] = data.witness.x, [px, py] = data.witness.projection;
  polyline(ctx, [[sx(wx), sy(wy)], [sx(px), sy(py)]], "#2ca02c");
  ctx.fillStyle = "#2ca02c";
  for (const [x, y] of [[wx, wy], [px, py]]) {
    ctx.beginPath(); ctx.arc(sx(x), sy(y), 4, 0, 2 * Math.PI); ctx.fill();
  }
  $("ball-info").textContent =
    `K_su = ${data.ksu.toFixed(9)} (${data.exact ? "exact" : "lower bound"}, ${data.method}), A = {${data.witness.set}}`;
}

function drawLandscape(data) {
  const c = $("landscape"), ctx = c.getContext("2d");
  const { width: w, height: h } = c;
  frame(ctx, w, h);
  const series = [data.greedy, data.residual, data.renorm_greedy, data.renorm_residual];
  const top = Math.max(1.05, ...series.flat()) * 1.05;
  const pad = 30;
  const sx = (i) => pad + (i / (data.theta.length - 1)) * (w - 2 * pad);
  const sy = (v) => h - pad - (v / top) * (h - 2 * pad);
  ctx.beginPath(); ctx.moveTo(pad, sy(1)); ctx.lineTo(w - pad, sy(1)); ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.fillText("1", 8, sy(1) + 4);
  ctx.fillText("θ = 0", pad, h - 8);
  ctx.fillText("π", w - pad - 8, h - 8);
  const colors = ["#1f77b4", "#d62728", "#ff7f0e", "#ffbb78"];
  series.forEach((s, k) => polyline(ctx, s.map((v, i) => [sx(i), sy(v)]), colors[k]));
}

function drawCurve(data) {
  const c = $("curve"), ctx = c.getContext("2d");
  const { width: w, height: h } = c;
  frame(ctx, w, h);
  if (data.status !== "found") {
    $("certificate").textContent = data.note;
    return;
  }
  const pad = 30;
  const lo = Math.min(...data.phi) * 0.95, hi = Math.max(data.norm_x, ...data.phi) * 1.05;
  const sx = (t) => pad + t * (w - 2 * pad);
  const sy = (v) => h - pad - ((v - lo) / (hi - lo)) * (h - 2 * pad);
  ctx.beginPath(); ctx.moveTo(pad, sy(data.norm_x)); ctx.lineTo(w - pad, sy(data.norm_x)); ctx.stroke();
  polyline(ctx, data.t.map((t, i) => [sx(t), sy(data.phi[i])]), "#1f77b4");
  ctx.strokeStyle = "#999";
  ctx.setLineDash([4, 4]);
  ctx.beginPath(); ctx.moveTo(sx(data.t_max), pad); ctx.lineTo(sx(data.t_max), h - pad); ctx.stroke();
  ctx.setLineDash([]);
  const ts = data.certificate.t_star;
  const k = Math.round(ts * (data.t.length - 1));
  ctx.fillStyle = "#2ca02c";
  ctx.beginPath(); ctx.arc(sx(ts), sy(data.phi[k]), 4, 0, 2 * Math.PI); ctx.fill();
  ctx.fillStyle = "#555";
  ctx.fillText("‖x‖", w - pad + 2, sy(data.norm_x) + 4);
  ctx.fillText("t_max", sx(data.t_max) + 3, pad + 10);
  ctx.fillText("t = 0", pad, h - 8);
  ctx.fillText("1", w - pad, h - 8);
  $("certificate").textContent = JSON.stringify(data.certificate, null, 2);
}

function run() {
  showError();
  const text = $("instance").value;
  try {
    drawBall(JSON.parse(unit_ball(text, 720)));
    drawLandscape(JSON.parse(greedy_ratio_landscape(text, 1440)));
  } catch (e) {
    showError(e);
  }
  transfer();
}

function transfer() {
  try {
    drawCurve(JSON.parse(transfer_curve($("instance").value, $("split").value, 400)));
  } catch (e) {
    $("certificate").textContent = String(e);
  }
}

function load(name) {
  $("instance").value = gallery_instance(name);
  run();
}

await init();
for (const name of JSON.parse(gallery_list())) {
  const o = document.createElement("option");
  o.textContent = name;
  $("gallery").appendChild(o);
}
$("gallery").value = "shear-2";
$("gallery").onchange = (e) => load(e.target.value);
$("run").onclick = run;
$("transfer").onclick = transfer;
load("shear-2");
