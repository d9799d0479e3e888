import init, { generate_graph, gibbs_profile, mixing_curve, chain_trace } from "./pkg/randmatch_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const COLORS = ["#999", "#4e79a7", "#59a14f", "#edc948", "#e15759", "#b07aa1", "#76b7b2", "#ff9da7", "#9c755f"];

function guarded(fn) {
  return () => {
    $("error").textContent = "";
    try {
      fn();
    } catch (e) {
      $("error").textContent = String(e.message ?? e);
    }
  };
}

// Line plot of several series sharing one x axis. Each series: {xs, ys, color, width, dash}.
function plot(canvas, series, { xLabel, yLabel, yMax, hLines = [], vLines = [] }) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, L = 48, R = 12, T = 10, B = 32;
  ctx.clearRect(0, 0, W, H);
  const xs = series.flatMap((s) => s.xs);
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  const y1 = yMax ?? Math.max(1e-9, ...series.flatMap((s) => s.ys));
  const px = (x) => L + ((x - x0) / (x1 - x0 || 1)) * (W - L - R);
  const py = (y) => H - B - (y / y1) * (H - T - B);

  ctx.strokeStyle = "#444";
  ctx.fillStyle = "#444";
  ctx.font = "11px system-ui";
  ctx.beginPath();
  ctx.moveTo(L, T);
  ctx.lineTo(L, H - B);
  ctx.lineTo(W - R, H - B);
  ctx.stroke();
  for (let i = 0; i <= 4; i++) {
    const y = (y1 * i) / 4;
    ctx.fillText(y.toPrecision(3), 4, py(y) + 4);
    const x = x0 + ((x1 - x0) * i) / 4;
    ctx.fillText(x.toPrecision(3), px(x) - 10, H - B + 14);
  }
  ctx.fillText(xLabel, W / 2, H - 4);
  ctx.save();
  ctx.translate(12, H / 2 + 20);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(yLabel, 0, 0);
  ctx.restore();

  const rule = (x, y, x2, y2, color) => {
    ctx.strokeStyle = color;
    ctx.setLineDash([4, 4]);
    ctx.beginPath();
    ctx.moveTo(x, y);
    ctx.lineTo(x2, y2);
    ctx.stroke();
    ctx.setLineDash([]);
  };
  for (const h of hLines) rule(L, py(h.y), W - R, py(h.y), h.color);
  for (const v of vLines) if (v.x >= x0 && v.x <= x1) rule(px(v.x), T, px(v.x), H - B, v.color);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = s.width ?? 1.5;
    ctx.beginPath();
    s.xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(s.ys[i])) : ctx.moveTo(px(x), py(s.ys[i]))));
    ctx.stroke();
    ctx.lineWidth = 1;
  }
}

function generate() {
  $("graph").value = generate_graph($("family").value, num("n"), num("p"), num("d"), BigInt(num("seed")));
}

function drawGibbs() {
  const r = JSON.parse(gibbs_profile($("graph").value, num("gx0"), num("gx1"), 200));
  const series = r.size_counts.map((_, j) => ({
    xs: r.log2_lambdas,
    ys: r.mass_by_size.map((row) => row[j]),
    color: COLORS[j % COLORS.length],
    width: j === r.k ? 3 : 1.5,
  }));
  plot($("gibbs-plot"), series, { xLabel: "log₂λ", yLabel: "mass", yMax: 1, vLines: [{ x: r.m, color: "#c00" }] });
  $("gibbs-info").textContent =
    `n=${r.n}, m=${r.m}, maximum size k=${r.k}, matchings by size ${JSON.stringify(r.size_counts)}. ` +
    `Thick line: size k. Red rule: log₂λ = m.`;
}

function drawMix() {
  const r = JSON.parse(mixing_curve($("graph").value, num("mx"), num("mh")));
  const xs = r.curve.map((_, t) => t);
  plot($("mix-plot"), [{ xs, ys: r.curve, color: "#4e79a7", width: 2 }], {
    xLabel: "t",
    yLabel: "max TV",
    yMax: 1,
    hLines: [{ y: r.eps, color: "#c00" }],
    vLines: [
      { x: r.claimed_upper, color: "#59a14f" },
      { x: r.claimed_lower, color: "#edc948" },
    ],
  });
  const t = r.t_mix === null ? `above 1/(2e) for all ${r.curve.length - 1} steps` : `t_mix = ${r.t_mix}`;
  $("mix-info").textContent =
    `${r.states} states; ${t}. Red: 1/(2e). Green: m·ln(4en) = ${r.claimed_upper.toFixed(2)}. ` +
    `Yellow: m/k = ${r.claimed_lower.toFixed(2)}.`;
}

function drawTrace() {
  const r = JSON.parse(chain_trace($("graph").value, num("tx"), BigInt(num("ts")), BigInt(num("tseed"))));
  const xs = r.sizes.map((_, i) => Math.min(i * r.stride, r.steps));
  plot($("trace-plot"), [{ xs, ys: r.sizes, color: "#4e79a7", width: 2 }], {
    xLabel: "step",
    yLabel: "|M|",
    yMax: Math.max(1, r.k),
    hLines: [{ y: r.k, color: "#c00" }],
  });
  const last = r.sizes[r.sizes.length - 1];
  $("trace-info").textContent = `${r.steps} steps, final size ${last}, maximum ${r.k} (red).`;
}

await init();
$("gen").onclick = guarded(generate);
$("gibbs").onclick = guarded(drawGibbs);
$("mix").onclick = guarded(drawMix);
$("trace").onclick = guarded(drawTrace);
guarded(() => {
  generate();
  drawGibbs();
  drawMix();
  drawTrace();
})();
