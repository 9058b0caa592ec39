import init, { curvature_heatmap, twist_orbit, geodesic_path } from "./pkg/killing3_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function fmt(x) {
  return x === null || x === undefined ? "n/a" : Number(x).toExponential(3);
}

function color(t) {
  // blue to red
  const r = Math.round(255 * t);
  const b = Math.round(255 * (1 - t));
  const g = Math.round(120 * (1 - Math.abs(2 * t - 1)));
  return `rgb(${r},${g},${b})`;
}

function drawHeatmap() {
  const out = $("hm-out");
  let data;
  try {
    data = JSON.parse(curvature_heatmap($("hm-name").value, $("hm-params").value, $("hm-q").value, 64, 64));
  } catch (e) {
    out.textContent = String(e);
    return;
  }
  const cv = $("hm");
  const ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  const nr = data.r.length;
  const nt = data.theta.length;
  const w = cv.width / nt;
  const h = cv.height / nr;
  const span = data.max - data.min;
  for (let i = 0; i < nr; i++) {
    for (let j = 0; j < nt; j++) {
      const v = data.values[i * nt + j];
      ctx.fillStyle = v === null ? "#ddd" : color(span > 1e-12 ? (v - data.min) / span : 0.5);
      // r grows downwards, θ to the right
      ctx.fillRect(j * w, i * h, Math.ceil(w), Math.ceil(h));
    }
  }
  out.textContent =
    `${data.quantity}\nr ∈ [${data.r[0].toFixed(3)}, ${data.r[nr - 1].toFixed(3)}] (down)\n` +
    `θ ∈ [${data.theta[0].toFixed(3)}, ${data.theta[nt - 1].toFixed(3)}] (right)\n` +
    `min ${fmt(data.min)}\nmax ${fmt(data.max)}`;
}

function drawOrbit() {
  const out = $("o-out");
  let data;
  try {
    data = JSON.parse(twist_orbit(num("o-b"), num("o-c"), num("o-w"), num("o-span")));
  } catch (e) {
    out.textContent = String(e);
    return;
  }
  const cv = $("orbit");
  const ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  const m = Math.max(...data.omega.map(Math.abs), ...data.omega_r.map(Math.abs), 1e-9) * 1.1;
  const sx = (x) => cv.width / 2 + (x / m) * (cv.width / 2);
  const sy = (y) => cv.height / 2 - (y / m) * (cv.height / 2);
  ctx.strokeStyle = "#bbb";
  ctx.beginPath();
  ctx.moveTo(0, cv.height / 2);
  ctx.lineTo(cv.width, cv.height / 2);
  ctx.moveTo(cv.width / 2, 0);
  ctx.lineTo(cv.width / 2, cv.height);
  ctx.stroke();
  ctx.strokeStyle = "#c03";
  ctx.beginPath();
  data.omega.forEach((w, i) => {
    const x = sx(w);
    const y = sy(data.omega_r[i]);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
  out.textContent =
    `horizontal ω, vertical ω_r\nsamples ${data.omega.length}\nE(0) ${fmt(data.energy0)}\n` +
    `energy drift ${fmt(data.energy_drift)}\nperiod ${data.period === null ? "none" : data.period.toFixed(9)}`;
}

function drawGeodesic() {
  const out = $("g-out");
  let data;
  try {
    data = JSON.parse(
      geodesic_path($("g-name").value, "", num("g-r"), num("g-th"), num("g-vt"), num("g-vr"), num("g-vth"), num("g-len")),
    );
  } catch (e) {
    out.textContent = String(e);
    return;
  }
  const cv = $("geo");
  const ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  // quotient drawn in polar form: (r cos θ, r sin θ)
  const xs = data.r.map((r, i) => r * Math.cos(data.theta[i]));
  const ys = data.r.map((r, i) => r * Math.sin(data.theta[i]));
  const m = Math.max(...xs.map(Math.abs), ...ys.map(Math.abs), 1e-9) * 1.1;
  const sx = (x) => cv.width / 2 + (x / m) * (cv.width / 2);
  const sy = (y) => cv.height / 2 - (y / m) * (cv.height / 2);
  ctx.strokeStyle = "#036";
  ctx.beginPath();
  xs.forEach((x, i) => {
    if (i === 0) ctx.moveTo(sx(x), sy(ys[i]));
    else ctx.lineTo(sx(x), sy(ys[i]));
  });
  ctx.stroke();
  ctx.fillStyle = "#c03";
  ctx.fillRect(sx(xs[0]) - 3, sy(ys[0]) - 3, 6, 6);
  out.textContent =
    `points ${data.s.length}, length ${data.s[data.s.length - 1].toFixed(3)}\n` +
    `c = g(T, γ′) ${data.conserved_c.toFixed(6)}\nc drift ${fmt(data.c_drift)}\n` +
    `speed drift ${fmt(data.speed_drift)}\n` +
    `projection residual ${data.projection_residual === null ? "not applicable (c ≠ 0 with twist)" : fmt(data.projection_residual)}` +
    (data.stopped ? `\nshortened: ${data.stopped}` : "");
}

await init();
$("hm-go").addEventListener("click", drawHeatmap);
$("o-go").addEventListener("click", drawOrbit);
$("g-go").addEventListener("click", drawGeodesic);
$("hm-name").addEventListener("change", () => {
  const defaults = { hopf: '{"R": 1}', nil: '{"omega0": 1}', cf_family: '{"B": 0, "C": 1, "omega0": 0, "h_amp": 0.3}' };
  $("hm-params").value = defaults[$("hm-name").value] ?? "";
});
drawHeatmap();
drawOrbit();
drawGeodesic();
