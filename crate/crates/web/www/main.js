import init, { normConstant, stencilWeights, operatorProfile } from "./pkg/hyperfrac_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function report(el, fn) {
  el.classList.remove("error");
  try {
    fn();
  } catch (e) {
    el.classList.add("error");
    el.textContent = e.message ?? String(e);
  }
}

function showConstant() {
  const out = $("c-out");
  report(out, () => {
    const r = normConstant(num("c-n"), num("c-m"), num("c-s"));
    out.textContent = `${r.value.toPrecision(15)} (${r.branch} branch)`;
    r.free();
  });
}

function showStencil() {
  const out = $("w-out");
  report(out, () => {
    const m = num("w-m");
    const w = stencilWeights(m);
    out.textContent = w.map((v, i) => `w[${i - m}] = ${v}`).join("\n");
  });
}

function draw(canvas, x, series) {
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const all = series.flatMap((s) => s.y);
  let lo = Math.min(0, ...all);
  let hi = Math.max(0, ...all);
  if (hi === lo) hi = lo + 1;
  const pad = 20;
  const px = (v) => pad + ((v - x[0]) / (x[x.length - 1] - x[0])) * (width - 2 * pad);
  const py = (v) => height - pad - ((v - lo) / (hi - lo)) * (height - 2 * pad);
  ctx.strokeStyle = "#ddd";
  ctx.beginPath();
  ctx.moveTo(pad, py(0));
  ctx.lineTo(width - pad, py(0));
  ctx.stroke();
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash ?? []);
    ctx.lineWidth = 2;
    ctx.beginPath();
    s.y.forEach((v, i) => (i ? ctx.lineTo(px(x[i]), py(v)) : ctx.moveTo(px(x[i]), py(v))));
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

function showProfile() {
  const gap = $("p-gap");
  report(gap, () => {
    const count = 121;
    const flat = operatorProfile($("p-f").value, num("p-m"), num("p-s"), num("p-lo"), num("p-hi"), count);
    const block = (k) => Array.from(flat.subarray(k * count, (k + 1) * count));
    const [x, field, direct, spectral] = [0, 1, 2, 3].map(block);
    draw($("p-canvas"), x, [
      { y: field, color: "#888" },
      { y: direct, color: "#06c" },
      { y: spectral, color: "#c60", dash: [6, 4] },
    ]);
    const worst = direct.reduce((a, d, i) => Math.max(a, Math.abs(d - spectral[i])), 0);
    gap.textContent = worst.toExponential(2);
  });
}

await init();
$("c-go").addEventListener("click", showConstant);
$("w-go").addEventListener("click", showStencil);
$("p-go").addEventListener("click", showProfile);
showConstant();
showStencil();
showProfile();
