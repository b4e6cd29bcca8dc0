import init, { response_curves, chsh, monte_carlo } from "./pkg/waybell_web.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#222", "#999", "#d62728", "#1f77b4", "#2ca02c", "#9467bd"];

function drawCurves() {
  const dl = parseFloat($("curve-dl").value);
  $("curve-dl-out").textContent = dl.toFixed(2);
  const states = [["curve-singlet", "singlet"], ["curve-psi", "psi_plus"], ["curve-phi", "phi_minus"]]
    .filter(([id]) => $(id).checked)
    .map(([, s]) => s);
  const canvas = $("curve-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  let table;
  try {
    table = JSON.parse(response_curves(new Float64Array([dl]), states.join(","), 401));
  } catch (e) {
    $("curve-legend").innerHTML = `<span class="err">${e}</span>`;
    return;
  }
  const pad = 30, w = canvas.width - 2 * pad, h = canvas.height - 2 * pad;
  const x = (t) => pad + (t / (2 * Math.PI)) * w;
  const y = (v) => pad + (1 - (v + 1.05) / 2.1) * h;
  ctx.strokeStyle = "#eee";
  for (const v of [-1, 0, 1]) {
    ctx.beginPath(); ctx.moveTo(pad, y(v)); ctx.lineTo(pad + w, y(v)); ctx.stroke();
  }
  const legend = [];
  table.columns.slice(1).forEach((name, i) => {
    ctx.strokeStyle = COLORS[i % COLORS.length];
    ctx.lineWidth = i < 2 ? 1 : 2;
    ctx.beginPath();
    table.rows.forEach((row, k) => {
      const px = x(row[0]), py = y(row[i + 1]);
      k === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    });
    ctx.stroke();
    legend.push(`<span><i style="background:${ctx.strokeStyle}"></i>${name}</span>`);
  });
  $("curve-legend").innerHTML = legend.join("");
}

function updateChsh() {
  const angles = ["chsh-a", "chsh-ap", "chsh-b", "chsh-bp"].map((id) => parseFloat($(id).value));
  try {
    const r = JSON.parse(chsh($("chsh-model").value, parseFloat($("chsh-dl").value), ...angles));
    $("chsh-out").textContent =
      `S = ${r.s_value}  (${r.classification})\n` +
      `terms = ${r.per_term.join(", ")}\n` +
      `S − 2√2 = ${r.tsirelson_margin}`;
  } catch (e) {
    $("chsh-out").textContent = String(e);
  }
}

function runMc() {
  const model = $("mc-model").value;
  const state = model === "way_triplet" ? "psi_plus" : "singlet";
  const theta = parseFloat($("mc-theta").value);
  try {
    const r = JSON.parse(monte_carlo(model, state, parseFloat($("mc-dl").value), theta,
      parseFloat($("mc-seed").value), parseInt($("mc-n").value, 10)));
    const z = r.std_error > 0 ? (r.mean - r.closed_form) / r.std_error : 0;
    $("mc-out").textContent =
      `mean = ${r.mean} ± ${r.std_error}\nclosed form = ${r.closed_form}  (z = ${z.toFixed(2)})\n` +
      `accepted = ${r.n_accepted}, rejected = ${r.n_rejected}`;
  } catch (e) {
    $("mc-out").textContent = String(e);
  }
}

await init();
for (const id of ["curve-dl", "curve-singlet", "curve-psi", "curve-phi"]) $(id).addEventListener("input", drawCurves);
for (const id of ["chsh-model", "chsh-dl", "chsh-a", "chsh-ap", "chsh-b", "chsh-bp"]) $(id).addEventListener("input", updateChsh);
$("mc-theta").addEventListener("input", () => { $("mc-theta-out").textContent = parseFloat($("mc-theta").value).toFixed(3); });
$("mc-run").addEventListener("click", runMc);
$("mc-theta-out").textContent = parseFloat($("mc-theta").value).toFixed(3);
drawCurves();
updateChsh();
runMc();
