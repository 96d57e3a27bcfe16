import init, { generate, simulate, profile, rewrite } from "./pkg/qmdd_web.js";

const $ = (id) => document.getElementById(id);
const COLORS = { none: "#d1495b", trailing: "#edae49", all: "#00798c" };

function show(node) {
  $("error").textContent = "";
  $("output").replaceChildren(node);
}

function fail(e) {
  $("error").textContent = String(e && e.message ? e.message : e);
}

function guarded(fn) {
  return () => {
    try {
      fn();
    } catch (e) {
      fail(e);
    }
  };
}

function el(tag, text) {
  const node = document.createElement(tag);
  if (text !== undefined) node.textContent = text;
  return node;
}

function onGenerate() {
  const family = $("family").value;
  const qubits = Number($("qubits").value);
  const k = BigInt($("phase").value || "0");
  $("source").value = generate(family, qubits, k);
}

function onSimulate() {
  const out = JSON.parse(simulate($("source").value, $("mode").value, 32));
  const box = el("div");
  box.append(
    el("p", `${out.num_qubits} qubits, mode ${out.mode}: ${out.gates_applied} gates applied, ` +
      `${out.swaps_removed} swaps removed, peak ${out.peak_nodes} nodes, final ${out.final_nodes} nodes. ` +
      `Output permutation [${out.output_permutation.join(" ")}].`),
  );
  const table = el("table");
  const head = el("tr");
  for (const h of ["basis state", "re", "im", "probability"]) head.append(el("th", h));
  table.append(head);
  for (const a of out.amplitudes) {
    const tr = el("tr");
    tr.append(el("td", a.bits), el("td", a.re.toFixed(6)), el("td", a.im.toFixed(6)), el("td", a.probability.toFixed(6)));
    table.append(tr);
  }
  box.append(el("p", `Largest ${out.amplitudes.length} amplitudes, labels as in the source circuit:`), table);
  show(box);
}

function onRewrite() {
  show(el("pre", rewrite($("source").value, $("mode").value)));
}

function onProfile() {
  const runs = JSON.parse(profile($("source").value, "none,trailing,all"));
  const lines = runs.map((r) => `${r.mode.padEnd(9)} ${r.wall_ms.toFixed(1).padStart(9)} ms  ` +
    `peak ${Math.max(...r.nodes)} nodes, ${r.swaps_removed} swaps removed`);
  show(el("pre", lines.join("\n")));
  draw(runs);
}

function draw(runs) {
  const canvas = $("chart");
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 40;
  ctx.clearRect(0, 0, w, h);
  const maxGates = Math.max(...runs.map((r) => r.nodes.length - 1), 1);
  const maxNodes = Math.max(...runs.map((r) => Math.max(...r.nodes)), 1);
  const x = (i) => pad + (i / maxGates) * (w - 2 * pad);
  const y = (v) => h - pad - (Math.log2(v) / Math.log2(Math.max(maxNodes, 2))) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.beginPath();
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad, h - pad);
  ctx.stroke();
  ctx.fillText(`${maxNodes} nodes (log scale)`, pad + 4, pad - 8);
  ctx.fillText(`gate ${maxGates}`, w - pad - 40, h - pad + 16);
  ctx.fillText("0", pad - 4, h - pad + 16);

  const legend = $("legend");
  legend.replaceChildren();
  for (const r of runs) {
    ctx.strokeStyle = COLORS[r.mode];
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    r.nodes.forEach((v, i) => (i === 0 ? ctx.moveTo(x(i), y(v)) : ctx.lineTo(x(i), y(v))));
    ctx.stroke();
    const item = el("span");
    const sw = el("span");
    sw.className = "swatch";
    sw.style.background = COLORS[r.mode];
    item.append(sw, `${r.mode} (${r.nodes.length - 1} gates)`);
    legend.append(item);
  }
}

await init();
$("gen").addEventListener("click", guarded(onGenerate));
$("simulate").addEventListener("click", guarded(onSimulate));
$("profile").addEventListener("click", guarded(onProfile));
$("rewrite").addEventListener("click", guarded(onRewrite));
guarded(onGenerate)();
