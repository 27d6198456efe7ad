// Expects the wasm-bindgen output (`--target web`) in ./pkg; see build.sh.
import init, { propagate, count, measure } from "./pkg/splforge_wasm.js";

const $ = (id) => document.getElementById(id);

function show(target, run) {
  const out = $(target);
  out.classList.remove("error");
  try {
    out.textContent = JSON.stringify(JSON.parse(run()), null, 2);
  } catch (e) {
    out.classList.add("error");
    out.textContent = e.message ?? String(e);
  }
}

async function main() {
  await init();
  const res = await fetch("webspl.fm");
  if (res.ok) $("model").value = await res.text();

  $("propagate").onclick = () => show("fm-out", () => propagate($("model").value, $("decisions").value));
  $("count").onclick = () => show("fm-out", () => count($("model").value, $("decisions").value));
  $("measure").onclick = async () => {
    const files = await Promise.all(
      [...$("files").files].map(async (f) => ({ path: f.webkitRelativePath || f.name, text: await f.text() })),
    );
    show("metrics-out", () => measure(JSON.stringify(files)));
  };
}

main();
