/** DOM wiring: connects the store to the page and the event stream. */

import { ApiClient, subscribeStream } from "./api.js";
import { ruleChart, weightChart } from "./charts.js";
import { ConsoleStore } from "./store.js";

const base = window.location.origin;
const api = new ApiClient(base);
const store = new ConsoleStore(api);

const el = (id: string): HTMLElement => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
};

function bar(value: number, max = 1): string {
  const pct = Math.max(0, Math.min(100, (value / max) * 100));
  return `<div class="bar"><div class="fill" style="width:${pct.toFixed(1)}%"></div>` +
         `<span>${value.toFixed(3)}</span></div>`;
}

function renderQuery(): void {
  const panel = el("query-panel");
  const classes = store.state?.classes ?? [];
  const features = store.state?.features ?? [];
  if (!store.pending) {
    panel.innerHTML = `<div class="idle">no pending query</div>`;
    return;
  }
  const q = store.pending.query;
  const posterior = store.displayPosterior();
  const rows = q.features
    .map((v, j) => `<tr><td>${features[j] ?? `f${j + 1}`}</td><td>${bar(v)}</td></tr>`)
    .join("");
  const postRows = posterior
    .map((p, o) => `<tr><td>${classes[o] ?? o}</td><td>${bar(p)}</td></tr>`)
    .join("");
  const buttons = classes
    .map((name, o) => `<button data-class="${o}">${name}</button>`)
    .join("");
  panel.innerHTML = `
    <div class="query-head">sample #${q.index}
      <span class="countdown" id="countdown"></span></div>
    <div class="cols">
      <table><caption>features</caption>${rows}</table>
      <table><caption>class posterior (conflict ${q.output_conflict.toFixed(3)})</caption>
        ${postRows}</table>
    </div>
    <div class="buttons">${buttons}</div>`;
  panel.querySelectorAll("button").forEach((btn) => {
    btn.addEventListener("click", () => {
      const cls = Number(btn.getAttribute("data-class"));
      void store.submit(cls);
    });
  });
}

function renderState(): void {
  const s = store.state;
  el("status").innerHTML = s
    ? `rules <b>${s.rules}</b> · seen <b>${s.samples_seen}</b>/${s.n_train} · ` +
      `labeled <b>${s.labeled}</b> · budget spent <b>${s.budget_spent.toFixed(3)}</b> · ` +
      `θ <b>${s.theta.toFixed(3)}</b>${s.done ? " · <b>done</b>" : ""}`
    : "connecting…";
  el("toast").textContent = store.toast;
}

function renderCharts(): void {
  el("rule-chart").innerHTML = ruleChart(store.ruleTrace, store.events);
  el("weight-chart").innerHTML = weightChart(
    store.weightTrace, store.state?.features ?? []);
}

store.subscribe(() => {
  renderState();
  renderQuery();
});

setInterval(() => {
  const node = document.getElementById("countdown");
  if (node && store.pending) {
    node.textContent = `${(store.remainingMs() / 1000).toFixed(0)}s left`;
    if (store.expired()) store.setQuery(null);
  }
}, 250);

setInterval(() => {
  void store.refreshTraces().then(renderCharts).catch(() => undefined);
}, 2000);

subscribeStream(base, (msg) => store.handleMessage(msg), (connected) => {
  el("connection").className = connected ? "dot on" : "dot off";
});

void store.refreshState();
void store.refreshQuery();
void store.refreshTraces().then(renderCharts).catch(() => undefined);
