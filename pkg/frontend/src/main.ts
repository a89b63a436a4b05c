import { ApiError, ManagerApi } from "./api";
import { drawScatter } from "./render";
import { INDICATORS, Indicator, StateDoc, TradeoffPointDoc } from "./types";
import {
  AxisPair,
  filterByUtilization,
  projectTradeoff,
  summarizeProposal,
  validateSliderValue,
} from "./viewmodel";

const POLL_MS = 2000;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

/** All state below is view preference only; a reload reconstructs
 *  everything else from the API. */
const prefs = {
  blade: "",
  axes: { profit: "virtual_profit", indicator: "co2" } as AxisPair,
  uLo: 0,
  uHi: 1,
};

let api: ManagerApi;
let lastPoints: TradeoffPointDoc[] = [];
let lastHistorySeq = 0;

function redraw(): void {
  const shown = filterByUtilization(lastPoints, prefs.uLo, prefs.uHi);
  drawScatter(el<HTMLCanvasElement>("scatter"), projectTradeoff(shown, prefs.axes), {
    x: prefs.axes.profit === "real_profit" ? "real profit (USD/h)" : "virtual profit (USD/h)",
    y: `${prefs.axes.indicator} (g/h)`,
  });
}

async function refreshTradeoff(): Promise<void> {
  if (!prefs.blade) {
    return;
  }
  const doc = await api.tradeoff(prefs.blade);
  lastPoints = doc.points;
  redraw();
}

function renderState(doc: StateDoc): void {
  const totals = doc.state.totals;
  el("summary").textContent =
    `tick ${doc.state.tick_count} @ ${doc.state.time} — ` +
    `real ${totals.real_profit.toFixed(4)} USD/h, ` +
    `virtual ${totals.virtual_profit.toFixed(4)} USD/h, ` +
    `${totals.power_kw.toFixed(4)} kW` +
    (doc.report.feasible ? "" : " — INFEASIBLE");

  const proposalBox = el("proposal");
  const applyButton = el<HTMLButtonElement>("apply");
  if (doc.pending_proposal) {
    const summary = summarizeProposal(doc.pending_proposal);
    proposalBox.textContent = summary.noChanges
      ? "no changes"
      : [...summary.migrations, ...summary.frequencyChanges].join("\n") +
        `\nΔ real profit: ${summary.deltaRealProfit.toFixed(4)} USD/h`;
    applyButton.disabled = summary.noChanges;
  } else {
    proposalBox.textContent = "no pending proposal";
    applyButton.disabled = true; // apply without a proposal stays unreachable
  }
}

async function refreshState(): Promise<void> {
  const doc = await api.state();
  if (!prefs.blade) {
    prefs.blade = Object.keys(doc.report.blades).sort()[0] ?? "";
  }
  renderState(doc);
  const entries = await api.history(lastHistorySeq);
  if (entries.length > 0) {
    lastHistorySeq = entries[entries.length - 1].seq;
    const timeline = el("timeline");
    for (const entry of entries) {
      const line = document.createElement("div");
      line.textContent = `#${entry.seq} ${entry.ts} ${entry.kind}`;
      timeline.prepend(line);
    }
  }
}

async function pushTax(indicator: Indicator, value: number): Promise<void> {
  const check = validateSliderValue(value);
  const note = el("tax-note");
  if (!check.ok) {
    note.textContent = `${indicator}: ${check.reason}`;
    return;
  }
  const slider = el<HTMLInputElement>(`tax-${indicator}`);
  slider.disabled = true; // in-flight PUT disables the affected slider
  try {
    const taxes = await api.taxes();
    taxes.default_per_kg[indicator] = value;
    await api.putTaxes(taxes);
    note.textContent = "";
    await Promise.all([refreshState(), refreshTradeoff()]);
  } catch (err) {
    if (err instanceof ApiError && err.field) {
      note.textContent = `${err.field}: ${err.message}`;
    } else {
      note.textContent = String(err);
    }
    const server = await api.taxes(); // revert to the server's value
    slider.value = String(server.default_per_kg[indicator] ?? 0);
  } finally {
    slider.disabled = false;
  }
}

function wireControls(): void {
  el<HTMLSelectElement>("axis-profit").addEventListener("change", (e) => {
    prefs.axes = { ...prefs.axes, profit: (e.target as HTMLSelectElement).value as AxisPair["profit"] };
    redraw();
  });
  el<HTMLSelectElement>("axis-indicator").addEventListener("change", (e) => {
    prefs.axes = { ...prefs.axes, indicator: (e.target as HTMLSelectElement).value as Indicator };
    redraw();
  });
  el<HTMLInputElement>("u-lo").addEventListener("change", (e) => {
    prefs.uLo = Number((e.target as HTMLInputElement).value);
    redraw();
  });
  el<HTMLInputElement>("u-hi").addEventListener("change", (e) => {
    prefs.uHi = Number((e.target as HTMLInputElement).value);
    redraw();
  });
  for (const indicator of INDICATORS) {
    el<HTMLInputElement>(`tax-${indicator}`).addEventListener("change", (e) => {
      void pushTax(indicator, Number((e.target as HTMLInputElement).value));
    });
  }
  el<HTMLButtonElement>("optimize").addEventListener("click", async () => {
    await api.optimize();
    await refreshState();
  });
  el<HTMLButtonElement>("apply").addEventListener("click", async () => {
    await api.apply();
    await Promise.all([refreshState(), refreshTradeoff()]);
  });
}

async function start(): Promise<void> {
  const params = new URLSearchParams(location.search);
  api = new ManagerApi(params.get("api") ?? `http://${location.hostname}:8040`);
  wireControls();
  await refreshState();
  await refreshTradeoff();
  setInterval(() => {
    void refreshState().then(refreshTradeoff);
  }, POLL_MS);
}

window.addEventListener("load", () => {
  void start();
});
