import { describe, expect, it } from "vitest";

import { ProposalDoc, RatesDoc, TradeoffPointDoc } from "../src/types";
import {
  filterByUtilization,
  frequencyBorder,
  markerFor,
  projectTradeoff,
  summarizeProposal,
  utilizationColor,
  validateSliderValue,
} from "../src/viewmodel";

const LEVELS = [1.6, 1.73, 1.86, 2.0];

function rates(co2: number): RatesDoc {
  return { co2, so2: co2 / 10, nox: co2 / 100, iron: 0.1, copper: 0.01, bauxite: 0.001 };
}

function gridPoints(): TradeoffPointDoc[] {
  const points: TradeoffPointDoc[] = [];
  for (let i = 0; i <= 10; i++) {
    const u = i / 10;
    for (const f of LEVELS) {
      points.push({
        u,
        f_ghz: f,
        real_profit: 0.5 - 0.1 * u,
        virtual_profit: 0.3 - 0.1 * u - 0.01 * f,
        rates_g_per_h: rates(u * f * 10),
        is_current: u === 0.8 && f === 2.0,
      });
    }
  }
  return points;
}

describe("projectTradeoff", () => {
  it("projects the chosen axis pair without touching the dataset", () => {
    const points = gridPoints();
    const virtualCo2 = projectTradeoff(points, { profit: "virtual_profit", indicator: "co2" });
    expect(virtualCo2).toHaveLength(44);
    expect(virtualCo2[0].x).toBe(points[0].virtual_profit);
    expect(virtualCo2[0].y).toBe(points[0].rates_g_per_h.co2);

    // re-projection is pure: same dataset, different axes, no re-fetch
    const realSo2 = projectTradeoff(points, { profit: "real_profit", indicator: "so2" });
    expect(realSo2).toHaveLength(44);
    expect(realSo2[5].x).toBe(points[5].real_profit);
    expect(realSo2[5].y).toBe(points[5].rates_g_per_h.so2);
  });

  it("flags exactly one current point and labels A-D at 80% utilization", () => {
    const projected = projectTradeoff(gridPoints(), {
      profit: "virtual_profit",
      indicator: "co2",
    });
    expect(projected.filter((p) => p.isCurrent)).toHaveLength(1);
    const labels = projected.filter((p) => p.marker !== null);
    expect(labels.map((p) => [p.marker, p.fGhz]).sort()).toEqual([
      ["A", 1.6],
      ["B", 1.73],
      ["C", 1.86],
      ["D", 2.0],
    ]);
    expect(labels.every((p) => p.u === 0.8)).toBe(true);
  });

  it("collapses the virtual axis onto the real axis when taxes are zero", () => {
    const zeroTaxed = gridPoints().map((p) => ({ ...p, virtual_profit: p.real_profit }));
    const virtual = projectTradeoff(zeroTaxed, { profit: "virtual_profit", indicator: "co2" });
    const real = projectTradeoff(zeroTaxed, { profit: "real_profit", indicator: "co2" });
    virtual.forEach((p, i) => expect(p.x).toBe(real[i].x));
  });
});

describe("markerFor", () => {
  it("labels only the four reference states", () => {
    expect(markerFor(0.8, 1.6)).toBe("A");
    expect(markerFor(0.8, 2.0)).toBe("D");
    expect(markerFor(0.7, 1.6)).toBeNull();
    expect(markerFor(0.8, 1.8)).toBeNull();
  });
});

describe("color encoding", () => {
  it("runs cold to hot over utilization", () => {
    expect(utilizationColor(0)).toBe("#0000ff");
    expect(utilizationColor(1)).toBe("#ff0000");
    expect(utilizationColor(1.3)).toBe("#ff0000"); // overcommit clamps hot
  });

  it("darkens borders with frequency", () => {
    expect(frequencyBorder(2.0)).toBe("#000000");
    expect(frequencyBorder(1.6) > frequencyBorder(2.0)).toBe(true);
  });
});

describe("filterByUtilization", () => {
  it("keeps only the requested load band", () => {
    const band = filterByUtilization(gridPoints(), 0.7, 0.9);
    expect(band).toHaveLength(12); // u in {0.7, 0.8, 0.9} x 4 levels
    expect(band.every((p) => p.u >= 0.7 && p.u <= 0.9)).toBe(true);
  });
});

describe("validateSliderValue", () => {
  it("blocks negative and non-finite rates before any PUT", () => {
    expect(validateSliderValue(0).ok).toBe(true);
    expect(validateSliderValue(2.5).ok).toBe(true);
    expect(validateSliderValue(-1).ok).toBe(false);
    expect(validateSliderValue(Number.NaN).ok).toBe(false);
  });
});

describe("summarizeProposal", () => {
  const totals = (rp: number, co2: number) => ({
    revenue: 1,
    energy_cost: 0.1,
    opex: 0.1,
    corporate_tax: 0.05,
    real_profit: rp,
    virtual_tax_total: 0,
    virtual_profit: rp,
    power_kw: 0.1,
    rates_g_per_h: rates(co2),
  });

  it("lists plan steps and projected deltas", () => {
    const proposal: ProposalDoc = {
      placement: { vm_to_blade: { vm1: "b2" }, blade_freq_ghz: { b1: 1.6, b2: 2.0 } },
      plan: [
        { op: "migrate", vm: "vm1", from: "b1", to: "b2" },
        { op: "set_frequency", blade: "b1", from_ghz: 2.0, to_ghz: 1.6 },
      ],
      seed: 1,
      generations: 10,
      projected_totals: totals(0.9, 10),
      current_totals: totals(1.0, 12),
    };
    const summary = summarizeProposal(proposal);
    expect(summary.noChanges).toBe(false);
    expect(summary.migrations).toEqual(["migrate vm1: b1 → b2"]);
    expect(summary.frequencyChanges).toEqual(["set b1: 2 → 1.6 GHz"]);
    expect(summary.deltaRealProfit).toBeCloseTo(-0.1, 12);
    expect(summary.deltaIndicators.co2).toBeCloseTo(-2, 12);
  });

  it("reports an already-optimal state as no changes", () => {
    const proposal: ProposalDoc = {
      placement: { vm_to_blade: {}, blade_freq_ghz: {} },
      plan: [],
      seed: 1,
      generations: 10,
      projected_totals: totals(1.0, 12),
      current_totals: totals(1.0, 12),
    };
    expect(summarizeProposal(proposal).noChanges).toBe(true);
  });
});
