import {
  Indicator,
  INDICATORS,
  PlanStepDoc,
  ProposalDoc,
  RatesDoc,
  TradeoffPointDoc,
} from "./types";

export type ProfitAxis = "real_profit" | "virtual_profit";

export interface AxisPair {
  profit: ProfitAxis;
  indicator: Indicator;
}

/** The four reference states called out on the trade-off scatter:
 *  utilization 80% at each frequency level, labelled A (lowest) to D. */
export const MARKER_UTILIZATION = 0.8;
export const MARKER_LABELS: ReadonlyArray<{ label: string; fGhz: number }> = [
  { label: "A", fGhz: 1.6 },
  { label: "B", fGhz: 1.73 },
  { label: "C", fGhz: 1.86 },
  { label: "D", fGhz: 2.0 },
];

const EPS = 1e-9;

export function markerFor(u: number, fGhz: number): string | null {
  if (Math.abs(u - MARKER_UTILIZATION) > EPS) {
    return null;
  }
  const hit = MARKER_LABELS.find((m) => Math.abs(m.fGhz - fGhz) < EPS);
  return hit ? hit.label : null;
}

export interface ScatterPoint {
  x: number; // profit axis, USD/h
  y: number; // indicator rate, g/h
  u: number;
  fGhz: number;
  color: string;
  borderColor: string;
  isCurrent: boolean;
  marker: string | null;
}

function channel(v: number): string {
  return Math.round(v).toString(16).padStart(2, "0");
}

/** Cold-to-hot ramp over utilization: blue at u=0 through red at u>=1. */
export function utilizationColor(u: number): string {
  const t = Math.min(1, Math.max(0, u));
  const r = 255 * t;
  const b = 255 * (1 - t);
  const g = 64 * (1 - Math.abs(2 * t - 1));
  return `#${channel(r)}${channel(g)}${channel(b)}`;
}

/** Higher frequencies get darker point borders. */
export function frequencyBorder(fGhz: number, fMin = 1.6, fMax = 2.0): string {
  const t = fMax > fMin ? Math.min(1, Math.max(0, (fGhz - fMin) / (fMax - fMin))) : 0;
  const shade = 192 * (1 - t);
  return `#${channel(shade)}${channel(shade)}${channel(shade)}`;
}

/** Pure projection of an already-fetched dataset onto an axis pair; changing
 *  axes never requires a re-fetch. */
export function projectTradeoff(points: TradeoffPointDoc[], axes: AxisPair): ScatterPoint[] {
  return points.map((p) => ({
    x: p[axes.profit],
    y: p.rates_g_per_h[axes.indicator],
    u: p.u,
    fGhz: p.f_ghz,
    color: utilizationColor(p.u),
    borderColor: frequencyBorder(p.f_ghz),
    isCurrent: p.is_current,
    marker: markerFor(p.u, p.f_ghz),
  }));
}

export function filterByUtilization(
  points: TradeoffPointDoc[],
  lo: number,
  hi: number,
): TradeoffPointDoc[] {
  return points.filter((p) => p.u >= lo - EPS && p.u <= hi + EPS);
}

export interface SliderValidation {
  ok: boolean;
  reason?: string;
}

/** Client-side gate: negative or non-finite rates never reach the API. */
export function validateSliderValue(value: number): SliderValidation {
  if (!Number.isFinite(value)) {
    return { ok: false, reason: "rate must be a number" };
  }
  if (value < 0) {
    return { ok: false, reason: "rate must be >= 0" };
  }
  return { ok: true };
}

export function describePlanStep(step: PlanStepDoc): string {
  if (step.op === "migrate") {
    return `migrate ${step.vm}: ${step.from} → ${step.to}`;
  }
  return `set ${step.blade}: ${step.from_ghz} → ${step.to_ghz} GHz`;
}

export interface ProposalSummary {
  noChanges: boolean;
  migrations: string[];
  frequencyChanges: string[];
  deltaRealProfit: number;
  deltaIndicators: RatesDoc;
}

/** Diff view for a pending proposal: the plan steps plus projected deltas,
 *  all taken verbatim from the API response. */
export function summarizeProposal(proposal: ProposalDoc): ProposalSummary {
  const migrations = proposal.plan.filter((s) => s.op === "migrate").map(describePlanStep);
  const frequencyChanges = proposal.plan
    .filter((s) => s.op === "set_frequency")
    .map(describePlanStep);
  const deltaIndicators = Object.fromEntries(
    INDICATORS.map((ind) => [
      ind,
      proposal.projected_totals.rates_g_per_h[ind] - proposal.current_totals.rates_g_per_h[ind],
    ]),
  ) as RatesDoc;
  return {
    noChanges: proposal.plan.length === 0,
    migrations,
    frequencyChanges,
    deltaRealProfit: proposal.projected_totals.real_profit - proposal.current_totals.real_profit,
    deltaIndicators,
  };
}
