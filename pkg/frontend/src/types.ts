/** Documents exchanged with the manager API.  Every displayed number
 *  originates from one of these; the dashboard computes no model values. */

export const INDICATORS = ["co2", "so2", "nox", "iron", "copper", "bauxite"] as const;
export type Indicator = (typeof INDICATORS)[number];

export type RatesDoc = Record<Indicator, number>;

export interface CostsDoc {
  revenue: number;
  energy_cost: number;
  opex: number;
  corporate_tax: number;
  real_profit: number;
  virtual_tax_total: number;
  virtual_profit: number;
}

export interface BladeDoc {
  utilization: number;
  mem_used_mb: number;
  net_used_mbps: number;
  power_kw: number;
  rates_g_per_h: RatesDoc;
  costs: CostsDoc;
}

export interface TotalsDoc extends CostsDoc {
  power_kw: number;
  rates_g_per_h: RatesDoc;
}

export interface PlacementDoc {
  vm_to_blade: Record<string, string>;
  blade_freq_ghz: Record<string, number>;
}

export interface StateSummaryDoc {
  tick_count: number;
  time: string;
  feasible: boolean;
  placement: PlacementDoc;
  totals: TotalsDoc;
}

export interface StateDoc {
  state: StateSummaryDoc;
  report: {
    blades: Record<string, BladeDoc>;
    totals: TotalsDoc;
    feasible: boolean;
  };
  pending_proposal: ProposalDoc | null;
}

export interface TradeoffPointDoc {
  u: number;
  f_ghz: number;
  real_profit: number;
  virtual_profit: number;
  rates_g_per_h: RatesDoc;
  is_current: boolean;
}

export interface TradeoffDoc {
  blade: string;
  points: TradeoffPointDoc[];
}

export interface TaxesDoc {
  default_per_kg: Record<string, number>;
  per_datacenter_per_kg: Record<string, Record<string, number>>;
}

export type PlanStepDoc =
  | { op: "migrate"; vm: string; from: string; to: string }
  | { op: "set_frequency"; blade: string; from_ghz: number; to_ghz: number };

export interface ProposalDoc {
  placement: PlacementDoc;
  plan: PlanStepDoc[];
  seed: number;
  generations: number;
  projected_totals: TotalsDoc;
  current_totals: TotalsDoc;
}

export interface HistoryEntryDoc {
  seq: number;
  ts: string;
  kind: "tick" | "optimize" | "apply" | "tax_update" | "mix_update";
  payload: Record<string, unknown>;
}

export interface ApiErrorBody {
  error: { code: string; message: string; field?: string };
}
