import {
  ApiErrorBody,
  HistoryEntryDoc,
  ProposalDoc,
  StateDoc,
  TaxesDoc,
  TradeoffDoc,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly field?: string,
  ) {
    super(message);
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let body: ApiErrorBody | null = null;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    // non-JSON error body; fall through to the generic error below
  }
  if (body && body.error) {
    throw new ApiError(response.status, body.error.code, body.error.message, body.error.field);
  }
  throw new ApiError(response.status, "http", `HTTP ${response.status}`);
}

/** Thin typed client over the manager endpoints.  Base URL is configurable
 *  so the dashboard can be served by the manager or any static host. */
export class ManagerApi {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  state(): Promise<StateDoc> {
    return fetch(this.url("/state")).then((r) => unwrap<StateDoc>(r));
  }

  tradeoff(blade: string): Promise<TradeoffDoc> {
    const q = new URLSearchParams({ blade });
    return fetch(this.url(`/tradeoff?${q}`)).then((r) => unwrap<TradeoffDoc>(r));
  }

  taxes(): Promise<TaxesDoc> {
    return fetch(this.url("/taxes")).then((r) => unwrap<TaxesDoc>(r));
  }

  putTaxes(doc: Partial<TaxesDoc>): Promise<TaxesDoc> {
    return fetch(this.url("/taxes"), {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(doc),
    }).then((r) => unwrap<TaxesDoc>(r));
  }

  optimize(): Promise<ProposalDoc> {
    return fetch(this.url("/optimize"), { method: "POST" }).then((r) => unwrap<ProposalDoc>(r));
  }

  apply(): Promise<{ applied: boolean }> {
    return fetch(this.url("/apply"), { method: "POST" }).then((r) =>
      unwrap<{ applied: boolean }>(r),
    );
  }

  history(fromSeq = 0): Promise<HistoryEntryDoc[]> {
    const q = new URLSearchParams({ from: String(fromSeq) });
    return fetch(this.url(`/history?${q}`))
      .then((r) => unwrap<{ entries: HistoryEntryDoc[] }>(r))
      .then((doc) => doc.entries);
  }

  mix(): Promise<{ time: string; regions: Record<string, Record<string, number>> }> {
    return fetch(this.url("/mix")).then((r) => unwrap(r));
  }
}
