"""HTTP API through which the operator and the dashboard observe and
steer the manager.  All bodies are JSON documents."""
from __future__ import annotations

import threading

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse

from .economics import VirtualTaxSchedule
from .errors import NoDataError
from .evaluation import EvaluationReport, tradeoff_sweep
from .manager import Manager, report_totals
from .sustainability import INDICATORS
from .telemetry import format_timestamp

DEFAULT_U_GRID = [round(0.1 * i, 1) for i in range(11)]


def error_body(code: str, message: str, field: str | None = None) -> dict:
    body = {"error": {"code": code, "message": message}}
    if field is not None:
        body["error"]["field"] = field
    return body


def report_doc(report: EvaluationReport) -> dict:
    return {
        "blades": {
            blade_id: {
                "utilization": load.utilization,
                "mem_used_mb": load.mem_used,
                "net_used_mbps": load.net_used,
                "power_kw": load.power_kw,
                "rates_g_per_h": report.blade_rates[blade_id].as_dict(),
                "costs": {
                    "revenue": report.blade_costs[blade_id].revenue,
                    "energy_cost": report.blade_costs[blade_id].energy_cost,
                    "opex": report.blade_costs[blade_id].opex,
                    "corporate_tax": report.blade_costs[blade_id].corporate_tax,
                    "real_profit": report.blade_costs[blade_id].real_profit,
                    "virtual_tax_total": report.blade_costs[blade_id].virtual_tax_total,
                    "virtual_profit": report.blade_costs[blade_id].virtual_profit,
                },
            }
            for blade_id, load in report.blade_loads.items()
        },
        "totals": report_totals(report),
        "feasible": report.feasible,
    }


def validate_taxes_doc(doc: dict) -> tuple[VirtualTaxSchedule | None, dict | None]:
    """Parse a per-kg tax document; on failure returns a structured error
    naming the offending field path."""
    if not isinstance(doc, dict):
        return None, error_body("validation", "tax document must be an object")
    defaults = doc.get("default_per_kg") or {}
    per_dc = doc.get("per_datacenter_per_kg") or {}
    for ind, rate in defaults.items():
        if ind not in INDICATORS:
            return None, error_body(
                "validation", f"unknown indicator {ind!r}", f"default_per_kg.{ind}"
            )
        if not isinstance(rate, (int, float)) or rate < 0:
            return None, error_body(
                "validation", f"rate must be >= 0, got {rate}", f"default_per_kg.{ind}"
            )
    for dc, by_ind in per_dc.items():
        if not isinstance(by_ind, dict):
            return None, error_body(
                "validation", "expected indicator->rate map", f"per_datacenter_per_kg.{dc}"
            )
        for ind, rate in by_ind.items():
            path = f"per_datacenter_per_kg.{dc}.{ind}"
            if ind not in INDICATORS:
                return None, error_body("validation", f"unknown indicator {ind!r}", path)
            if not isinstance(rate, (int, float)) or rate < 0:
                return None, error_body("validation", f"rate must be >= 0, got {rate}", path)
    return (
        VirtualTaxSchedule.from_per_kg(
            defaults_per_kg=defaults, per_datacenter_per_kg=per_dc
        ),
        None,
    )


def build_app(manager: Manager) -> FastAPI:
    app = FastAPI(title="ecocloud manager", version="1")
    lock = threading.Lock()
    app.state.manager = manager

    @app.get("/state")
    def get_state():
        with lock:
            return {
                "state": manager.summary(),
                "report": report_doc(manager.latest_report),
                "pending_proposal": _proposal_doc(manager) if manager.pending else None,
            }

    @app.get("/tradeoff")
    def get_tradeoff(blade: str = Query(...)):
        with lock:
            try:
                spec = manager.topology.blade(blade)
            except Exception:
                return JSONResponse(
                    status_code=404, content=error_body("not_found", f"unknown blade {blade!r}")
                )
            load = manager.latest_report.blade_loads[blade]
            # Snap float-noise-close utilizations onto the grid so the live
            # state flags its grid point instead of appending a duplicate.
            u_live = load.utilization
            u_live = next((g for g in DEFAULT_U_GRID if abs(g - u_live) < 1e-9), u_live)
            current = (u_live, manager.placement.blade_freq[blade].ghz)
            points = tradeoff_sweep(spec, manager.instance(), DEFAULT_U_GRID, current=current)
        return {
            "blade": blade,
            "points": [
                {
                    "u": p.u,
                    "f_ghz": p.f_ghz,
                    "real_profit": p.real_profit,
                    "virtual_profit": p.virtual_profit,
                    "rates_g_per_h": p.rates.as_dict(),
                    "is_current": p.is_current,
                }
                for p in points
            ],
        }

    @app.get("/taxes")
    def get_taxes():
        with lock:
            return manager.taxes.to_per_kg()

    @app.put("/taxes")
    async def put_taxes(request: Request):
        doc = await request.json()
        taxes, err = validate_taxes_doc(doc)
        if err is not None:
            return JSONResponse(status_code=422, content=err)
        with lock:
            manager.set_taxes(taxes)
            return manager.taxes.to_per_kg()

    @app.post("/optimize")
    def post_optimize():
        with lock:
            manager.propose()
            return _proposal_doc(manager)

    @app.post("/apply")
    def post_apply():
        with lock:
            try:
                proposal = manager.apply_pending()
            except NoDataError:
                return JSONResponse(
                    status_code=404, content=error_body("no_proposal", "no pending proposal")
                )
            return {
                "applied": True,
                "plan": proposal.plan.to_dicts(),
                "state": manager.summary(),
            }

    @app.get("/history")
    def get_history(from_seq: int = Query(0, alias="from")):
        with lock:
            entries = manager.log.read(from_seq)
        return {
            "entries": [
                {
                    "seq": e.seq,
                    "ts": format_timestamp(e.timestamp),
                    "kind": e.kind,
                    "payload": e.payload,
                }
                for e in entries
            ]
        }

    @app.get("/mix")
    def get_mix():
        with lock:
            return {
                "time": format_timestamp(manager.clock),
                "regions": {r: s.shares for r, s in sorted(manager.mixes.items())},
            }

    @app.get("/pareto")
    def get_pareto():
        with lock:
            archive = manager.last_archive
            members = archive.members if archive is not None else []
            return {
                "members": [
                    {
                        "objective": {
                            "neg_real_profit": vec[0],
                            **dict(zip(INDICATORS, vec[1:])),
                        },
                        "placement": {
                            "vm_to_blade": dict(sorted(p.vm_to_blade.items())),
                            "blade_freq_ghz": {
                                b: lv.ghz for b, lv in sorted(p.blade_freq.items())
                            },
                        },
                    }
                    for vec, p in members
                ]
            }

    return app


def _proposal_doc(manager: Manager) -> dict:
    p = manager.pending
    if p is None:
        return {}
    return {
        "placement": {
            "vm_to_blade": dict(sorted(p.placement.vm_to_blade.items())),
            "blade_freq_ghz": {b: lv.ghz for b, lv in sorted(p.placement.blade_freq.items())},
        },
        "plan": p.plan.to_dicts(),
        "seed": p.seed,
        "generations": p.generations,
        "projected_totals": report_totals(p.report),
        "current_totals": report_totals(manager.latest_report),
    }


def serve_api(manager: Manager, host: str = "127.0.0.1", port: int = 8040):
    """Run the API with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(build_app(manager), host=host, port=port, log_level="warning")
