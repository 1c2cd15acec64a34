"""Batch solving and aggregate metrics."""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path
from typing import Iterable, Optional

from .bnp import BnpConfig, solve_bnp
from .instance import ValidationError, read_instance, verify_partition

CSV_HEADER = ["instance", "case", "alpha", "seed", "t", "dual_gap", "closed_primal",
              "nodes", "solved", "improved", "columns", "exact_pct", "pricing_gap",
              "pricing_time_pct"]
METRICS = ["t", "dual_gap", "closed_primal", "nodes", "columns", "exact_pct",
           "pricing_gap", "pricing_time_pct"]
AGG_HEADER = ["case", "alpha", "count"] + METRICS + ["solved", "improved"]
SHIFTS = {"t": 1.0, "dual_gap": 1.0, "closed_primal": 1.0, "nodes": 1.0,
          "columns": 1.0, "exact_pct": 1.0, "pricing_gap": 1.0, "pricing_time_pct": 1.0}
SOLVED_TOL = 1e-6


def shifted_geometric_mean(values: Iterable[float], shift: float = 1.0) -> float:
    """(prod (v + s))^(1/N) - s, evaluated through logarithms."""
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("shifted geometric mean of an empty sequence")
    if shift < 0 or any(v < 0 for v in vals):
        raise ValueError("values and shift must be nonnegative")
    if len(vals) == 1:
        return vals[0]
    if any(v + shift == 0 for v in vals):
        return -shift
    logs = math.fsum(math.log(v + shift) for v in vals)
    return math.exp(logs / len(vals)) - shift


def dual_gap(primal: float, dual: float) -> float:
    """Relative dual gap in percent; 100 when no dual bound is known."""
    if dual <= 0:
        return 100.0
    return (primal - dual) / primal * 100.0


def closed_primal(v_approx: float, v_best: float, best_dual: float) -> float:
    return (v_approx - v_best) / max(v_best - best_dual, 1e-6) * 100.0


def _meta(inst, path: Path) -> tuple[str, float, int]:
    m = inst.meta or {}
    return (str(m.get("case", "")), float(m.get("alpha", math.nan)),
            int(m.get("seed", -1)))


def solve_one(path: str, config: BnpConfig) -> dict:
    """Solve one instance file and return a CSV row (plus verification info)."""
    p = Path(path)
    row = {"instance": p.stem}
    try:
        inst = read_instance(p)
        row["case"], row["alpha"], row["seed"] = _meta(inst, p)
        rep, bins = solve_bnp(inst, config)
        verify_partition(inst, bins)
        if rep.dual_bound > rep.objective:
            raise ValidationError("dual bound exceeds the objective")
        row.update(
            t=rep.time,
            dual_gap=dual_gap(rep.objective, rep.dual_bound),
            closed_primal=closed_primal(rep.warm_start, rep.objective, rep.dual_bound),
            nodes=rep.nodes,
            solved=int(rep.gap <= SOLVED_TOL),
            improved=int(rep.objective < rep.warm_start),
            columns=rep.columns,
            exact_pct=rep.exact_pct,
            pricing_gap=rep.pricing_gap,
            pricing_time_pct=rep.pricing_time_pct,
        )
        row["_error"] = ""
        row["_report"] = rep.to_dict()
        row["_bins"] = [list(b) for b in bins]
    except Exception as exc:  # recorded per instance, never fatal for the batch
        row.setdefault("case", "")
        row.setdefault("alpha", math.nan)
        row.setdefault("seed", -1)
        row.update({k: math.nan for k in METRICS})
        row.update(solved=0, improved=0, _error=f"{type(exc).__name__}: {exc}")
    return row


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_rows(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([_fmt(r[k]) for k in CSV_HEADER])


def read_rows(path) -> list[dict]:
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        if rd.fieldnames != CSV_HEADER:
            raise ValidationError(f"unexpected CSV header {rd.fieldnames}")
        out = []
        for r in rd:
            d = {"instance": r["instance"], "case": r["case"], "alpha": float(r["alpha"]),
                 "seed": int(r["seed"]), "solved": int(r["solved"]),
                 "improved": int(r["improved"])}
            for k in METRICS:
                d[k] = float(r[k])
            out.append(d)
        return out


def aggregate(rows: list[dict]) -> list[dict]:
    """SGM of every metric per (case, alpha) group and over all rows; failed
    rows (NaN metrics) are excluded from the means but counted."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        groups.setdefault((r["case"], r["alpha"]), []).append(r)
    keys = sorted(groups, key=lambda k: (k[0], k[1]))
    out = []
    for key in keys + [("all", math.nan)]:
        rs = rows if key[0] == "all" else groups[key]
        agg = {"case": key[0], "alpha": key[1], "count": len(rs)}
        for k in METRICS:
            vals = [r[k] for r in rs if not math.isnan(r[k])]
            agg[k] = shifted_geometric_mean(vals, SHIFTS[k]) if vals else math.nan
        agg["solved"] = sum(r["solved"] for r in rs)
        agg["improved"] = sum(r["improved"] for r in rs)
        out.append(agg)
    return out


def write_aggregate(agg: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(AGG_HEADER)
        for r in agg:
            w.writerow([_fmt(r[k]) for k in AGG_HEADER])


def aggregate_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + "_aggregate.csv")


def run_benchmark(directory, config: BnpConfig, jobs: int = 1, csv_path=None,
                  files: Optional[list] = None) -> list[dict]:
    """Solve every ``*.json`` instance under ``directory``; rows are ordered by
    instance name.  With ``csv_path`` the per-instance CSV, the aggregate CSV
    (recomputed from the written file) and a JSON sidecar with reports,
    bins and errors are written."""
    paths = sorted(str(p) for p in (files or Path(directory).glob("*.json")))
    t0 = time.perf_counter()
    if jobs <= 1:
        rows = [solve_one(p, config) for p in paths]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(solve_one, paths, [config] * len(paths)))
    rows.sort(key=lambda r: r["instance"])
    if csv_path is not None:
        write_rows(rows, csv_path)
        write_aggregate(aggregate(read_rows(csv_path)), aggregate_path(csv_path))
        side = {
            "config": asdict(config),
            "clock": "wall-clock seconds (time.perf_counter)",
            "jobs": jobs,
            "elapsed": time.perf_counter() - t0,
            "instances": {r["instance"]: {"error": r.get("_error", ""),
                                          "report": r.get("_report"),
                                          "bins": r.get("_bins")} for r in rows},
        }
        Path(csv_path).with_suffix(".json").write_text(json.dumps(side, indent=1) + "\n")
    return rows
