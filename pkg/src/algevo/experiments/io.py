"""CSV and JSON reports of experiment results.

Floats are written with ``%.17g`` (round-trip exact); undefined values
are written as the literal ``NaN``.
"""
from __future__ import annotations

import csv
import io
import json
import math

from ..complexity.bdm import bdm

RESULTS_HEADER = ("target_id", "target_bdm", "strategy", "shifts", "replacement", "replicates",
                  "n_converged", "n_extinct", "mean_steps", "se_steps")
CURVES_HEADER = ("stage_or_target", "strategy", "cumulative_or_delta", "value")
EDGES_HEADER = ("from_hash", "to_hash", "count")
NODES_HEADER = ("hash", "fitness", "bdm")


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in r])
    return buf.getvalue()


def result_records(res, table=None, target_ids=None) -> list[dict]:
    """One record per (target, config) cell of a batch, in target then config order."""
    spec = res.spec
    ids = target_ids or [str(j) for j in range(len(spec.targets))]
    out = []
    for j, t in enumerate(spec.targets):
        tb = bdm(t, table) if table is not None else math.nan
        for c, cfg in enumerate(spec.configs):
            s = res.stats[j, c]
            out.append({
                "target_id": ids[j],
                "target_bdm": tb,
                "strategy": cfg.strategy.kind,
                "shifts": cfg.shifts,
                "replacement": cfg.replacement,
                "replicates": s.replicates,
                "n_converged": s.n_converged,
                "n_extinct": s.n_extinct,
                "mean_steps": s.mean_steps,
                "se_steps": s.se_steps,
            })
    return out


def results_csv(records) -> str:
    return _csv(RESULTS_HEADER, ([r[k] for k in RESULTS_HEADER] for r in records))


def results_json(records) -> str:
    # json writes NaN as the bare literal NaN and reads it back as float nan
    return json.dumps(list(records), indent=1) + "\n"


def _parse_value(key, v):
    if key in ("target_id", "strategy"):
        return v
    if key == "replacement":
        if v not in ("true", "false"):
            raise ValueError(f"bad boolean {v!r}")
        return v == "true"
    if key in ("shifts", "replicates", "n_converged", "n_extinct"):
        return int(v)
    return float(v)


def read_results_csv(text: str) -> list[dict]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != RESULTS_HEADER:
        raise ValueError("not a results CSV")
    return [{k: _parse_value(k, v) for k, v in zip(RESULTS_HEADER, r)} for r in rows[1:]]


def read_results_json(text: str) -> list[dict]:
    recs = json.loads(text)
    for r in recs:
        if set(r) != set(RESULTS_HEADER):
            raise ValueError("not a results JSON record")
    return recs


def curve_records_speedup(curve) -> list[tuple]:
    return [(r.target_index, r.strategy, "delta", r.delta) for r in curve.rows]


def curve_records_chase(chase) -> list[tuple]:
    out = []
    for c, kind in enumerate(chase.strategies):
        for s, v in zip(chase.stages, chase.cumulative(c)):
            out.append((s, kind, "cumulative", float(v)))
    return out


def curves_csv(records) -> str:
    return _csv(CURVES_HEADER, records)


def evonet_edges_csv(net, min_count: int | None = None) -> str:
    return _csv(EDGES_HEADER, net.edges(min_count))


def evonet_nodes_csv(net, table=None) -> str:
    return _csv(NODES_HEADER, net.node_table(table))
