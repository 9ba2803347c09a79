"""Command-line driver.

Usage::

    algevo COMMAND [key=value ...] [--key value ...] [--config FILE]
    algevo --manifest FILE.manifest.json [key=value ...]

Parameters come from a flat ``key=value`` config file, then from the
command line (later wins).  ``--manifest`` replays the run recorded in a
manifest; keys given alongside it (for example ``out`` or ``threads``)
override the recorded ones.  Every result file ``F`` is accompanied by
``F.manifest.json`` holding the resolved configuration, derived seeds and
the CTM table fingerprint.

Exit status: 0 success, 2 configuration error, 3 data error, 4 resource
limit.
"""
from __future__ import annotations

import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .complexity.bdm import bdm, resolve_block_size
from .complexity.ctm import CtmTable, build_ctm_table, default_table, default_table_path
from .evolve.config import STRATEGY_KINDS, EvolutionConfig, Strategy
from .evolve.engine import evolve_run
from .exceptions import DataFormatError, ResourceLimitError, UnsupportedBlockError
from .experiments import io as report
from .experiments.batch import (
    ExperimentSpec,
    default_threshold,
    random_targets,
    run_batch,
    speedup_curve,
)
from .experiments.chase import CHASE_MODES, chase_dynamic
from .experiments.evonet import build_evolutionary_network
from .experiments.stats import SummaryStats, speedup_quotient
from .graphs import DYNAMIC_KINDS, dynamic_sequence, edge_removal_sequence, named_target, parse_edge_list, random_matrix
from .matrix import from_text
from .rng import make_rng, mix_seed

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RESOURCE = 0, 2, 3, 4


class ConfigError(Exception):
    pass


# parameter types ---------------------------------------------------------------


def _int(lo=None):
    def conv(v):
        x = int(v)
        if lo is not None and x < lo:
            raise ValueError(f"must be >= {lo}")
        return x
    return conv


def _float(lo=None, hi=None):
    def conv(v):
        x = float(v)
        if math.isnan(x) or (lo is not None and x < lo) or (hi is not None and x > hi):
            raise ValueError(f"must lie in [{lo}, {hi}]")
        return x
    return conv


def _bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected true or false")


def _choice(*options):
    def conv(v):
        if v not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return v
    return conv


def _choices(*options):
    def conv(v):
        items = v if isinstance(v, list) else [x.strip() for x in str(v).split(",") if x.strip()]
        if not items:
            raise ValueError("empty list")
        for x in items:
            if x not in options:
                raise ValueError(f"{x!r} is not one of {', '.join(options)}")
        return list(items)
    return conv


def _optional(conv):
    def wrapped(v):
        return None if v is None or v == "" or v == "none" else conv(v)
    return wrapped


_str = str
REQUIRED = object()

EVOLVE_KEYS = {
    "shifts": (_int(1), 1),
    "replacement": (_bool, False),
    "threshold": (_optional(_int(1)), None),
    "alpha": (_float(0), 0.0),
    "epsilon": (_float(1e-300), 1e-10),
    "block_size": (_int(1), 4),
    "bdm_block_size": (_optional(_int(1)), None),
    "table": (_optional(_str), None),
    "seed": (_int(0), 0),
}
RUN_KEYS = {"threads": (_int(1), 1)}

COMMANDS = {
    "gen-ctm": {
        "states": (_int(1), 2),
        "cap": (_int(1), 100),
        "budget": (_int(1), 50_000_000),
        "out": (_str, REQUIRED),
        **RUN_KEYS,
    },
    "bdm": {
        "target": (_str, REQUIRED),
        "table": (_optional(_str), None),
        "bdm_block_size": (_optional(_int(1)), None),
        "out": (_optional(_str), None),
    },
    "evolve": {
        "target": (_str, REQUIRED),
        "initial": (_str, "random"),
        "density": (_float(0, 1), 0.5),
        "strategy": (_choice(*STRATEGY_KINDS), "uniform"),
        "out": (_str, REQUIRED),
        **EVOLVE_KEYS,
    },
    "batch": {
        "target": (_str, REQUIRED),
        "count": (_int(1), 1),
        "size": (_int(2), 8),
        "replicates": (_int(1), 10),
        "strategies": (_choices(*STRATEGY_KINDS), ["uniform", "bdm"]),
        "format": (_choice("csv", "json"), "csv"),
        "out": (_str, REQUIRED),
        **EVOLVE_KEYS,
        **RUN_KEYS,
    },
    "sequence": {
        "nodes": (_int(2), 8),
        "replicates": (_int(1), 10),
        "strategies": (_choices(*STRATEGY_KINDS), ["uniform", "bdm"]),
        "fit_degree": (_int(1), 3),
        "out": (_str, REQUIRED),
        **EVOLVE_KEYS,
        **RUN_KEYS,
    },
    "chase": {
        "kind": (_choice(*DYNAMIC_KINDS), "zk"),
        "nodes": (_int(2), 16),
        "replicates": (_int(1), 100),
        "strategies": (_choices(*STRATEGY_KINDS), ["uniform", "local_bdm", "bdm"]),
        "mode": (_choice(*CHASE_MODES), "evolve"),
        "out": (_str, REQUIRED),
        **EVOLVE_KEYS,
        **RUN_KEYS,
    },
    "evonet": {
        "target": (_str, REQUIRED),
        "replicates": (_int(1), 50),
        "strategy": (_choice(*STRATEGY_KINDS), "bdm"),
        "min_count": (_int(1), 2),
        "out": (_str, REQUIRED),
        "nodes_out": (_optional(_str), None),
        **EVOLVE_KEYS,
        **RUN_KEYS,
    },
    "analyze": {
        "input": (_str, REQUIRED),
        "baseline": (_choice(*STRATEGY_KINDS), "uniform"),
        "out": (_optional(_str), None),
    },
}


# argument handling ---------------------------------------------------------------


def parse_tokens(tokens) -> dict:
    """``key=value``, ``--key value`` and ``--key=value`` tokens to a dict."""
    out = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.startswith("--"):
            body = tok[2:]
            if "=" in body:
                key, value = body.split("=", 1)
            else:
                if i + 1 >= len(tokens):
                    raise ConfigError(f"{body}: missing value")
                key, value = body, tokens[i + 1]
                i += 1
        elif "=" in tok:
            key, value = tok.split("=", 1)
        else:
            raise ConfigError(f"unexpected argument {tok!r}; use key=value")
        key = key.strip().replace("-", "_")
        if not key:
            raise ConfigError(f"empty key in {tok!r}")
        out[key] = value.strip()
        i += 1
    return out


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def resolve_params(command: str, raw: dict) -> dict:
    """Validate and convert every parameter of ``command``; fill defaults."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    schema = COMMANDS[command]
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"unknown key(s) for {command}: {', '.join(unknown)}")
    out = {}
    for key, (conv, default) in schema.items():
        if key in raw:
            try:
                out[key] = conv(raw[key])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{key}={raw[key]!r}: {exc}") from None
        elif default is REQUIRED:
            raise ConfigError(f"missing required key {key!r}")
        else:
            out[key] = default
    return out


# inputs ---------------------------------------------------------------------------


def load_table(path: str | None) -> CtmTable:
    return default_table() if path is None else CtmTable.load(path)


def table_path(path: str | None) -> str:
    return default_table_path() if path is None else path


def load_target(name: str) -> np.ndarray:
    """Built-in target name, edge-list file or 0/1 matrix text file."""
    try:
        return named_target(name)
    except ValueError:
        pass
    p = Path(name)
    if not p.is_file():
        raise ConfigError(f"target {name!r} is neither a built-in name nor a file")
    text = p.read_text(encoding="utf-8")
    body = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if body and body[0].lstrip().startswith("nodes:"):
        return parse_edge_list(text)[0]
    try:
        return from_text(text)
    except ValueError as exc:
        raise DataFormatError(f"{name}: {exc}") from None


def evolution_config(p: dict, kind: str, size: int) -> EvolutionConfig:
    try:
        cfg = EvolutionConfig(
            shifts=p["shifts"],
            replacement=p["replacement"],
            extinction_threshold=p["threshold"] or default_threshold(size),
            alpha=p["alpha"],
            seed=p["seed"],
            strategy=Strategy(kind, p["epsilon"], p["block_size"], p["bdm_block_size"]),
        )
        cfg.check_size(size)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def _needs_table(kinds) -> bool:
    return any(Strategy(k).needs_table for k in kinds)


# commands ---------------------------------------------------------------------------


@dataclass
class Plan:
    """A validated command: ``run()`` returns ``{path: text}`` and stdout lines."""

    run: object
    outputs: list
    derived: dict
    table: CtmTable | None
    table_path: str | None


def _check_outputs(paths):
    for p in paths:
        parent = Path(p).resolve().parent
        if not parent.is_dir():
            raise ConfigError(f"output directory {parent} does not exist")


def plan_gen_ctm(p):
    from .complexity.turing import machine_count
    if machine_count(p["states"]) > p["budget"]:
        raise ResourceLimitError(
            f"{machine_count(p['states'])} machines for {p['states']} states exceed budget={p['budget']}")

    def run():
        t = build_ctm_table(p["states"], p["cap"], budget=p["budget"], threads=p["threads"])
        return {p["out"]: t.dumps()}, [
            f"states={t.states} cap={t.cap} total={t.total} halting={t.halting} entries={len(t)}",
            f"fingerprint={t.fingerprint}",
        ]
    return Plan(run, [p["out"]], {}, None, None)


def plan_bdm(p):
    m = load_target(p["target"])
    table = load_table(p["table"])
    b = resolve_block_size(table, p["bdm_block_size"])

    def run():
        v = bdm(m, table, b)
        outs = {}
        if p["out"]:
            outs[p["out"]] = json.dumps({"target": p["target"], "block_size": b, "bdm": v}, indent=1) + "\n"
        return outs, [report.fmt(v)]
    return Plan(run, [p["out"]] if p["out"] else [], {"block_size": b}, table, table_path(p["table"]))


def plan_evolve(p):
    target = load_target(p["target"])
    n = target.shape[0]
    cfg = evolution_config(p, p["strategy"], n)
    table = load_table(p["table"]) if cfg.strategy.needs_table else None
    if p["initial"] == "random":
        m0 = random_matrix(make_rng(p["seed"], 1), n, p["density"])
    else:
        m0 = load_target(p["initial"])
        if m0.shape != target.shape:
            raise ConfigError(f"initial is {m0.shape[0]}x{m0.shape[0]}, target is {n}x{n}")

    def run():
        tr = evolve_run(m0, target, cfg, table)
        return {p["out"]: tr.to_json()}, [f"{tr.terminal} after {tr.total_steps} steps ({len(tr.instances)} instances)"]
    derived = {"evolution_seed": cfg.seed, "initial_stream": [p["seed"], 1],
               "extinction_threshold": cfg.extinction_threshold}
    return Plan(run, [p["out"]], derived, table, table_path(p["table"]) if table else None)


def _targets(p):
    if p["target"] == "random":
        ts = random_targets(p["seed"], p["count"], p["size"])
        return ts, [f"random{j}" for j in range(len(ts))]
    names = [x.strip() for x in p["target"].split(",") if x.strip()]
    if not names:
        raise ConfigError("target: empty list")
    return [load_target(x) for x in names], names


def _seeds(master, n_targets, replicates, n_configs):
    return [[[mix_seed(master, j, i, c) for c in range(n_configs)] for i in range(replicates)]
            for j in range(n_targets)]


def plan_batch(p):
    targets, ids = _targets(p)
    n = targets[0].shape[0]
    if any(t.shape != (n, n) for t in targets):
        raise ConfigError("all targets must have the same size")
    configs = [evolution_config(p, k, n) for k in p["strategies"]]
    table = load_table(p["table"]) if _needs_table(p["strategies"]) else None
    spec = ExperimentSpec(targets, p["replicates"], configs, p["seed"])

    def run():
        res = run_batch(spec, table, threads=p["threads"])
        recs = report.result_records(res, table, ids)
        text = report.results_csv(recs) if p["format"] == "csv" else report.results_json(recs)
        lines = [f"{r['target_id']} {r['strategy']}: mean={report.fmt(r['mean_steps'])} "
                 f"se={report.fmt(r['se_steps'])} extinct={r['n_extinct']}" for r in recs]
        return {p["out"]: text}, lines
    derived = {"seeds[target][replicate][config]": _seeds(p["seed"], len(targets), p["replicates"], len(configs)),
               "extinction_threshold": configs[0].extinction_threshold}
    return Plan(run, [p["out"]], derived, table, table_path(p["table"]) if table else None)


def plan_sequence(p):
    if len(p["strategies"]) < 2:
        raise ConfigError("strategies: need a baseline and at least one compared strategy")
    seq = edge_removal_sequence(p["nodes"])
    configs = [evolution_config(p, k, p["nodes"]) for k in p["strategies"]]
    table = load_table(p["table"])

    def run():
        curve = speedup_curve(seq, p["replicates"], configs, table, master_seed=p["seed"],
                              threads=p["threads"], fit_degree=p["fit_degree"])
        lines = []
        for kind, (rho, pv) in curve.spearman.items():
            lines.append(f"{kind}: spearman(bdm, delta) rho={report.fmt(rho)} p={report.fmt(pv)}")
        for kind, coef in curve.fits.items():
            lines.append(f"{kind}: fit coefficients " + " ".join(report.fmt(c) for c in coef))
        return {p["out"]: report.curves_csv(report.curve_records_speedup(curve))}, lines
    derived = {"seeds[target][replicate][config]": _seeds(p["seed"], len(seq), p["replicates"], len(configs)),
               "extinction_threshold": configs[0].extinction_threshold}
    return Plan(run, [p["out"]], derived, table, table_path(p["table"]))


def plan_chase(p):
    try:
        seq = dynamic_sequence(p["kind"], p["nodes"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if len(seq) < 2:
        raise ConfigError(f"{p['kind']} on {p['nodes']} nodes has fewer than two stages")
    configs = [evolution_config(p, k, p["nodes"]) for k in p["strategies"]]
    table = load_table(p["table"]) if _needs_table(p["strategies"]) else None

    def run():
        res = chase_dynamic(seq, p["replicates"], configs, table, master_seed=p["seed"],
                            mode=p["mode"], threads=p["threads"])
        lines = [f"{k}: final cumulative mean {report.fmt(res.final(c))} "
                 f"({int(res.survivors(c)[-1])}/{p['replicates']} replicates)"
                 for c, k in enumerate(res.strategies)]
        return {p["out"]: report.curves_csv(report.curve_records_chase(res))}, lines
    derived = {"stages": len(seq), "seed_scheme": "mix_seed(seed, stage, replicate, config)",
               "extinction_threshold": configs[0].extinction_threshold}
    return Plan(run, [p["out"]], derived, table, table_path(p["table"]) if table else None)


def plan_evonet(p):
    target = load_target(p["target"])
    n = target.shape[0]
    cfg = evolution_config(p, p["strategy"], n)
    table = load_table(p["table"])
    nodes_out = p["nodes_out"] or str(Path(p["out"]).with_suffix("")) + ".nodes.csv"
    spec = ExperimentSpec([target], p["replicates"], [cfg], p["seed"])

    def run():
        res = run_batch(spec, table, threads=p["threads"], keep_traces=True)
        net = build_evolutionary_network(res.traces[0, 0], p["min_count"])
        lines = [f"nodes={len(net.nodes)} edges={len(net.counts)} transitions={net.total_transitions} "
                 f"max_weight={net.max_weight()}"]
        for f in net.forward_mutations()[:5]:
            ch = " ".join(f"({r},{c})->{v}" for r, c, v in f.changes)
            lines.append(f"forward {ch}: {report.fmt(f.probability)}")
        return {p["out"]: report.evonet_edges_csv(net), nodes_out: report.evonet_nodes_csv(net, table)}, lines
    derived = {"seeds[target][replicate][config]": _seeds(p["seed"], 1, p["replicates"], 1),
               "nodes_out": nodes_out, "extinction_threshold": cfg.extinction_threshold}
    return Plan(run, [p["out"], nodes_out], derived, table, table_path(p["table"]))


def plan_analyze(p):
    path = Path(p["input"])
    if not path.is_file():
        raise ConfigError(f"input {p['input']!r} does not exist")
    text = path.read_text(encoding="utf-8")
    try:
        recs = report.read_results_json(text) if text.lstrip().startswith("[") else report.read_results_csv(text)
    except (ValueError, KeyError) as exc:
        raise DataFormatError(f"{p['input']}: {exc}") from None

    def run():
        rows, lines = [], []
        groups = {}
        for r in recs:
            groups.setdefault((r["target_id"], r["shifts"], r["replacement"]), {})[r["strategy"]] = r
        for (tid, _, _), arms in groups.items():
            base = arms.get(p["baseline"])
            if base is None:
                continue
            su = SummaryStats(base["n_converged"], base["n_extinct"], base["mean_steps"], base["se_steps"])
            for kind, r in arms.items():
                if kind == p["baseline"]:
                    continue
                sf = SummaryStats(r["n_converged"], r["n_extinct"], r["mean_steps"], r["se_steps"])
                try:
                    d = speedup_quotient(su, sf)
                except ValueError:
                    d = math.nan
                rows.append((tid, kind, "delta", d))
                lines.append(f"{tid} {kind}: delta={report.fmt(d)} "
                             f"extinction_diff={su.n_extinct - sf.n_extinct}")
        outs = {p["out"]: report.curves_csv(rows)} if p["out"] else {}
        return outs, lines
    return Plan(run, [p["out"]] if p["out"] else [], {}, None, None)


PLANNERS = {
    "gen-ctm": plan_gen_ctm,
    "bdm": plan_bdm,
    "evolve": plan_evolve,
    "batch": plan_batch,
    "sequence": plan_sequence,
    "chase": plan_chase,
    "evonet": plan_evonet,
    "analyze": plan_analyze,
}


# driver -----------------------------------------------------------------------------


def manifest_for(command, params, plan) -> dict:
    table = None
    if plan.table is not None:
        table = {"path": plan.table_path, "fingerprint": plan.table.fingerprint, **plan.table.meta}
    return {
        "command": command,
        "config": params,
        "derived": plan.derived,
        "table": table,
        "version": __version__,
        "outputs": list(plan.outputs),
    }


def _write_all(files: dict):
    written = []
    try:
        for path, text in files.items():
            tmp = f"{path}.tmp{os.getpid()}"
            written.append(tmp)
            with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
            written[-1] = path
    except BaseException:
        for p in written:
            try:
                os.remove(p)
            except OSError:
                pass
        raise


def execute(command: str | None, raw: dict, manifest: dict | None = None) -> tuple[int, list]:
    """Run a command; returns the exit status and the stdout lines."""
    if manifest is not None:
        if command is not None and command != manifest.get("command"):
            raise ConfigError(f"command {command!r} does not match the manifest ({manifest.get('command')!r})")
        command = manifest.get("command")
        recorded = {k: v for k, v in manifest.get("config", {}).items() if v is not None}
        raw = {**recorded, **raw}
    if command is None:
        raise ConfigError("no command given")
    params = resolve_params(command, raw)
    plan = PLANNERS[command](params)
    if manifest is not None and manifest.get("table") and plan.table is not None:
        if plan.table.fingerprint != manifest["table"]["fingerprint"]:
            raise DataFormatError("CTM table fingerprint differs from the manifest")
    _check_outputs(plan.outputs)
    files, lines = plan.run()
    man = json.dumps(manifest_for(command, params, plan), indent=1, sort_keys=True) + "\n"
    for out in list(files):
        files[out + ".manifest.json"] = man
    _write_all(files)
    return EXIT_OK, lines


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(__doc__.strip())
        print("\ncommands: " + ", ".join(COMMANDS))
        return EXIT_OK if argv else EXIT_CONFIG
    if argv[0] == "--version":
        print(__version__)
        return EXIT_OK
    try:
        command = None if argv[0].startswith("-") else argv.pop(0)
        if command in ("-h", "--help"):
            return main([])
        if command is not None and len(argv) and argv[0] in ("-h", "--help"):
            schema = COMMANDS.get(command)
            if schema is None:
                raise ConfigError(f"unknown command {command!r}")
            for key, (_, default) in schema.items():
                shown = "(required)" if default is REQUIRED else f"default {default!r}"
                print(f"  {key:16s} {shown}")
            return EXIT_OK
        config_file = manifest_file = None
        rest = []
        i = 0
        while i < len(argv):
            if argv[i] in ("--config", "--manifest"):
                if i + 1 >= len(argv):
                    raise ConfigError(f"{argv[i]} needs a file")
                if argv[i] == "--config":
                    config_file = argv[i + 1]
                else:
                    manifest_file = argv[i + 1]
                i += 2
            else:
                rest.append(argv[i])
                i += 1
        raw = {}
        if config_file:
            try:
                raw.update(parse_config_text(Path(config_file).read_text(encoding="utf-8")))
            except OSError as exc:
                raise ConfigError(f"cannot read config file: {exc}") from None
        raw.update(parse_tokens(rest))
        manifest = None
        if manifest_file:
            try:
                manifest = json.loads(Path(manifest_file).read_text(encoding="utf-8"))
            except (OSError, ValueError) as exc:
                raise ConfigError(f"cannot read manifest: {exc}") from None
        status, lines = execute(command, raw, manifest)
        for ln in lines:
            print(ln)
        return status
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DataFormatError, UnsupportedBlockError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
