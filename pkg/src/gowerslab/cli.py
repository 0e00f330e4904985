"""Experiment runner: ``gowerslab <command> --config cfg.json --out DIR``.

Writes ``result.json`` (byte-deterministic for a given config and seed),
``meta.json`` (wall time, versions, thread count) and any TSV plot series.
Exit codes: 0 ok, 2 argument, 3 resource, 4 IO.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import platform
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, bessel, dualnorm, gowers, patterns, polyrank
from .errors import ArgumentError, GowersLabError, ResourceError
from .funcspace import FunctionTable, mobius_table
from .group import GroupSpec, SubgroupSpec
from .progression import CosetProgression

log = logging.getLogger("gowerslab")

COMMANDS = ("norm", "boxnorm", "dualnorm", "polycheck", "concat", "bessel", "pattern", "mobius", "profile")
ENV_PREFIX = "GOWERSLAB_"
EXIT_OK, EXIT_ARG, EXIT_RESOURCE, EXIT_IO = 0, 2, 3, 4


class IOFailure(GowersLabError):
    exit_code = EXIT_IO


# ---------------------------------------------------------------------------
# schema

_int = {"type": "integer"}
_pos = {"type": "integer", "minimum": 1}
_num = {"type": "number"}
_residues = {"type": "array", "items": _int}
_complex = {"oneOf": [_num, {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}]}

INPUT = {
    "type": "object",
    "oneOf": [
        {
            "properties": {
                "generator": {"enum": ["random_pm1", "random_complex", "random_phase"]},
                "seed": {"type": "integer", "minimum": 0},
            },
            "required": ["generator"],
            "additionalProperties": False,
        },
        {
            "properties": {"generator": {"const": "character"}, "xi": {"oneOf": [_int, _residues]}},
            "required": ["generator", "xi"],
            "additionalProperties": False,
        },
        {
            "properties": {"generator": {"const": "quadratic_phase"}, "a": _int},
            "required": ["generator"],
            "additionalProperties": False,
        },
        {
            "properties": {"generator": {"const": "mobius"}, "N": _pos, "square": {"type": "boolean"}},
            "required": ["generator"],
            "additionalProperties": False,
        },
        {
            "properties": {"generator": {"const": "constant"}, "value": _complex},
            "required": ["generator"],
            "additionalProperties": False,
        },
        {"properties": {"file": {"type": "string"}}, "required": ["file"], "additionalProperties": False},
        {
            "properties": {"values": {"type": "array", "items": _complex}},
            "required": ["values"],
            "additionalProperties": False,
        },
    ],
}

PROGRESSION = {
    "type": "object",
    "properties": {
        "subgroup_generators": {"type": "array", "items": _residues},
        "generators": {"type": "array", "items": _residues},
        "bounds": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "whole": {"type": "boolean"},
    },
    "additionalProperties": False,
}

METHOD = {"enum": ["exact", "monte_carlo", "auto"]}

_common = {
    "command": {"enum": list(COMMANDS)},
    "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
    "budget": {"type": "number", "exclusiveMinimum": 0},
    "samples": _pos,
    "method": METHOD,
    "description": {"type": "string"},
}


def _schema(props: dict, required: list) -> dict:
    return {
        "type": "object",
        "properties": {**_common, **props},
        "required": required,
        "additionalProperties": False,
    }


GROUP = {"type": "array", "items": _pos, "minItems": 1}

SCHEMAS = {
    "norm": _schema({"group": GROUP, "input": INPUT, "progression": PROGRESSION, "d": _pos}, ["group", "input", "d"]),
    "boxnorm": _schema(
        {"group": GROUP, "input": INPUT, "progressions": {"type": "array", "items": PROGRESSION, "minItems": 1}},
        ["group", "input", "progressions"],
    ),
    "dualnorm": _schema(
        {
            "group": GROUP,
            "input": INPUT,
            "progression": PROGRESSION,
            "d": _pos,
            "eps": {"type": "number", "exclusiveMinimum": 0},
            "strategy": {"enum": ["random", "characters", "ascent", "all"]},
            "candidates": _pos,
        },
        ["group", "input", "d", "eps"],
    ),
    "polycheck": _schema(
        {
            "group": GROUP,
            "modulus": {"oneOf": [_pos, {"type": "null"}]},
            "poly": {
                "type": "object",
                "oneOf": [
                    {
                        "properties": {"values": {"type": "array", "items": _num}},
                        "required": ["values"],
                        "additionalProperties": False,
                    },
                    {
                        "properties": {"monomial": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
                        "required": ["monomial"],
                        "additionalProperties": False,
                    },
                ],
            },
            "check": {"enum": ["degree", "rank"]},
            "subgroups": {"type": "array", "items": {"type": "array", "items": _residues}, "minItems": 1},
            "d": {"type": "integer", "minimum": 0},
            "mode": {"enum": ["difference", "recursive", "sampled"]},
        },
        ["group", "poly", "check", "subgroups"],
    ),
    "concat": _schema(
        {
            "kind": {"enum": ["polynomial", "rank", "monomial"]},
            "p": {"type": "integer", "minimum": 2},
            "d1": _pos,
            "d2": _pos,
            "trials": _pos,
            "mode": {"enum": ["difference", "recursive"]},
            "shear": {"type": "boolean"},
        },
        ["kind", "d1", "d2"],
    ),
    "bessel": _schema(
        {
            "group": GROUP,
            "input": INPUT,
            "progressions": {
                "type": "array",
                "items": {"oneOf": [PROGRESSION, {"type": "array", "items": PROGRESSION}]},
            },
            "random_family": {
                "type": "object",
                "properties": {"count": _pos, "length": _num, "seed": {"type": "integer", "minimum": 0}},
                "required": ["count", "length"],
                "additionalProperties": False,
            },
            "d": _pos,
            "eps_list": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
            "box": {"type": "boolean"},
        },
        ["group", "input", "d", "eps_list"],
    ),
    "pattern": _schema(
        {
            "group": {"type": "array", "items": _pos, "minItems": 1, "maxItems": 1},
            "input": INPUT,
            "inputs": {"type": "array", "items": INPUT, "minItems": 4, "maxItems": 4},
            "M": _pos,
            "chain": {
                "type": "object",
                "properties": {
                    "M": _pos,
                    "kappa": {"type": "number", "exclusiveMinimum": 0},
                    "d": _pos,
                    "n_list": {"type": "array", "items": _pos},
                },
                "required": ["kappa"],
                "additionalProperties": False,
            },
        },
        ["group", "M"],
    ),
    "mobius": _schema(
        {"N": _pos, "M": _pos, "embed_factor": {"type": "integer", "minimum": 2}, "square": {"type": "boolean"}},
        ["N"],
    ),
    "profile": _schema(
        {"N": _pos, "n": _int, "m": _int, "kappa": {"type": "number", "exclusiveMinimum": 0}},
        ["N", "n", "m", "kappa"],
    ),
}


def _pointer(path) -> str:
    return "/" + "/".join(str(p).replace("~", "~0").replace("/", "~1") for p in path)


def validate(config: dict) -> None:
    """Raise ArgumentError naming the JSON pointer of the first offending field."""
    if not isinstance(config, dict):
        raise ArgumentError("config must be a JSON object (at /)")
    cmd = config.get("command")
    if cmd not in SCHEMAS:
        raise ArgumentError(f"unknown or missing command {cmd!r} (at /command)")
    validator = jsonschema.Draft202012Validator(SCHEMAS[cmd])
    errors = sorted(
        validator.iter_errors(config), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path)))
    )
    if errors:
        err = errors[0]
        if err.validator == "required":
            missing = next((k for k in err.validator_value if k not in err.instance), "")
            path = list(err.absolute_path) + [missing]
        else:
            path = list(err.absolute_path)
        raise ArgumentError(f"invalid config at {_pointer(path)}: {err.message}")
    if cmd == "pattern" and ("input" in config) == ("inputs" in config):
        raise ArgumentError("invalid config at /inputs: give exactly one of input or inputs")
    if cmd == "bessel" and ("progressions" in config) == ("random_family" in config):
        raise ArgumentError("invalid config at /progressions: give exactly one of progressions or random_family")
    if _needs_seed(config) and "seed" not in config:
        raise ArgumentError("invalid config at /seed: a seed is required when any randomised method is enabled")


def _random_input(spec) -> bool:
    return isinstance(spec, dict) and spec.get("generator", "").startswith("random") and "seed" not in spec


def _needs_seed(config: dict) -> bool:
    cmd = config["command"]
    if config.get("method") in ("monte_carlo", "auto"):
        return True
    if cmd in ("dualnorm",) or (cmd == "concat" and config["kind"] != "monomial"):
        return True
    if cmd == "bessel" and ("samples" in config or "random_family" in config and "seed" not in config["random_family"]):
        return True
    if cmd == "polycheck" and config.get("mode") == "sampled":
        return True
    inputs = config.get("inputs", []) + ([config["input"]] if "input" in config else [])
    return any(_random_input(s) for s in inputs)


# ---------------------------------------------------------------------------
# config -> objects


def _complex_value(v):
    return complex(v[0], v[1]) if isinstance(v, list) else complex(v)


def build_input(spec: dict, group: GroupSpec, seed, base: Path, slot: int = 0) -> FunctionTable:
    if "file" in spec:
        path = Path(spec["file"])
        path = path if path.is_absolute() else base / path
        try:
            f = FunctionTable.load(path)
        except OSError as exc:
            raise IOFailure(f"cannot read input table {path}: {exc}") from exc
        if f.group != group:
            raise ArgumentError(f"input table {path} lives on {f.group.moduli}, config group is {group.moduli}")
        return f
    if "values" in spec:
        return FunctionTable(group, [_complex_value(v) for v in spec["values"]])
    gen = spec["generator"]
    if gen.startswith("random"):
        s = spec.get("seed")
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), 1000 + slot]) if s is None else s)
        return getattr(FunctionTable, gen)(group, rng)
    if gen == "character":
        return FunctionTable.character(group, spec["xi"])
    if gen == "constant":
        return FunctionTable.constant(group, _complex_value(spec.get("value", 1)))
    if gen == "quadratic_phase":
        if group.rank != 1:
            raise ArgumentError("quadratic_phase needs a cyclic group")
        return FunctionTable.quadratic_phase(group.order, spec.get("a", 1))
    if gen == "mobius":
        n = spec.get("N", group.order)
        if group.rank != 1 or group.order % n:
            raise ArgumentError("the mobius generator needs a cyclic group of order embed_factor * N")
        t = mobius_table(n, group.order // n)
        return t * t if spec.get("square") else t
    raise ArgumentError(f"unknown generator {gen!r}")


def build_progression(group: GroupSpec, spec: dict | None) -> CosetProgression:
    if not spec or spec.get("whole"):
        return CosetProgression.whole(group)
    return CosetProgression.from_config(group, spec)


# ---------------------------------------------------------------------------
# records


def series(columns: list, rows: list) -> dict:
    return {"columns": list(columns), "rows": [list(r) for r in rows]}


def emit_plot_data(record: dict, name: str, path) -> list[str]:
    """Write the named series of a run record as a TSV with a one-line header.

    Returns warnings (an empty series gives a header-only file and a warning).
    """
    all_series = record.get("results", {}).get("series", {})
    if name not in all_series:
        raise ArgumentError(f"no series named {name!r}; have {sorted(all_series)}")
    s = all_series[name]
    lines = ["\t".join(s["columns"])] + ["\t".join(_fmt(v) for v in row) for row in s["rows"]]
    _atomic_write(Path(path), ("\n".join(lines) + "\n").encode())
    if not s["rows"]:
        msg = f"series {name!r} is empty; wrote header only"
        log.warning(msg)
        return [msg]
    return []


def _fmt(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    try:
        tmp.write_bytes(data)
        os.replace(tmp, path)
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        raise IOFailure(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# commands


def _norm_method(cfg, f, qs, budget, threads):
    method = cfg.get("method", "exact")
    seed = cfg.get("seed")
    samples = cfg.get("samples", 20_000)
    if method == "exact":
        return gowers.box_norm_exact(f, qs, budget=budget, threads=threads)
    if method == "monte_carlo":
        return gowers.box_norm_mc(f, qs, samples=samples, seed=seed, threads=threads)
    return gowers.box_norm(f, qs, budget=budget, samples=samples, seed=seed, threads=threads)


def _cmd_norm(cfg, ctx):
    g = GroupSpec(cfg["group"])
    f = build_input(cfg["input"], g, cfg.get("seed", 0), ctx["base"])
    q = build_progression(g, cfg.get("progression"))
    r = _norm_method(cfg, f, [q] * cfg["d"], ctx["budget"], ctx["threads"])
    return {"norm": r.to_json()}


def _cmd_boxnorm(cfg, ctx):
    g = GroupSpec(cfg["group"])
    f = build_input(cfg["input"], g, cfg.get("seed", 0), ctx["base"])
    qs = [build_progression(g, p) for p in cfg["progressions"]]
    r = _norm_method(cfg, f, qs, ctx["budget"], ctx["threads"])
    return {"norm": r.to_json()}


def _cmd_dualnorm(cfg, ctx):
    g = GroupSpec(cfg["group"])
    f = build_input(cfg["input"], g, cfg["seed"], ctx["base"])
    q = build_progression(g, cfg.get("progression"))
    w = dualnorm.dual_norm_lower_bound(
        f, q, cfg["d"], cfg["eps"], cfg.get("strategy", "all"), cfg.get("candidates", 2000), cfg["seed"]
    )
    ctx["tables"]["witness.bin"] = w.g
    return {"dual_norm_lower_bound": w.to_json(), "feasible": w.feasible}


def _subgroup(g, gens):
    return SubgroupSpec(g, gens)


def _cmd_polycheck(cfg, ctx):
    g = GroupSpec(cfg["group"])
    modulus = cfg.get("modulus", 5)
    poly = cfg["poly"]
    if "values" in poly:
        vals = np.asarray(poly["values"])
        if modulus is not None:
            if not np.all(vals == np.round(vals)):
                raise ArgumentError("invalid config at /poly/values: cyclic codomains need integer values")
            vals = vals.astype(np.int64)
        P = polyrank.PolyFunction(g, vals, modulus)
    else:
        exps = poly["monomial"]
        if len(exps) != g.rank or modulus is None:
            raise ArgumentError("invalid config at /poly/monomial: one exponent per coordinate and an integer modulus")
        coords = g.coords(np.arange(g.order))
        vals = np.ones(g.order, dtype=np.int64)
        for j, e in enumerate(exps):
            vals = vals * np.array([pow(int(c), e, modulus) for c in coords[:, j]]) % modulus
        P = polyrank.PolyFunction(g, vals, modulus)
    hs = [_subgroup(g, gens) for gens in cfg["subgroups"]]
    mode = cfg.get("mode", "difference")
    kw = {"mode": mode, "samples": cfg.get("samples"), "seed": cfg.get("seed")}
    if ctx["budget_given"]:
        kw["budget"] = ctx["budget"]
    if cfg["check"] == "degree":
        if len(hs) != 1 or "d" not in cfg:
            raise ArgumentError("invalid config at /subgroups: a degree check takes one subgroup and d")
        cert = polyrank.degree_check(P, hs[0], cfg["d"], **kw)
    else:
        cert = polyrank.rank_check(P, hs, **kw)
    return {"certificate": cert.to_json(), "witness_verified": polyrank.verify_witness(P, cert)}


def _cmd_concat(cfg, ctx):
    p, d1, d2 = cfg.get("p", 5), cfg["d1"], cfg["d2"]
    if cfg["kind"] == "monomial":
        P, h1, h2 = polyrank.monomial(p, d1, d2)
        mode = cfg.get("mode", "difference")
        out = {
            "hypothesis_h1": polyrank.degree_check(P, h1, d1, mode).to_json(),
            "hypothesis_h2": polyrank.degree_check(P, h2, d2, mode).to_json(),
            "conclusion": polyrank.degree_check(P, h1 + h2, d1 + d2 - 1, mode).to_json(),
        }
        if d1 + d2 - 2 >= 0:
            sharp = polyrank.degree_check(P, h1 + h2, d1 + d2 - 2, mode)
            out["sharpness"] = sharp.to_json()
            out["sharpness_witness_verified"] = polyrank.verify_witness(P, sharp)
        return out
    trials = cfg.get("trials", 100)
    conf = {k: cfg[k] for k in ("kind", "p", "d1", "d2", "mode", "shear") if k in cfg}
    return {"report": polyrank.concat_property_test(conf, trials, cfg["seed"])}


def _cmd_bessel(cfg, ctx):
    g = GroupSpec(cfg["group"])
    seed = cfg.get("seed", 0)
    f = build_input(cfg["input"], g, seed, ctx["base"])
    box = cfg.get("box", False)
    if "random_family" in cfg:
        rf = cfg["random_family"]
        fam = bessel.random_rank1_family(g, rf["count"], rf["length"], rf.get("seed", seed))
        if box:
            fam = [[q] * cfg["d"] for q in fam]
    else:
        fam = []
        for item in cfg["progressions"]:
            if isinstance(item, list):
                fam.append([build_progression(g, p) for p in item])
            else:
                fam.append(build_progression(g, item))
    reps = bessel.bessel_scan(
        f,
        fam,
        cfg["d"],
        cfg["eps_list"],
        norm_budget=ctx["budget"],
        seed=seed,
        samples=cfg.get("samples"),
        box=box,
        threads=ctx["threads"],
    )
    rows = [[r.eps, r.lhs, r.rhs] for r in sorted(reps, key=lambda r: r.eps)]
    return {"reports": [r.to_json() for r in reps], "series": {"bessel": series(["eps", "lhs", "rhs"], rows)}}


def _pattern_method(cfg):
    return cfg.get("method", "exact")


def _cmd_pattern(cfg, ctx):
    g = GroupSpec(cfg["group"])
    seed = cfg.get("seed", 0)
    specs = cfg["inputs"] if "inputs" in cfg else [cfg["input"]] * 4
    fs = [build_input(s, g, seed, ctx["base"], slot=i) for i, s in enumerate(specs)]
    pa = patterns.pattern_average(
        *fs,
        cfg["M"],
        method=_pattern_method(cfg),
        samples=cfg.get("samples", 100_000),
        seed=cfg.get("seed"),
        budget=ctx["budget"] if ctx["budget_given"] else patterns.PATTERN_BUDGET,
        threads=ctx["threads"],
    )
    out = {"pattern_average": pa.to_json()}
    if "chain" in cfg:
        ch = cfg["chain"]
        chain = patterns.local_norm_chain(
            fs[0], ch.get("M", cfg["M"]), ch["kappa"], ch.get("n_list"), ch.get("d", 2), threads=ctx["threads"]
        )
        out["local_norm_chain"] = chain.to_json()
        out["series"] = {"chain": series(["n", "norm"], [[r["n"], r["value"]] for r in chain.rows])}
    return out


def _cmd_mobius(cfg, ctx):
    r = patterns.mobius_experiment(
        cfg["N"],
        cfg.get("M"),
        cfg.get("embed_factor", 5),
        samples=cfg.get("samples"),
        seed=cfg.get("seed"),
        method=_pattern_method(cfg),
        square=cfg.get("square", False),
        budget=ctx["budget"] if ctx["budget_given"] else patterns.PATTERN_BUDGET,
        threads=ctx["threads"],
    )
    return {"mobius": r.to_json()}


def _cmd_profile(cfg, ctx):
    prof = patterns.multiplicity_profile(cfg["N"], cfg["n"], cfg["m"], cfg["kappa"])
    rows = [
        [a, int(prof.nu.values[a].real), float(prof.nu2.values[a].real), float(prof.spectrum.coefficients[a].real)]
        for a in range(cfg["N"])
    ]
    return {"profile": prof.to_json(), "series": {"profile": series(["a", "nu", "nu2", "c_xi"], rows)}}


DISPATCH = {
    "norm": _cmd_norm,
    "boxnorm": _cmd_boxnorm,
    "dualnorm": _cmd_dualnorm,
    "polycheck": _cmd_polycheck,
    "concat": _cmd_concat,
    "bessel": _cmd_bessel,
    "pattern": _cmd_pattern,
    "mobius": _cmd_mobius,
    "profile": _cmd_profile,
}


def run(config: dict, threads: int = 1, base: Path | None = None) -> dict:
    """Validate and execute ``config``; return the run record (results and meta)."""
    validate(config)
    budget_given = "budget" in config
    ctx = {
        "threads": max(1, int(threads)),
        "budget": float(config.get("budget", gowers.DEFAULT_BUDGET)),
        "budget_given": budget_given,
        "base": base or Path.cwd(),
        "tables": {},
    }
    warnings: list[str] = []
    handler = _ListHandler(warnings)
    log.addHandler(handler)
    t0 = time.perf_counter()
    try:
        results = DISPATCH[config["command"]](config, ctx)
    finally:
        log.removeHandler(handler)
    wall = time.perf_counter() - t0
    for name, s in results.get("series", {}).items():
        if not s["rows"]:
            warnings.append(f"series {name!r} is empty")
    record = {
        "command": config["command"],
        "config": config,
        "seed": config.get("seed"),
        "results": results,
        "warnings": warnings,
    }
    meta = {
        "wall_time_s": wall,
        "threads": ctx["threads"],
        "versions": {"gowerslab": __version__, "numpy": np.__version__, "python": platform.python_version()},
        "finished_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    return {"record": record, "meta": meta, "tables": ctx["tables"]}


class _ListHandler(logging.Handler):
    def __init__(self, sink):
        super().__init__(logging.WARNING)
        self.sink = sink

    def emit(self, rec):
        self.sink.append(rec.getMessage())


def write_outputs(out: dict, out_dir: Path) -> list[Path]:
    record = out["record"]
    # serialise first so a bad record fails before any file is touched
    record_text, meta_text = dumps(record), dumps(out["meta"])
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IOFailure(f"cannot create output directory {out_dir}: {exc}") from exc
    written = []
    for name in sorted(record["results"].get("series", {})):
        path = out_dir / f"{name}.tsv"
        emit_plot_data(record, name, path)
        written.append(path)
    for name, table in sorted(out["tables"].items()):
        path = out_dir / name
        try:
            table.save(path)
        except OSError as exc:
            raise IOFailure(f"cannot write {path}: {exc}") from exc
        written.append(path)
    _atomic_write(out_dir / "meta.json", meta_text.encode())
    # result.json last, so its presence marks a complete run
    _atomic_write(out_dir / "result.json", record_text.encode())
    written += [out_dir / "meta.json", out_dir / "result.json"]
    return written


# ---------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gowerslab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--seed", type=int, help="overrides the config seed (u64)")
    p.add_argument("--threads", type=int, help="worker cap; results do not depend on it")
    p.add_argument("--budget", type=float, help="exact-evaluation budget (operations)")
    p.add_argument("--out", help="output directory (default: ./run-<command>)")
    return p


def _env(name):
    return os.environ.get(ENV_PREFIX + name)


def _overrides(args) -> dict:
    out = {}
    for key, conv in (("seed", int), ("threads", int), ("budget", float), ("out", str)):
        val = getattr(args, key)
        if val is None and _env(key.upper()) is not None:
            try:
                val = conv(_env(key.upper()))
            except ValueError as exc:
                raise ArgumentError(f"bad value for {ENV_PREFIX}{key.upper()}: {exc}") from exc
        if val is not None:
            out[key] = val
    return out


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s: %(message)s")
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ARG
    try:
        ov = _overrides(args)
        path = Path(args.config)
        try:
            text = path.read_text()
        except OSError as exc:
            raise IOFailure(f"cannot read config {path}: {exc}") from exc
        try:
            config = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ArgumentError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(config, dict):
            raise ArgumentError("config must be a JSON object (at /)")
        if config.setdefault("command", args.command) != args.command:
            raise ArgumentError(f"invalid config at /command: {config['command']!r} does not match {args.command!r}")
        if "seed" in ov:
            config["seed"] = ov["seed"]
        if "budget" in ov:
            config["budget"] = ov["budget"]
        out = run(config, threads=ov.get("threads", 1), base=path.resolve().parent)
        out_dir = Path(ov.get("out", f"run-{args.command}"))
        write_outputs(out, out_dir)
        for w in out["record"]["warnings"]:
            log.warning(w)
        print(out_dir / "result.json")
        return EXIT_OK
    except ResourceError as exc:
        msg = str(exc)
        if exc.cost is not None:
            msg += f" (estimated cost {exc.cost:.3g}, budget {exc.budget:.3g})"
        log.error(msg)
        return EXIT_RESOURCE
    except IOFailure as exc:
        log.error(str(exc))
        return EXIT_IO
    except GowersLabError as exc:
        log.error(str(exc))
        return EXIT_ARG
    except ValueError as exc:
        log.error(str(exc))
        return EXIT_ARG


if __name__ == "__main__":
    sys.exit(main())
