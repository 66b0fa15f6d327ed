"""Config-driven experiment execution.

A run config is one JSON object holding global settings and a list of
experiment objects. Each experiment runs independently (possibly in a worker
process) and returns plain, picklable rows; the parent writes all artifacts.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any

import jsonschema
import mpmath
import numpy as np

from . import volume as V
from .errors import CapExceeded, ConfigError, OkvError
from .exact import DEFAULT_CAP, Lattice, convex_hull, det
from .flags import Flag, good_flag_pn
from .jsonio import atomic_write, canonical_json, content_hash, decode_rat, fmt_log
from .selftest import run_selftest
from .series import (DEFAULT_SERIES_CAP, VARIANTS, MetricModel, SubvarietyY, assignment_inclusions,
                     product_property, restricted_series)

log = logging.getLogger(__name__)

EXPERIMENT_TYPES = ("count", "vol", "okounkov", "gap", "sandwich", "fujita", "restricted", "superadd", "lambda",
                    "selftest")
RANDOMIZED = ("selftest", "lambda", "restricted")

CSV_SCHEMAS = {
    "volumes": ("experiment_id", "model_hash", "Y", "variant", "m", "count", "normalized", "limit_est"),
    "gaps": ("model_hash", "p", "m", "nu_count", "log_count", "gap", "rhs_sigma", "sigma", "pass", "tol"),
    "fujita": ("n", "k", "V_size", "CL_size", "normalized", "contain_ok", "nu_superset_ok"),
    "series": ("experiment_id", "model_hash", "Y", "variant", "m", "count", "count_upper", "method"),
}
CSV_KEYS = {
    "volumes": ("experiment_id", "Y", "variant", "m"),
    "gaps": ("model_hash", "p", "m"),
    "fujita": ("n", "k"),
    "series": ("experiment_id", "Y", "variant", "m"),
}

_RAT = {"anyOf": [{"type": "integer", "minimum": 1},
                  {"type": "string", "pattern": r"^\s*0*[1-9][0-9]*(\s*/\s*0*[1-9][0-9]*)?\s*$"},
                  {"type": "string", "pattern": r"^\s*[0-9]*\.[0-9]+\s*$"}]}
_SRAT = {"anyOf": [{"type": "integer"},
                   {"type": "string", "pattern": r"^\s*-?[0-9]+(\s*/\s*0*[1-9][0-9]*)?\s*$"}]}
_MLIST = {"anyOf": [{"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
                    {"type": "object", "required": ["from", "to"], "additionalProperties": False,
                     "properties": {"from": {"type": "integer", "minimum": 0},
                                    "to": {"type": "integer", "minimum": 0},
                                    "step": {"type": "integer", "minimum": 1}}}]}
_MODEL = {"type": "object", "required": ["n", "q"], "additionalProperties": False,
          "properties": {"n": {"type": "integer", "minimum": 0, "maximum": 6},
                         "kind": {"enum": ["L1_TWIST", "SUP_NUMERIC"]},
                         "q": _RAT, "degree": {"type": "integer", "minimum": 1},
                         "precision_bits": {"type": "integer", "minimum": 53}}}
_FLAG = {"type": "object", "required": ["p", "point", "chain"], "additionalProperties": False,
         "properties": {"p": {"type": "integer", "minimum": 2},
                        "point": {"type": "array", "items": {"type": "integer"}},
                        "chain": {"type": "array", "items": {"type": "integer"}}}}
_Y = {"type": "object", "additionalProperties": False,
      "properties": {"killed": {"type": "array", "items": {"type": "integer", "minimum": 0}}}}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["experiments"],
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer"},
        "precision_bits": {"type": "integer", "minimum": 53},
        "caps": {"type": "object", "additionalProperties": False,
                 "properties": {"series": {"type": "integer", "minimum": 1},
                                "enum": {"type": "integer", "minimum": 1}}},
        "experiments": {"type": "array", "minItems": 1, "items": {
            "type": "object", "required": ["type"], "additionalProperties": False,
            "properties": {
                "id": {"type": "string", "minLength": 1},
                "type": {"enum": list(EXPERIMENT_TYPES)},
                "model": _MODEL, "model_b": _MODEL, "flag": _FLAG,
                "flags": {"type": "array", "items": _FLAG, "minItems": 1},
                "Y": _Y, "variant": {"enum": list(VARIANTS)},
                "m_list": _MLIST, "m_max": {"type": "integer", "minimum": 1},
                "sigma": {"type": "string"}, "method": {"enum": ["richardson2", "last"]},
                "n_level": {"type": "integer", "minimum": 1}, "k_max": {"type": "integer", "minimum": 1},
                "instances": {"type": "integer", "minimum": 1},
                "max_rank": {"type": "integer", "minimum": 1, "maximum": 4},
                "structure_m": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                "samples": {"type": "integer", "minimum": 0},
                "lattice": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                "ball": {"type": "array", "items": {"type": "array", "items": _SRAT}},
            }}},
    },
}

REQUIRED = {
    "count": ("model", "m_list"), "vol": ("model", "m_list"), "restricted": ("model", "Y", "m_list"),
    "okounkov": ("model", "flag", "m_max"), "gap": ("model", "m_list"), "sandwich": ("model", "flag", "m_list"),
    "fujita": ("model", "n_level", "k_max"), "superadd": ("model", "model_b", "m_list"), "lambda": (),
    "selftest": (),
}

# assertion anchors named in failure reports
ANCHORS = {
    "okounkov": "valuation-body: graded nu counts bounded by F_p dimension",
    "sandwich": "valuation-count sandwich",
    "fujita": "k-fold convex lattice hull containment",
    "superadd": "Brunn-Minkowski superadditivity",
    "lambda": "successive-minima inequality lambda' <= lambda <= rank lambda'",
    "selftest": "exact identities self-test",
    "restricted": "assignment inclusions CL ⊆ QUOT ⊆ SUB and product property",
    "gap": "closed-form valuation image validated against enumeration",
}


# config handling ---------------------------------------------------------------------

def _parse_rat(x) -> Fraction:
    return Fraction(x) if isinstance(x, int) else decode_rat(str(x).replace(" ", ""))


def m_values(m_spec) -> list[int]:
    if isinstance(m_spec, list):
        return [int(m) for m in m_spec]
    return list(range(m_spec["from"], m_spec["to"] + 1, m_spec.get("step", 1)))


def build_model(d: dict, precision_bits: int) -> MetricModel:
    return MetricModel(int(d["n"]), d.get("kind", "L1_TWIST"), _parse_rat(d["q"]), int(d.get("degree", 1)),
                       int(d.get("precision_bits", precision_bits)))


def build_Y(d: dict | None, n: int) -> SubvarietyY:
    return SubvarietyY(n, tuple((d or {}).get("killed", ())))


def build_flag(d: dict, n: int) -> Flag:
    return good_flag_pn(n, int(d["p"]), d["point"], d["chain"])


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config: {e}") from e
    validate_config(cfg)
    return cfg


def _is_randomized(exp: dict) -> bool:
    if exp["type"] == "restricted":
        return bool(exp.get("samples"))
    if exp["type"] == "lambda":
        return "lattice" not in exp
    return exp["type"] in RANDOMIZED


def validate_config(cfg: Any) -> None:
    """Schema validation plus semantic checks (objects constructible, seeds present)."""
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"schema error at {where}: {e.message}") from e
    ids = set()
    bits = cfg.get("precision_bits", 128)
    for i, exp in enumerate(cfg["experiments"]):
        eid = exp.get("id", f"{exp['type']}-{i}")
        if eid in ids:
            raise ConfigError(f"duplicate experiment id {eid!r}")
        ids.add(eid)
        missing = [k for k in REQUIRED[exp["type"]] if k not in exp]
        if missing:
            raise ConfigError(f"experiment {eid!r} ({exp['type']}) is missing {', '.join(missing)}")
        if "seed" not in cfg and _is_randomized(exp):
            raise ConfigError(f"experiment {eid!r} is randomized: a top-level seed is required")
        try:
            if "model" in exp:
                model = build_model(exp["model"], bits)
                Y = build_Y(exp.get("Y"), model.n)
                nflag = Y.d_prime - 1 if exp["type"] in ("okounkov", "fujita") else model.n
                for f in ([exp["flag"]] if "flag" in exp else []) + exp.get("flags", []):
                    build_flag(f, nflag)
            if "model_b" in exp:
                build_model(exp["model_b"], bits)
            if exp["type"] == "lambda" and ("lattice" in exp) != ("ball" in exp):
                raise ConfigError(f"experiment {eid!r}: 'lattice' and 'ball' go together")
            if "lattice" in exp:
                _explicit_module(exp)
            if "sigma" in exp:
                try:
                    mpmath.mpf(exp["sigma"])
                except ValueError:
                    raise ConfigError(f"experiment {eid!r}: sigma {exp['sigma']!r} is not a real number") from None
            if "m_list" in exp and not m_values(exp["m_list"]):
                raise ConfigError("empty m_list")
        except ConfigError:
            raise
        except (OkvError, ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"experiment {eid!r}: {e}") from e


# experiments ---------------------------------------------------------------------

def _ok(rows=None, payload=None, failures=()) -> dict:
    return {"status": "fail" if failures else "ok", "rows": rows or {}, "payload": payload or {},
            "failures": list(failures)}


def _jsonable(obj):
    return json.loads(canonical_json(obj))


def _exp_count(exp, ctx):
    model = build_model(exp["model"], ctx["bits"])
    Y = build_Y(exp.get("Y"), model.n)
    variant = exp.get("variant", "QUOT")
    rows = []
    for m in m_values(exp["m_list"]):
        s = restricted_series(model, m, Y, variant, cap=0 if model.kind == "L1_TWIST" else ctx["series_cap"])
        rows.append({"experiment_id": ctx["id"], "model_hash": model.hash, "Y": Y.label(), "variant": variant,
                     "m": m, "count": str(s.count), "count_upper": str(s.count_upper), "method": s.method})
    return _ok({"series": rows})


def _volume_rows(ctx, model, Y, variant, seq):
    return [dict(experiment_id=ctx["id"], model_hash=model.hash, Y=Y.label(), variant=variant, **r)
            for r in seq.rows()]


def _exp_vol(exp, ctx):
    model = build_model(exp["model"], ctx["bits"])
    Y = build_Y(exp.get("Y"), model.n)
    variant = exp.get("variant", "QUOT")
    seq = V.vhat_vol_estimate(model, m_values(exp["m_list"]), Y, variant, exp.get("method", "richardson2"))
    cf = V.vhat_closed_form(model, Y) if model.kind == "L1_TWIST" else None
    payload = {"limit": fmt_log(seq.limit), "error": None if seq.error is None else fmt_log(seq.error),
               "method": seq.method, "d_prime": seq.d_prime,
               "closed_form": None if cf is None else {"coeff": cf["coeff"], "q": str(cf["q"]),
                                                       "value": fmt_log(cf["value"])}}
    return _ok({"volumes": _volume_rows(ctx, model, Y, variant, seq)}, payload)


def _exp_restricted(exp, ctx):
    out = _exp_vol(exp, ctx)
    model = build_model(exp["model"], ctx["bits"])
    Y = build_Y(exp.get("Y"), model.n)
    failures = []
    if Y.d_prime == 1 and model.kind == "L1_TWIST":
        m = m_values(exp["m_list"])[-1]
        ident = V.restricted_degree_identity(model, m)
        out["payload"]["degree_identity"] = _jsonable({k: v for k, v in ident.items() if k != "closed_form"})
        if not ident["identity"]:
            failures.append("restricted volume equals the degree of the restricted twist")
    rng = np.random.default_rng(ctx.get("seed", 0))
    structure = []
    for m in exp.get("structure_m", []):
        inc = assignment_inclusions(model, m, Y, ctx["series_cap"])
        if exp.get("samples"):
            for v in VARIANTS:
                pp = product_property(model, Y, v, m, m, exp["samples"], rng, ctx["series_cap"])
                inc[f"product_{v}"] = pp
                if pp["failures"]:
                    failures.append(f"{ANCHORS['restricted']}: product property ({v}, m={m})")
        if not (inc["cl_in_quot"] and inc["quot_in_sub"]):
            failures.append(f"{ANCHORS['restricted']}: inclusion at m={m}")
        structure.append(inc)
    out["payload"]["structure"] = _jsonable(structure)
    out["failures"] = failures
    out["status"] = "fail" if failures else "ok"
    return out


def _exp_okounkov(exp, ctx):
    model = build_model(exp["model"], ctx["bits"])
    Y = build_Y(exp.get("Y"), model.n)
    flag = build_flag(exp["flag"], Y.d_prime - 1)
    body = V.okounkov_body(model, flag, exp["m_max"], Y, exp.get("variant", "QUOT"), ctx["series_cap"])
    failures = [f"{ANCHORS['okounkov']} (m={r['m']})" for r in body.levels if not r.get("graded_ok", True)]
    failures += [f"closed-form valuation image disagrees with enumeration (m={r['m']})" for r in body.levels
                 if r.get("fast_agrees") is False]
    return _ok(payload=_jsonable(body.to_dict()), failures=failures)


def _exp_gap(exp, ctx):
    model = build_model(exp["model"], ctx["bits"])
    flags = [build_flag(f, model.n) for f in exp.get("flags", [exp["flag"]] if "flag" in exp else [])]
    if not flags:
        flags = [V.default_flag(model.n, 5)]
    sigma = exp.get("sigma")
    ms = m_values(exp["m_list"])
    rows, reports = [], []
    for f in flags:
        for m in ms:
            r = V.valuation_gap(model, f, m, sigma, ctx["series_cap"])
            reports.append(r)
            row = r.row()
            row["tol"] = fmt_log(V.TOL * max(1, abs(r.rhs)))
            rows.append(row)
    fit = V.fit_gap_constant([r for r in reports if r.m >= 1]) if any(r.m >= 1 for r in reports) else None
    payload = {"reported_not_asserted": "per-row pass depends on sigma, a configuration input"}
    if fit:
        payload.update({"C": fmt_log(fit["C"]), "C_shape_below_rhs": fit["shape_below_rhs"]})
    return _ok({"gaps": rows}, payload)


def _exp_sandwich(exp, ctx):
    model = build_model(exp["model"], ctx["bits"])
    flag = build_flag(exp["flag"], model.n)
    reps = [V.check_sandwich_model(model, m, flag, ctx["enum_cap"]) for m in m_values(exp["m_list"])]
    failures = [f"{ANCHORS['sandwich']} (m={r['m']})" for r in reps if not r["pass"]]
    return _ok(payload={"reports": _jsonable(reps)}, failures=failures)


def _exp_fujita(exp, ctx):
    model = build_model(exp["model"], ctx["bits"])
    Y = build_Y(exp.get("Y"), model.n)
    flag = build_flag(exp["flag"], Y.d_prime - 1) if "flag" in exp else None
    rows = V.fujita_kfold(model, exp["n_level"], exp["k_max"], Y, exp.get("variant", "QUOT"), flag,
                          ctx["series_cap"])
    out, failures = [], []
    for r in rows:
        out.append({"n": r["n"], "k": r["k"], "V_size": str(r["V_size"]), "CL_size": str(r["CL_size"]),
                    "normalized": fmt_log(r["normalized"]), "contain_ok": r["contain_ok"],
                    "nu_superset_ok": r["nu_superset_ok"]})
        if not (r["contain_ok"] and r["nu_superset_ok"] and r["normalized"] > 0):
            failures.append(f"{ANCHORS['fujita']} (n={r['n']}, k={r['k']})")
    return _ok({"fujita": out}, {"rows": _jsonable(rows)}, failures)


def _exp_superadd(exp, ctx):
    A = build_model(exp["model"], ctx["bits"])
    B = build_model(exp["model_b"], ctx["bits"])
    Y = build_Y(exp.get("Y"), A.n)
    r = V.superadditivity_check(A, B, m_values(exp["m_list"]), Y, exp.get("variant", "QUOT"))
    payload = {k: v for k, v in r.items() if k != "estimates"}
    if "estimates" in r:
        payload["estimates"] = {k: e.to_dict()["limit"] for k, e in r["estimates"].items()}
    failures = [] if r["pass"] and r.get("closed_form_pass", True) and r.get("exact_identity", True) \
        else [ANCHORS["superadd"]]
    return _ok(payload=_jsonable(payload), failures=failures)


def random_normed_modules(count: int, seed: int, max_rank: int = 3):
    """Seeded random lattices with random symmetric polytopal unit balls."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        r = rng.randint(1, max_rank)
        A = [[rng.randint(-3, 3) for _ in range(r)] for _ in range(r)]
        if det(A) == 0:
            continue
        pts = [[Fraction(rng.randint(-8, 8), rng.randint(1, 2)) for _ in range(r)] for _ in range(r + 2)]
        P = convex_hull(pts + [[-x for x in v] for v in pts])
        if P.dim < r:
            continue
        out.append(V.NormedModule(Lattice.span(A), P))
    return out


def _explicit_module(exp) -> V.NormedModule:
    L = Lattice.span(exp["lattice"])
    ball = convex_hull([[_parse_rat(x) for x in v] for v in exp["ball"]])
    return V.NormedModule(L, ball)


def _exp_lambda(exp, ctx):
    if "lattice" in exp:
        mods = [_explicit_module(exp)]
    else:
        mods = random_normed_modules(exp.get("instances", 100), ctx["seed"], exp.get("max_rank", 3))
    res = [V.lambda_norms(M) for M in mods]
    bad = [i for i, r in enumerate(res) if not r["pass"]]
    payload = {"instances": len(res), "failures": len(bad),
               "strict": sum(1 for r in res if r["lambda"] > r["lambda_prime"]),
               "examples": _jsonable(res[:5])}
    return _ok(payload=payload, failures=[f"{ANCHORS['lambda']} (instance {i})" for i in bad])


def _exp_selftest(exp, ctx):
    res = run_selftest(ctx["seed"], exp.get("instances", 500))
    failures = [f"{ANCHORS['selftest']}: {r['check']}" for r in res if r["failures"]]
    return _ok(payload={"checks": _jsonable(res)}, failures=failures)


RUNNERS = {"count": _exp_count, "vol": _exp_vol, "restricted": _exp_restricted, "okounkov": _exp_okounkov,
           "gap": _exp_gap, "sandwich": _exp_sandwich, "fujita": _exp_fujita, "superadd": _exp_superadd,
           "lambda": _exp_lambda, "selftest": _exp_selftest}


def run_experiment(exp: dict, ctx: dict) -> dict:
    """Run one experiment; errors become recorded statuses, never silent drops."""
    t0 = time.perf_counter()
    try:
        out = RUNNERS[exp["type"]](exp, ctx)
    except CapExceeded as e:
        log.warning("experiment %s: %s", ctx["id"], e)
        out = {"status": "cap_exceeded", "rows": {}, "payload": {"error": str(e)}, "failures": []}
    except Exception as e:  # recorded, never silently dropped
        log.exception("experiment %s failed", ctx["id"])
        out = {"status": "error", "rows": {}, "payload": {"error": str(e)}, "failures": [f"{type(e).__name__}: {e}"]}
    out["id"] = ctx["id"]
    out["type"] = exp["type"]
    out["seconds"] = round(time.perf_counter() - t0, 3)
    return out


# artifacts ---------------------------------------------------------------------------

def csv_text(name: str, rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_SCHEMAS[name], lineterminator="\n", extrasaction="raise")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("true" if v is True else "false" if v is False else v) for k, v in r.items()})
    return buf.getvalue()


def run_config(cfg: dict, out_dir: str, jobs: int = 1) -> int:
    """Execute a validated config; write CSVs, per-experiment JSON and ``summary.json``; return the exit code."""
    caps = cfg.get("caps", {})
    base = {"bits": cfg.get("precision_bits", 128), "series_cap": caps.get("series", DEFAULT_SERIES_CAP),
            "enum_cap": caps.get("enum", DEFAULT_CAP), "seed": cfg.get("seed", 0)}
    tasks = []
    for i, exp in enumerate(cfg["experiments"]):
        tasks.append((exp, dict(base, id=exp.get("id", f"{exp['type']}-{i}"))))
    started = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_experiment, e, c) for e, c in tasks]
            results = [f.result() for f in futures]
    else:
        results = [run_experiment(e, c) for e, c in tasks]
    os.makedirs(out_dir, exist_ok=True)
    tables: dict = {name: [] for name in CSV_SCHEMAS}
    for res in results:
        for name, rows in res["rows"].items():
            tables[name].extend(rows)
        atomic_write(os.path.join(out_dir, f"{res['id']}.json"),
                     json.dumps({"id": res["id"], "type": res["type"], "status": res["status"],
                                 "failures": res["failures"], "result": res["payload"]}, indent=2, sort_keys=True)
                     + "\n")
    for name, rows in tables.items():
        if rows:
            atomic_write(os.path.join(out_dir, f"{name}.csv"), csv_text(name, rows))
    statuses = [r["status"] for r in results]
    if any(s in ("fail", "error") for s in statuses):
        code = 1
    elif all(s == "cap_exceeded" for s in statuses):
        code = 3
    else:
        code = 0
    summary = {"config": cfg, "config_hash": content_hash(cfg), "started": started,
               "finished": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()), "exit_code": code,
               "experiments": [{"id": r["id"], "type": r["type"], "status": r["status"], "failures": r["failures"],
                                "seconds": r["seconds"]} for r in results]}
    atomic_write(os.path.join(out_dir, "summary.json"), json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return code


# diff ----------------------------------------------------------------------------------

def _numeric_close(a: str, b: str) -> bool:
    """Equal as exact integers/booleans, or as 20-digit decimals up to one unit in the last place."""
    if a == b:
        return True
    try:
        fa, fb = Fraction(a), Fraction(b)
    except ValueError:
        return False
    if fa.denominator == 1 and fb.denominator == 1 and "." not in a + b and "e" not in (a + b).lower():
        return False
    return abs(fa - fb) <= Fraction(1, 10 ** 18) * max(1, abs(fa), abs(fb))


def diff_runs(dir_a: str, dir_b: str) -> dict:
    """Field-by-field comparison of the CSV artifacts of two runs."""
    report = {"FAIL": [], "NOT_COMPARABLE": [], "schema_mismatch": [], "compared_rows": 0}
    for name, cols in CSV_SCHEMAS.items():
        pa, pb = os.path.join(dir_a, f"{name}.csv"), os.path.join(dir_b, f"{name}.csv")
        if not os.path.exists(pa) and not os.path.exists(pb):
            continue
        if not (os.path.exists(pa) and os.path.exists(pb)):
            report["NOT_COMPARABLE"].append({"table": name, "reason": "present in one run only"})
            continue
        tabs = []
        for path in (pa, pb):
            with open(path, newline="") as fh:
                rd = csv.DictReader(fh)
                if tuple(rd.fieldnames or ()) != cols:
                    report["schema_mismatch"].append({"table": name, "file": path, "header": rd.fieldnames})
                    tabs = None
                    break
                tabs.append({tuple(r[k] for k in CSV_KEYS[name]): r for r in rd})
        if tabs is None:
            continue
        A, B = tabs
        for key in sorted(set(A) | set(B)):
            if key not in A or key not in B:
                report["NOT_COMPARABLE"].append({"table": name, "key": list(key),
                                                 "only_in": "A" if key in A else "B"})
                continue
            report["compared_rows"] += 1
            for col in cols:
                if not _numeric_close(A[key][col], B[key][col]):
                    report["FAIL"].append({"table": name, "key": list(key), "field": col,
                                           "a": A[key][col], "b": B[key][col]})
    return report
