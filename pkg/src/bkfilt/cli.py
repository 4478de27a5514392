"""Command line interface: `bkfilt <command> ...`.

Exit codes: 0 all checks pass, 1 a check failed or found a counterexample, 2 input,
precision or internal failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import dpcalc, extcalc, sd
from .coeffs import CoefficientRing
from .generate import ResampleLimit, gen_random_sd, gen_random_valid
from .hodge import d_pair
from .modf import FilteredBKModule, standard_sequence, validate


class SchemaError(ValueError):
    pass


# parsing

def parse_object(data) -> FilteredBKModule:
    """JSON (dict, string or path) -> object; raises SchemaError or ValueError with the violations."""
    if isinstance(data, str):
        if os.path.exists(data):
            with open(data) as fh:
                data = json.load(fh)
        else:
            data = json.loads(data)
    for key in ("ring", "rank", "frob", "chain"):
        if key not in data:
            raise SchemaError(f"missing field '{key}'")
    try:
        obj = FilteredBKModule.from_json(data)
    except (KeyError, TypeError, IndexError) as exc:
        raise SchemaError(f"malformed object: {exc}") from exc
    return obj


def parse_and_validate(data) -> FilteredBKModule:
    obj = parse_object(data)
    rep = validate(obj)
    if not rep.ok:
        raise ValueError("axiom violations: " + "; ".join(rep.violations))
    return obj


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


# grid and sweep

@dataclass
class SweepGrid:
    p: list
    f: list
    e: list
    d: list
    trials: int = 10
    sd_only: bool = False

    def points(self) -> list[tuple]:
        return sorted(product(self.p, self.f, self.e, self.d))


def _parse_range(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def parse_grid(text: str, sd_only: bool = False) -> SweepGrid:
    fields = {"p": [2, 3], "f": [1, 2], "e": [1, 2, 3], "d": [1, 2, 3]}
    trials = 10
    for item in filter(None, (s.strip() for s in text.split(";"))):
        key, _, val = item.partition("=")
        key = key.strip()
        if key == "trials":
            trials = int(val)
        elif key in fields:
            fields[key] = _parse_range(val)
        else:
            raise SchemaError(f"unknown grid key '{key}'")
    grid = SweepGrid(fields["p"], fields["f"], fields["e"], fields["d"], trials, sd_only)
    for p, f, e, d in grid.points():
        CoefficientRing(p, f, f, e)
        if d < 1:
            raise SchemaError("ranks must be positive")
    return grid


def _point_seed(seed: int, point: tuple) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, *point])


def check_pair(P, M, both_sd: bool, precision=None) -> dict:
    """All identities applicable to the pair; 'ok' summarises them."""
    out: dict = {}
    h1 = extcalc.h1_dim(P, M, precision)
    h0 = extcalc.h0_dim(P, M)
    vals = extcalc.h0_valuations(P, M)
    prof = extcalc.hom_k_profile(P, M)
    out.update({"h0": h0, "h1": h1.value, "h1_values": h1.values, "precision_used": h1.tops,
                "h0_kernel": h1.h0_kernel, "valuations": vals["valuations"], "bound": vals["bound"],
                "hypothesis": prof.hypothesis})
    checks = {"h0_kernel": h0 == h1.h0_kernel, "valuation_bound": vals["ok"] and vals["dim"] == h0,
              "stable": len(set(h1.values[-2:])) == 1}
    if prof.hypothesis:
        chi = extcalc.chi_formula(P, M, prof)
        out["chi_formula"] = chi
        checks["extdim"] = h1.value - h0 == chi
    if both_sd:
        dmu = d_pair(sd.hodge_type(P, check=False), sd.hodge_type(M, check=False))
        out["d_mu"] = dmu
        checks["niceform"] = h1.value == h0 + dmu
        if prof.hypothesis:
            checks["chi_equals_d"] = out["chi_formula"] == dmu
    out["checks"] = checks
    out["ok"] = all(checks.values())
    return out


def run_point(args) -> dict:
    point, trials, seed, sd_only, precision = args
    p, f, e, d = point
    ring = CoefficientRing(p, f, f, e)
    rng = np.random.default_rng(_point_seed(seed, point))
    res = {"point": list(point), "trials": 0, "pass": 0, "fail": 0, "errors": 0, "counterexample": None}
    t0 = time.perf_counter()
    for _ in range(trials):
        use_sd = sd_only or bool(rng.integers(0, 2))
        gen = gen_random_sd if use_sd else gen_random_valid
        try:
            P = gen(ring, int(rng.integers(1, d + 1)), rng)
            M = gen(ring, d, rng)
            both_sd = use_sd or (sd.sd_check_criterion(P) and sd.sd_check_criterion(M))
            rep = check_pair(P, M, both_sd, precision)
        except (ResampleLimit, extcalc.NoStabilization) as exc:
            res["errors"] += 1
            res.setdefault("error_messages", []).append(str(exc))
            continue
        res["trials"] += 1
        if rep["ok"]:
            res["pass"] += 1
        else:
            res["fail"] += 1
            if res["counterexample"] is None:
                res["counterexample"] = {"P": P.to_json(), "M": M.to_json(), "report": rep}
    res["seconds"] = round(time.perf_counter() - t0, 3)
    return res


def run_sweep(grid: SweepGrid, seed: int, precision=None, workers: int | None = None) -> dict:
    pts = grid.points()
    jobs = [(pt, grid.trials, seed, grid.sd_only, precision) for pt in pts]
    t0 = time.perf_counter()
    if not jobs:
        results = []
    elif workers == 1 or len(jobs) == 1:
        results = [run_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run_point, jobs))
    results.sort(key=lambda r: r["point"])
    return {
        "seed": seed,
        "points": results,
        "total_trials": sum(r["trials"] for r in results),
        "failures": sum(r["fail"] for r in results),
        "errors": sum(r["errors"] for r in results),
        "seconds": round(time.perf_counter() - t0, 3),
    }


# output

def _table(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, dict) or (isinstance(v, list) and any(isinstance(x, dict) for x in v)):
                lines.append(f"{pad}{k}:")
                lines.append(_table(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v, default=_json_default) if isinstance(v, list) else v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_table(x, indent) if isinstance(x, dict) else f"{pad}- {x}" for x in obj)
    return f"{pad}{obj}"


def emit(report, fmt: str) -> None:
    if fmt == "table":
        print(_table(report))
    else:
        print(json.dumps(report, indent=2, default=_json_default))


def _json_default(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    return str(x)


# commands

def cmd_validate(a) -> tuple[dict, int]:
    obj = parse_object(a.object)
    rep = validate(obj)
    return rep.to_json(), 0 if rep.ok else 1


def cmd_sd(a):
    obj = parse_and_validate(a.object)
    t0 = time.perf_counter()
    crit = sd.sd_check_criterion(obj)
    t1 = time.perf_counter()
    defn = sd.sd_check_definition(obj)
    t2 = time.perf_counter()
    rep = {"criterion": crit, "definition": defn, "agree": crit == defn,
           "timing": {"criterion": round(t1 - t0, 4), "definition": round(t2 - t1, 4)}}
    if crit:
        rep["basis"] = sd.sd_basis(obj).to_json()
    return rep, 0 if crit == defn else 1


def cmd_hodge(a):
    obj = parse_and_validate(a.object)
    mu = sd.hodge_type(obj)
    return {"hodge_type": mu.to_json(), "text": str(mu)}, 0


def _load_sequence(path):
    data = _load_json(path)
    M, Nobj, P = (parse_and_validate(data[k]) for k in ("sub", "middle", "quotient"))
    return standard_sequence(M, Nobj, P)


def cmd_split(a):
    seq = _load_sequence(a.sequence)
    s = sd.split_surjection(seq)
    rep = {"fil1_inclusion": s.fil1_ok, "phi_inclusion": s.phi_ok, "t": s.t.tolist(), "W": s.W.tolist()}
    return rep, 0 if s.fil1_ok and s.phi_ok else 1


def _pair(a):
    return parse_and_validate(a.source), parse_and_validate(a.target)


def cmd_hom(a):
    P, M = _pair(a)
    vals = extcalc.h0_valuations(P, M)
    rep = {"h0": extcalc.h0_dim(P, M), "valuations": vals["valuations"], "valuation_bound": vals["bound"],
           "bound_ok": vals["ok"]}
    return rep, 0 if vals["ok"] else 1


def cmd_ext(a):
    P, M = _pair(a)
    r = extcalc.h1_dim(P, M, a.precision)
    return {"h1": r.value, "h1_values": r.values, "precision_used": r.tops, "h0": extcalc.h0_dim(P, M)}, 0


def cmd_chi(a):
    P, M = _pair(a)
    prof = extcalc.hom_k_profile(P, M)
    rep = {"profile": prof.to_json()}
    if not prof.hypothesis:
        rep["error"] = "HypothesisFailed"
        return rep, 1
    rep["chi_formula"] = extcalc.chi_formula(P, M, prof)
    return rep, 0


def cmd_niceform(a):
    P, M = _pair(a)
    rep = extcalc.verify_niceform(P, M, a.precision)
    return rep, 0 if rep["equal"] else 1


def cmd_gen(a):
    ring = CoefficientRing(a.p, a.f, a.m or a.f, a.e)
    rng = np.random.default_rng(a.seed)
    gen = gen_random_valid if a.valid else gen_random_sd
    return gen(ring, a.d, rng).to_json(), 0


def cmd_audit_dp(a):
    conv = list(dpcalc.CONVENTIONS) if a.convention == "both" else [a.convention]
    rep: dict = {"gls": [], "z_span": {}, "partial": {}}
    ok = True
    ps, es, js = a.grid
    for p in ps:
        for e in es:
            g = dpcalc.gls_valuation_check(p, e, js)
            ok &= g["ok"]
            rep["gls"].append({"p": p, "e": e, "ok": g["ok"], "counterexamples": g["counterexamples"][:3]})
    for name in conv:
        c = dpcalc.CONVENTIONS[name]
        rows = {}
        for i in range(1, a.depth + 1):
            expr = dpcalc.x_iterate(i, c) - dpcalc.DPExpression.x(0, c)
            aud = dpcalc.z_span_audit(expr)
            rows[i] = {"pass": aud["pass"], "expression": str(expr)}
            if name == "derived":
                ok &= aud["pass"]
        rep["z_span"][name] = rows
        part = dpcalc.partial_calculus_audit(a.depth, 2, c)
        rep["partial"][name] = {f"{k[0]},{k[1]}": v["pass"] for k, v in part["verdicts"].items()}
    return rep, 0 if ok else 1


def _dp_grid(text: str):
    p, e, j = [2, 3, 5, 7], list(range(1, 9)), 20
    for item in filter(None, (s.strip() for s in text.split(";"))):
        key, _, val = item.partition("=")
        if key.strip() == "p":
            p = _parse_range(val)
        elif key.strip() == "e":
            e = _parse_range(val)
        elif key.strip() == "j":
            j = int(val)
        else:
            raise SchemaError(f"unknown grid key '{key}'")
    return p, e, j


def cmd_sweep(a):
    grid = parse_grid(a.grid or "", a.sd_only)
    rep = run_sweep(grid, a.seed, a.precision, a.workers)
    if rep["errors"]:
        return rep, 2
    return rep, 1 if rep["failures"] else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None, help="initial H^1 truncation")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "table"), default="json")
    ap = argparse.ArgumentParser(prog="bkfilt", description="Filtered mod-p Breuil-Kisin module toolkit")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("validate", "sd", "hodge"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("object", help="JSON file or inline JSON")
    s = sub.add_parser("split", parents=[common])
    s.add_argument("sequence", help='JSON file with "sub", "middle", "quotient" objects')
    for name in ("hom", "ext", "chi", "niceform"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("source")
        s.add_argument("target")
    s = sub.add_parser("gen", parents=[common])
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--f", type=int, default=1)
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--e", type=int, default=1)
    s.add_argument("--d", type=int, default=1)
    s.add_argument("--valid", action="store_true", help="any valid object instead of an SD one")
    s = sub.add_parser("audit-dp", parents=[common])
    s.add_argument("--depth", type=int, default=5)
    s.add_argument("--convention", choices=("derived", "lift-line", "both"), default="both")
    s.add_argument("--grid", type=_dp_grid, default=_dp_grid(""))
    s = sub.add_parser("sweep", parents=[common])
    s.add_argument("--grid", default="")
    s.add_argument("--sd-only", action="store_true")
    s.add_argument("--workers", type=int, default=None)
    return ap


COMMANDS = {
    "validate": cmd_validate, "sd": cmd_sd, "hodge": cmd_hodge, "split": cmd_split, "hom": cmd_hom,
    "ext": cmd_ext, "chi": cmd_chi, "niceform": cmd_niceform, "gen": cmd_gen,
    "audit-dp": cmd_audit_dp, "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, code = COMMANDS[args.command](args)
    except (SchemaError, json.JSONDecodeError, FileNotFoundError) as exc:
        emit({"error": "schema", "message": str(exc)}, args.format)
        return 2
    except sd.NotStronglyDivisible as exc:
        emit({"error": "NotStronglyDivisible", "message": str(exc)}, args.format)
        return 1
    except ValueError as exc:
        emit({"error": type(exc).__name__, "message": str(exc)}, args.format)
        return 1 if "axiom" in str(exc) else 2
    except (extcalc.NoStabilization, RuntimeError) as exc:
        emit({"error": type(exc).__name__, "message": str(exc)}, args.format)
        return 2
    emit(report, args.format)
    return code


if __name__ == "__main__":
    sys.exit(main())
