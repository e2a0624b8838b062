"""Command-line front end.

    cmacr region KIND --scenario FILE --out FILE.csv
    cmacr rate --scheme {df,cf,lattice,upper} (--p-db X | --p-db-range A B STEP) --gamma2 G --eta2 E --out FILE.csv
    cmacr figure {3,4,5,6} --out-dir DIR
    cmacr sim --config FILE --out-dir DIR
    cmacr selftest [-v]

Exit codes: 0 ok, 1 selftest failure, 2 input error, 3 infeasible or empty
region, 4 decoding cap exceeded. Powers are given in dB on the command line
and in scenario files, and handled linearly inside.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import binary_region, cmacr_regions as cr, cognitive_regions as cg, gf2_sim
from .binary_region import BinaryScenario
from .numerics import RegionBoundary, db_to_linear, dominates
from .tables import write_csv

EXIT_OK, EXIT_SELFTEST, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_CAP = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


class Infeasible(Exception):
    pass


# --------------------------------------------------------------------------
# scenario files
# --------------------------------------------------------------------------

_DB = {"oneOf": [{"type": "number"}, {"const": "-inf"}]}
_NONNEG = {"oneOf": [{"type": "number", "minimum": 0}, {"const": "inf"}]}
_PROB = {"type": "number", "minimum": 0, "maximum": 0.5}
_POS_INT = {"type": "integer", "minimum": 1}

SCHEMAS = {
    "gaussian": {
        "type": "object",
        "properties": {
            "type": {"const": "gaussian"},
            "P1_db": _DB, "P2_db": _DB, "P3_db": _DB,
            "gamma2": {"type": "number", "minimum": 0},
            "eta2": _NONNEG,
            "points": {"type": "integer", "minimum": 2},
            "grid_n": {"type": "integer", "minimum": 2},
        },
        "required": ["type", "P1_db", "P2_db", "P3_db", "gamma2", "eta2"],
        "additionalProperties": False,
    },
    "cognitive": {
        "type": "object",
        "properties": {
            "type": {"const": "cognitive"},
            "P1_db": _DB, "P2_db": _DB, "P3_db": _DB,
            "r3": {"type": "number", "minimum": 0},
            "c1": _NONNEG, "c2": _NONNEG,
            "points": {"type": "integer", "minimum": 2},
            "grid_n": {"type": "integer", "minimum": 2},
        },
        "required": ["type", "P1_db", "P2_db", "P3_db"],
        "additionalProperties": False,
    },
    "orthogonal": {
        "type": "object",
        "properties": {
            "type": {"const": "orthogonal"},
            "c1": {"type": "number", "minimum": 0},
            "c2": {"type": "number", "minimum": 0},
            "c3": {"type": "number", "minimum": 0},
        },
        "required": ["type", "c1", "c2", "c3"],
        "additionalProperties": False,
    },
    "binary": {
        "type": "object",
        "properties": {"type": {"const": "binary"}, "eps1": _PROB, "eps2": _PROB, "eps3": _PROB},
        "required": ["type", "eps1", "eps2", "eps3"],
        "additionalProperties": False,
    },
    "sim": {
        "type": "object",
        "properties": {
            "type": {"const": "sim"},
            "eps1": _PROB, "eps2": _PROB, "eps3": _PROB,
            "n": _POS_INT, "k1": _POS_INT, "k2": _POS_INT,
            "num_blocks": {"type": "integer", "minimum": 2},
            "trials": _POS_INT,
            "master_seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
            "relay_decoder": {"enum": ["xor", "joint", "both"]},
            "cap": _POS_INT,
        },
        "required": ["type", "eps1", "eps2", "eps3", "n", "k1", "k2", "trials", "master_seed"],
        "additionalProperties": False,
    },
}
SCENARIO_SCHEMA = {"oneOf": list(SCHEMAS.values())}


def _num(v) -> float:
    # "inf" / "-inf" strings are the JSON spelling of unbounded values
    return float(v)


def load_scenario(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read scenario {path}: {e}") from e
    kind = doc.get("type") if isinstance(doc, dict) else None
    if kind not in SCHEMAS:
        raise InputError(f"scenario 'type' must be one of {sorted(SCHEMAS)}")
    try:
        jsonschema.validate(doc, SCHEMAS[kind])
    except jsonschema.ValidationError as e:
        raise InputError(f"scenario {path}: {e.message}") from e
    return doc


def _powers(doc) -> tuple[float, float, float]:
    return tuple(db_to_linear(_num(doc[k])) for k in ("P1_db", "P2_db", "P3_db"))


def gaussian_from(doc) -> cr.GaussianScenario:
    P1, P2, P3 = _powers(doc)
    return cr.GaussianScenario(P1, P2, P3, float(doc["gamma2"]), _num(doc["eta2"]))


def cognitive_from(doc) -> cg.CogScenario:
    return cg.CogScenario(*_powers(doc))


def binary_from(doc) -> BinaryScenario:
    return BinaryScenario(doc["eps1"], doc["eps2"], doc["eps3"])


def sim_configs(doc) -> list[gf2_sim.SimConfig]:
    mode = doc.get("relay_decoder", "xor")
    modes = ("xor", "joint") if mode == "both" else (mode,)
    kw = dict(num_blocks=doc.get("num_blocks", 4), trials=doc["trials"], master_seed=doc["master_seed"],
              cap=doc.get("cap", gf2_sim.DEFAULT_CAP))
    return [gf2_sim.oriented_config(binary_from(doc), doc["n"], doc["k1"], doc["k2"], relay_decoder=m, **kw)
            for m in modes]


# --------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------

def _scenario_meta(s) -> dict:
    return {k: getattr(s, k) for k in s.__dataclass_fields__}


def write_boundary(path, b: RegionBoundary, provenance: str, scenario: dict) -> Path:
    if b.empty or not b.valid.any():
        raise Infeasible(f"{provenance}: region is empty")
    m = b.valid
    meta = {"scenario": scenario, "r3": b.r3}
    if b.meta.get("region"):
        meta["region"] = b.meta["region"]
    return write_csv(path, ["r1", "r2"], zip(b.r1[m], b.r2[m]), provenance, meta)


def write_constraints(path, rows, provenance: str, scenario: dict) -> Path:
    return write_csv(path, ["constraint", "bound"], rows, provenance, {"scenario": scenario})


# --------------------------------------------------------------------------
# region
# --------------------------------------------------------------------------

REGION_KINDS = {
    "cognitive-full": "cognitive",
    "cognitive-partial": "cognitive",
    "cognitive-links": "cognitive",
    "orthogonal": "orthogonal",
    "df": "gaussian",
    "cf": "gaussian",
    "outer": "gaussian",
    "binary": "binary",
    "binary-df": "binary",
}

PROVENANCE = {
    "cognitive-full": "capacity region, Gaussian MAC with a fully cognitive relay",
    "cognitive-partial": "capacity region, Gaussian MAC with a partially cognitive relay",
    "cognitive-links": "region with finite-capacity source-relay links, jointly Gaussian inputs",
    "orthogonal": "capacity region, MAC with cognitive relay over orthogonal links",
    "df": "decode-and-forward achievable region, Gaussian cMACr, R3=0",
    "cf": "compress-and-forward achievable region, Gaussian cMACr, R3=0",
    "outer": "outer bound, Gaussian cMACr, R3=0",
    "binary": "capacity region, binary cMACr, R3=0",
    "binary-df": "decode-and-forward region, binary cMACr, R3=0",
}


def region_table(kind: str, doc: dict, out) -> Path:
    want = REGION_KINDS[kind]
    if doc["type"] != want:
        raise InputError(f"region kind {kind!r} needs a {want!r} scenario, got {doc['type']!r}")
    prov = PROVENANCE[kind]
    points = doc.get("points", 201)

    if kind in ("binary", "binary-df"):
        b = binary_from(doc)
        c = binary_region.binary_capacity_constraints(b)
        rows = [("r1", c.r1), ("r2", c.r2), ("r1+r2", c.sum_bound)]
        if kind == "binary-df":
            d = binary_region.binary_df_constraints(b)
            rows.append(("r1+r2 (relay decoding)", d.r1_r2[-1]))
        return write_constraints(out, rows, prov, _scenario_meta(b))

    if kind == "orthogonal":
        p = cg.orthogonal_polytope(doc["c1"], doc["c2"], doc["c3"])
        rows = [("r3", p.r3), ("r1+r2", p.r1_r2), ("r2+r3", p.r2_r3), ("r1+r2+r3", p.sum)]
        return write_constraints(out, rows, prov, {k: doc[k] for k in ("c1", "c2", "c3")})

    if want == "cognitive":
        s = cognitive_from(doc)
        r3 = float(doc.get("r3", 0.0))
        if kind == "cognitive-full":
            b = cg.full_cognitive_boundary(s, r3, points=points, **_grid(doc))
        elif kind == "cognitive-partial":
            b = cg.partial_cognitive_boundary(s, r3, points=points, **_grid(doc))
        else:
            if "c1" not in doc or "c2" not in doc:
                raise InputError("cognitive-links needs c1 and c2")
            b = cg.finite_capacity_boundary(s, _num(doc["c1"]), _num(doc["c2"]), r3, points=points)
        return write_boundary(out, b, prov, _scenario_meta(s))

    s = gaussian_from(doc)
    if kind == "cf":
        if s.eta2 * s.P3 == 0:
            raise Infeasible("CF region needs eta2 * P3 > 0")
        b = cr.cf_boundary(s, points=points, **_grid(doc))
    else:
        cfg = cr.SweepConfig(coarse_n=doc.get("grid_n", 17), points=points)
        fn = cr.df_boundary if kind == "df" else cr.outer_boundary
        b = fn(s, cfg=cfg)
    return write_boundary(out, b, prov, _scenario_meta(s))


def _grid(doc) -> dict:
    return {"grid_n": doc["grid_n"]} if "grid_n" in doc else {}


# --------------------------------------------------------------------------
# rate
# --------------------------------------------------------------------------

def p_db_grid(start: float, stop: float, step: float) -> np.ndarray:
    if not (math.isfinite(start) and math.isfinite(stop) and math.isfinite(step)) or step <= 0 or stop < start:
        raise InputError("P range needs finite start <= stop and step > 0")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


SCHEME_PROVENANCE = {
    "df": "symmetric decode-and-forward equal rate, Gaussian cMACr",
    "cf": "symmetric compress-and-forward equal rate, Gaussian cMACr",
    "lattice": "nested-lattice equal rate (relay decodes the modulo sum), Gaussian cMACr",
    "upper": "upper bound on the equal rate, Gaussian cMACr",
}


def rate_rows(scheme: str, p_db, gamma2: float, eta2: float) -> list[tuple[float, float, float]]:
    rows = []
    for pd in p_db:
        P = db_to_linear(float(pd))
        s = cr.GaussianScenario.symmetric(P, gamma2, eta2)
        rows.append((float(pd), P, cr.equal_rate(scheme, s)))
    return rows


def write_rates(path, scheme, p_db, gamma2, eta2, provenance=None) -> Path:
    rows = rate_rows(scheme, p_db, gamma2, eta2)
    meta = {"scheme": scheme, "gamma2": gamma2, "eta2": eta2}
    return write_csv(path, ["p_db", "P", "rate"], rows, provenance or SCHEME_PROVENANCE[scheme], meta)


# --------------------------------------------------------------------------
# figures
# --------------------------------------------------------------------------

FIG3_P_DB = 3.0
FIG3_P3_DB = (-6.0, 3.0)
FIG4_P_DB = 3.0
FIG4_RATES = (0.3, 0.55)
FIG4_P3_DB = p_db_grid(-10.0, 20.0, 1.0)
FIG5_P_DB = 5.0
FIG5_ETA2 = 10.0
FIG5_GAMMA2 = (1.0, 5.0)
FIG6_GAMMA2 = 0.1
FIG6_ETA2 = 10.0
FIG6_P_DB = p_db_grid(-10.0, 40.0, 1.0)


def _db_tag(x: float) -> str:
    return f"{'m' if x < 0 else ''}{abs(x):g}dB"


def figure_3(out: Path) -> list[Path]:
    P = db_to_linear(FIG3_P_DB)
    files = []
    base = cg.CogScenario(P, P, 0.0)
    files.append(write_boundary(out / "fig3_mac_no_relay.csv", cg.full_cognitive_boundary(base),
                                "no-relay MAC pentagon (baseline for the cognitive-relay regions)",
                                _scenario_meta(base)))
    for p3 in FIG3_P3_DB:
        s = cg.CogScenario(P, P, db_to_linear(p3))
        files.append(write_boundary(out / f"fig3_full_P3_{_db_tag(p3)}.csv", cg.full_cognitive_boundary(s),
                                    PROVENANCE["cognitive-full"] + ", R3=0", _scenario_meta(s)))
        files.append(write_boundary(out / f"fig3_partial_P3_{_db_tag(p3)}.csv", cg.partial_cognitive_boundary(s),
                                    PROVENANCE["cognitive-partial"] + ", R3=0", _scenario_meta(s)))
    return files


def figure_4(out: Path) -> list[Path]:
    P = db_to_linear(FIG4_P_DB)
    files = []
    for mode in ("full", "partial"):
        for r in FIG4_RATES:
            rows = []
            for p3 in FIG4_P3_DB:
                s = cg.CogScenario(P, P, db_to_linear(float(p3)))
                rows.append((float(p3), cg.max_unobtrusive_r3(s, r, r, mode)))
            files.append(write_csv(
                out / f"fig4_{mode}_R{r:g}.csv", ["p3_db", "r3"], rows,
                f"maximum relay rate leaving R1=R2={r:g} untouched, {mode} cognition",
                {"P1_db": FIG4_P_DB, "P2_db": FIG4_P_DB, "r1": r, "r2": r, "mode": mode}))
    return files


def figure_5(out: Path) -> list[Path]:
    P = db_to_linear(FIG5_P_DB)
    files = []
    for g2 in FIG5_GAMMA2:
        s = cr.GaussianScenario(P, P, P, g2, FIG5_ETA2)
        for kind, b in (("df", cr.df_boundary(s)), ("outer", cr.outer_boundary(s)), ("cf", cr.cf_boundary(s))):
            files.append(write_boundary(out / f"fig5_{kind}_gamma2_{g2:g}.csv", b, PROVENANCE[kind],
                                        _scenario_meta(s)))
    return files


def figure_6(out: Path) -> list[Path]:
    return [write_rates(out / f"fig6_{scheme}.csv", scheme, FIG6_P_DB, FIG6_GAMMA2, FIG6_ETA2)
            for scheme in ("lattice", "df", "cf", "upper")]


FIGURES = {3: figure_3, 4: figure_4, 5: figure_5, 6: figure_6}


# --------------------------------------------------------------------------
# simulation
# --------------------------------------------------------------------------

def run_sims(doc: dict, out: Path) -> list[gf2_sim.SimReport]:
    reports = []
    out.mkdir(parents=True, exist_ok=True)
    for cfg in sim_configs(doc):
        rep = gf2_sim.run_sim(cfg)
        (out / f"sim_{cfg.relay_decoder}.json").write_text(rep.to_json(), encoding="utf-8")
        with open(out / f"sim_{cfg.relay_decoder}.csv", "w", newline="", encoding="utf-8") as fh:
            fh.write(rep.to_csv())
        reports.append(rep)
    return reports


# --------------------------------------------------------------------------
# selftest
# --------------------------------------------------------------------------

def _check_binary_oracle():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(3):
        b = BinaryScenario(*rng.uniform(0, 0.5, 3))
        res = binary_region.brute_force_channel_oracle(b, 201)
        c = binary_region.binary_capacity_constraints(b)
        o = binary_region.oracle_constraints(res)
        worst = max(worst, abs(o.r1 - c.r1), abs(o.r2 - c.r2),
                    *(abs(x - y) for x, y in zip(o.r1_r2, c.r1_r2)))
    return worst <= 1e-6, f"max |oracle - closed form| = {worst:.3e}"


def _check_optimizer():
    s = cr.GaussianScenario.symmetric(10.0, 0.1, 10.0)
    f = cr.symmetric_upper_bound_objective(s)
    g = np.linspace(0.0, 1.0, 1000)
    dense = float(np.max(f(*np.meshgrid(g, g, indexing="ij"))))
    val = cr.symmetric_upper_bound(s)
    return val >= dense - 1e-4, f"optimizer {val:.6f} vs dense grid {dense:.6f}"


def _check_containment():
    P = db_to_linear(FIG5_P_DB)
    s = cr.GaussianScenario(P, P, P, 1.0, FIG5_ETA2)
    outer = cr.outer_boundary(s)
    axis = outer.r1
    df = cr.df_boundary(s, axis_grid=axis)
    cf = cr.cf_boundary(s, axis_grid=axis)
    ok = dominates(outer, df, 1e-9) and dominates(outer, cf, 1e-9)
    return ok, "DF <= outer and CF <= outer at gamma2=1"


def _check_degeneracy():
    s = cg.CogScenario(2.0, 3.0, 0.0)
    r1, r2, r12 = cg.mac_pentagon(s)
    full = cg.full_cognitive_boundary(s)
    part = cg.partial_cognitive_boundary(s, axis_grid=full.r1)
    ok = np.allclose(full.r2, part.r2, atol=1e-12, rtol=0) and abs(full.r1[-1] - r1) < 1e-12
    return ok, "P3=0 full and partial regions equal the MAC pentagon"


def _check_noiseless_sim():
    cfg = gf2_sim.SimConfig(BinaryScenario(0, 0, 0), 12, 5, 4, 4, 20, 1, "xor")
    rep = gf2_sim.run_sim(cfg)
    ok = rep.relay_error_rate == rep.rx1_error_rate == rep.rx2_error_rate == rep.end_to_end_error_rate == 0
    return ok, "noiseless XOR relaying decodes exactly"


SELFTESTS = (
    ("binary oracle vs closed form", _check_binary_oracle),
    ("optimizer vs dense grid", _check_optimizer),
    ("containment suite", _check_containment),
    ("cognitive degeneracy", _check_degeneracy),
    ("noiseless simulation", _check_noiseless_sim),
)


def selftest(verbose: bool = False, fault: str | None = None, stream=None) -> int:
    stream = stream or sys.stdout
    restore = None
    if fault == "hb":
        # test hook: perturb Hb as seen by the closed-form binary region
        orig = binary_region.binary_entropy
        binary_region.binary_entropy = lambda p: orig(p) + 1e-3
        restore = lambda: setattr(binary_region, "binary_entropy", orig)
    failed = 0
    try:
        for name, fn in SELFTESTS:
            t0 = time.perf_counter()
            try:
                ok, msg = fn()
            except Exception as e:  # a crashing check is a failing check
                ok, msg = False, f"{type(e).__name__}: {e}"
            dt = time.perf_counter() - t0
            failed += not ok
            line = f"{'PASS' if ok else 'FAIL'}  {name}: {msg}"
            if verbose:
                line += f"  [{dt:.2f} s]"
            print(line, file=stream)
    finally:
        if restore:
            restore()
    return EXIT_SELFTEST if failed else EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cmacr", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("region", help="write a region boundary or constraint list as CSV")
    p.add_argument("kind", choices=sorted(REGION_KINDS))
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("rate", help="equal rate versus power, P1 = P2 = P3 = P")
    p.add_argument("--scheme", required=True, choices=sorted(SCHEME_PROVENANCE))
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--p-db", type=float)
    g.add_argument("--p-db-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    p.add_argument("--gamma2", type=float, required=True)
    p.add_argument("--eta2", type=float, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("figure", help="write the data behind one figure as CSV files")
    p.add_argument("id", type=int)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("sim", help="Monte Carlo run of XOR relaying with linear codes")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("selftest", help="oracle cross-checks")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--inject-fault", choices=["hb"], help=argparse.SUPPRESS)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "region":
            path = region_table(args.kind, load_scenario(args.scenario), args.out)
            print(f"wrote {path}")
        elif args.cmd == "rate":
            if args.gamma2 < 0 or args.eta2 < 0:
                raise InputError("gamma2 and eta2 must be >= 0")
            p_db = np.array([args.p_db]) if args.p_db is not None else p_db_grid(*args.p_db_range)
            if not np.all(np.isfinite(p_db)):
                raise InputError("P must be finite")
            path = write_rates(args.out, args.scheme, p_db, args.gamma2, args.eta2)
            print(f"wrote {path}")
        elif args.cmd == "figure":
            if args.id not in FIGURES:
                raise InputError(f"unknown figure {args.id}; choose from {sorted(FIGURES)}")
            for path in FIGURES[args.id](Path(args.out_dir)):
                print(f"wrote {path}")
        elif args.cmd == "sim":
            doc = load_scenario(args.config)
            if doc["type"] != "sim":
                raise InputError(f"sim needs a 'sim' config, got {doc['type']!r}")
            for rep in run_sims(doc, Path(args.out_dir)):
                print(f"{rep.config['relay_decoder']}: relay {rep.relay_error_rate:.4f}  "
                      f"rx1 {rep.rx1_error_rate:.4f}  rx2 {rep.rx2_error_rate:.4f}  "
                      f"end-to-end {rep.end_to_end_error_rate:.4f}  ({rep.trials} trials)")
        else:
            return selftest(args.verbose, args.inject_fault)
    except gf2_sim.CapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except (Infeasible, cg.InfeasibleRates) as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InputError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
