"""Command-line experiments.

    spernerkit kuhn-verify N=2 n=2 seeds=100
    spernerkit lebesgue-witness cover=my.cover
    spernerkit brouwer map=rotate N=2 m=8,16,32 --format csv

Positional ``key=value`` pairs set experiment parameters; comma lists sweep.
Exit codes: 0 success, 1 bad input, 2 property violation, 3 budget exhausted.
Reports carry no wall-clock time unless ``--timing`` is given, so identical
configurations give byte-identical output whatever ``--threads`` is.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import chains, fixedpoint, subdivision
from .covers import (
    EmulationConfig,
    audit_trace,
    choose_grid_scale,
    colouring_to_cover,
    emulate_inductive_search,
    max_multiplicity_point,
    random_open_cover,
    rich_cube_via_cover,
    uncovered_point,
)
from .covers.emulation import hat_unit_ball_escapes
from .formats import ParseError, parse_colouring, parse_cover
from .labelings import (
    PALETTE_MODES,
    Colouring,
    check_cubical_sperner,
    cube_palette,
    max_colours_per_cube,
    random_sperner_colouring,
)

OUTPUT_DIR_ENV = "SPERNERKIT_OUTPUT_DIR"

OK, PARSE_ERROR, VIOLATION, BUDGET = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict = field(default_factory=dict)
    max_level: int = 20
    max_size: int = 4
    depth: int = 3
    window: int = 4
    step: int = 2
    output: str | None = None
    format: str = "json"
    threads: int = 1
    timing: bool = False

    def __post_init__(self):
        for name in ("max_level", "max_size", "depth", "window", "threads"):
            if getattr(self, name) < 1 and not (name == "max_level" and self.max_level == 0):
                raise ConfigError(f"--{name.replace('_', '-')} must be positive")
        if self.step < 0:
            raise ConfigError("--step must be non-negative")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")

    def echo(self) -> dict:
        # threads and output location do not change results, so they stay out
        return {"experiment": self.experiment, "params": dict(sorted(self.params.items())),
                "max_level": self.max_level, "max_size": self.max_size, "depth": self.depth,
                "window": self.window, "step": self.step}


@dataclass
class Outcome:
    results: dict
    rows: list
    code: int = OK
    messages: list = field(default_factory=list)


# parameter helpers ----------------------------------------------------------

def _get(cfg: ExperimentConfig, key: str, default=None, required: bool = False):
    if key in cfg.params:
        return cfg.params[key]
    if required:
        raise ConfigError(f"{cfg.experiment} needs {key}=...")
    return default


def _int(cfg, key, default=None, required=False) -> int:
    v = _get(cfg, key, default, required)
    try:
        return int(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be an integer, got {v!r}") from None


def _ints(cfg, key, default=None, required=False) -> list[int]:
    v = _get(cfg, key, default, required)
    try:
        vals = [int(x) for x in str(v).split(",") if x]
    except ValueError:
        raise ConfigError(f"{key} must be an integer list, got {v!r}") from None
    if not vals:
        raise ConfigError(f"{key} is empty")
    return vals


def _seed_list(cfg) -> list[int]:
    """``seed=s`` runs one seed, ``seeds=k`` runs seeds base..base+k-1."""
    if "seeds" in cfg.params:
        base = _int(cfg, "seed", 0)
        k = _int(cfg, "seeds")
        if k < 1:
            raise ConfigError("seeds must be positive")
        return list(range(base, base + k))
    if "seed" in cfg.params:
        return [_int(cfg, "seed")]
    raise ConfigError(f"{cfg.experiment} is randomized: give seed=... or seeds=...")


def _pmap(cfg, fn, items) -> list:
    if cfg.threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _load_colouring(path) -> Colouring:
    try:
        return parse_colouring(path)
    except OSError as e:
        raise ConfigError(str(e)) from None


def _load_cover(path):
    try:
        return parse_cover(path)
    except OSError as e:
        raise ConfigError(str(e)) from None


# experiments -----------------------------------------------------------------

def run_kuhn(cfg: ExperimentConfig) -> Outcome:
    rows, results = [], {}
    if "colouring" in cfg.params:
        phi = _load_colouring(cfg.params["colouring"])
        bad = check_cubical_sperner(phi)
        sigma, count = max_colours_per_cube(phi)
        results = {"N": phi.dim, "n": phi.n, "sperner_valid": bad is None,
                   "cube": sigma.to_text(), "count": count, "bound": phi.dim + 1}
        rows.append({"N": phi.dim, "n": phi.n, "seed": "", "count": count})
        code = VIOLATION if bad is None and count < phi.dim + 1 else OK
        return Outcome(results, rows, code)
    palette = _get(cfg, "palette", "binary")
    if palette not in PALETTE_MODES:
        raise ConfigError(f"palette must be one of {PALETTE_MODES}")
    seeds = _seed_list(cfg)
    sweeps = []
    code = OK
    for N in _ints(cfg, "N", required=True):
        for n in _ints(cfg, "n", required=True):
            def one(seed, N=N, n=n):
                return max_colours_per_cube(random_sperner_colouring(N, n, seed, palette))[1]
            counts = _pmap(cfg, one, seeds)
            worst = min(range(len(seeds)), key=lambda i: (counts[i], i))
            sweeps.append({"N": N, "n": n, "seeds": len(seeds), "min_count": counts[worst],
                           "worst_seed": seeds[worst], "bound": N + 1,
                           "holds": counts[worst] >= N + 1})
            rows.extend({"N": N, "n": n, "seed": s, "count": c} for s, c in zip(seeds, counts))
            if counts[worst] < N + 1:
                code = VIOLATION
    results = {"palette": palette, "sweeps": sweeps,
               "min_count": min(s["min_count"] for s in sweeps)}
    return Outcome(results, rows, code)


def _roundtrip_one(phi: Colouring) -> dict:
    cover = colouring_to_cover(phi)
    diam = max(cover.diameters().values())
    sigma, colours = rich_cube_via_cover(phi)
    pal = cube_palette(phi, sigma)
    return {"max_diameter": str(diam), "diameters_below_one": diam < 1,
            "cube": sigma.to_text(), "witnessed_colours": sorted(colours),
            "contained_in_palette": set(colours) <= pal,
            "max_colours_per_cube": max_colours_per_cube(phi)[1]}


def run_roundtrip(cfg: ExperimentConfig) -> Outcome:
    if "colouring" in cfg.params:
        phi = _load_colouring(cfg.params["colouring"])
        if check_cubical_sperner(phi) is not None:
            raise ConfigError("colouring violates the Sperner condition")
        cases = [("", phi)]
    else:
        palette = _get(cfg, "palette", "binary")
        cases = [(s, random_sperner_colouring(N, n, s, palette))
                 for N in _ints(cfg, "N", required=True)
                 for n in _ints(cfg, "n", required=True)
                 for s in _seed_list(cfg)]
    reports = _pmap(cfg, lambda c: _roundtrip_one(c[1]), cases)
    rows, code = [], OK
    for (seed, phi), r in zip(cases, reports):
        ok = (r["diameters_below_one"] and r["contained_in_palette"]
              and len(r["witnessed_colours"]) >= phi.dim + 1)
        rows.append({"N": phi.dim, "n": phi.n, "seed": seed,
                     "witnessed": len(r["witnessed_colours"]),
                     "max_colours_per_cube": r["max_colours_per_cube"],
                     "max_diameter": r["max_diameter"], "ok": ok})
        if not ok:
            code = VIOLATION
    results = {"cases": len(cases), "all_ok": code == OK}
    if len(cases) == 1:
        results["report"] = reports[0]
    return Outcome(results, rows, code)


def _cover_cases(cfg):
    if "cover" in cfg.params:
        return [("", _load_cover(cfg.params["cover"]))]
    return [(s, random_open_cover(N, s)) for N in _ints(cfg, "N", required=True)
            for s in _seed_list(cfg)]


def run_lebesgue(cfg: ExperimentConfig) -> Outcome:
    cases = _cover_cases(cfg)
    for _, cover in cases:
        gap = uncovered_point(cover)
        if gap is not None:
            raise ConfigError(f"cover misses the point {tuple(str(c) for c in gap)}")

    def one(case):
        cover = case[1]
        x, labels = max_multiplicity_point(cover)
        small = max(cover.diameters().values()) < 1
        return {"point": [str(c) for c in x], "multiplicity": len(labels),
                "members": [str(l) for l in labels], "all_diameters_below_one": small}

    reports = _pmap(cfg, one, cases)
    rows, code = [], OK
    for (seed, cover), r in zip(cases, reports):
        bound_ok = not r["all_diameters_below_one"] or r["multiplicity"] >= cover.dim + 1
        rows.append({"N": cover.dim, "seed": seed, "multiplicity": r["multiplicity"],
                     "bounded": r["all_diameters_below_one"], "ok": bound_ok})
        if not bound_ok:
            code = VIOLATION
    results = reports[0] if len(cases) == 1 else {
        "cases": len(cases), "min_multiplicity": min(r["multiplicity"] for r in reports)}
    return Outcome(results, rows, code)


def run_subdivide(cfg: ExperimentConfig) -> Outcome:
    rows, code, out = [], OK, []
    for seed, cover in _cover_cases(cfg):
        tree = subdivision.adaptive_subdivide(cover, cfg.max_level, threads=cfg.threads)
        finite, depth = subdivision.well_founded_check(tree)
        rec = {"N": cover.dim, "seed": seed, "leaves": len(tree.leaves),
               "refused": len(tree.refused), "depth": depth, "finite": finite,
               "accepted_volume": str(tree.leaf_volume()),
               "misfitted": len(subdivision.verify_leaves(tree, cover))}
        if finite:
            stats = subdivision.complex_colour_stats(tree, cover)
            rec.update(max_colours=stats.max_count, face_violations=stats.face_violations,
                       histogram=json.dumps({str(k): v for k, v in sorted(stats.histogram.items())}))
        else:
            code = max(code, BUDGET)
        if rec["misfitted"] or (finite and tree.leaf_volume() != 1):
            code = VIOLATION
        rows.append(rec)
        out.append(tree)
        if "export" in cfg.params and len(out) == 1:
            Path(cfg.params["export"]).write_text(tree.to_jsonl())
    results = rows[0] if len(rows) == 1 else {"cases": len(rows)}
    if len(rows) == 1:
        results = dict(results, leaf_records=[l.to_record() for l in out[0].leaves])
    return Outcome(results, rows, code)


def run_nerve(cfg: ExperimentConfig) -> Outcome:
    rows, code = [], OK
    single = None
    for seed, cover in _cover_cases(cfg):
        poset = chains.build_nerve_poset(cover, cfg.max_size, threads=cfg.threads)
        length = chains.max_chain_length(poset)
        _, labels = max_multiplicity_point(cover)
        need = min(len(labels), cfg.max_size)
        rec = {"N": cover.dim, "seed": seed, "elements": len(poset.elements),
               "max_chain": length, "multiplicity": len(labels), "partial": poset.partial,
               "downward_closed": poset.is_downward_closed()}
        if poset.partial:
            code = max(code, BUDGET)
        elif length < need or not rec["downward_closed"]:
            code = VIOLATION
        rows.append(rec)
        single = poset
    results = dict(rows[0]) if len(rows) == 1 else {"cases": len(rows)}
    if len(rows) == 1:
        results["poset"] = single.to_adjacency()
    return Outcome(results, rows, code)


def run_c0(cfg: ExperimentConfig) -> Outcome:
    n = _int(cfg, "n", 2)
    name = _get(cfg, "oracle", "canonical")
    if name not in chains.ORACLES:
        raise ConfigError(f"oracle must be one of {sorted(chains.ORACLES)}")
    seed = _int(cfg, "seed", required=name != "canonical") if name != "canonical" else 0
    oracle = chains.ORACLES[name](n, seed)
    res = chains.extension_chain_search(oracle, cfg.depth, cfg.window, cfg.step,
                                        budget=_int(cfg, "budget", 200_000))
    problems = chains.check_extension_chain(res.chain, oracle, res.windows)
    results = dict(res.to_dict(), oracle=name, n=n, checker_problems=problems)
    rows = [{"k": k + 1, "sigma": s.to_text(), "colour": t, "window": w}
            for k, ((s, t), w) in enumerate(zip(res.chain, res.windows))]
    if problems:
        code = VIOLATION
    elif not res.complete:
        code = BUDGET if res.exhausted else OK
    else:
        code = OK
    return Outcome(results, rows, code)


def run_brouwer(cfg: ExperimentConfig) -> Outcome:
    name = _get(cfg, "map", "rotate")
    N = _int(cfg, "N", 2)
    extra = {k: v for k, v in cfg.params.items() if k in ("c", "coeffs", "t", "axis", "amount")}
    try:
        f = fixedpoint.make_map(name, N, extra)
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(str(e)) from None
    results, rows, code = [], [], OK
    for m in _ints(cfg, "m", "8,16,32,64"):
        r = fixedpoint.brouwer_approx(f, m, _int(cfg, "escalations", 4))
        if "eps" in cfg.params:
            exp = fixedpoint.coordinate_fixed_experiment(f, Fraction(cfg.params["eps"]), r.m)
            d = dict(r.to_dict(), coordinate_experiment=exp.to_dict())
        else:
            d = r.to_dict()
        results.append(d)
        rows.append({"m": m, "m_used": r.m, "residual": str(r.residual),
                     "residual_float": float(r.residual), "escalations": r.escalations,
                     "found": r.found})
        if not r.found:
            code = BUDGET
    return Outcome({"map": name, "N": N, "runs": results}, rows, code)


def run_emulate(cfg: ExperimentConfig) -> Outcome:
    if "cover" in cfg.params:
        cover = _load_cover(cfg.params["cover"])
    else:
        if "colouring" in cfg.params:
            phi = _load_colouring(cfg.params["colouring"])
        else:
            N, n = _int(cfg, "N", 2), _int(cfg, "n", 3)
            seeds = _seed_list(cfg)
            phi = random_sperner_colouring(N, n, seeds[0], _get(cfg, "palette", "wide"))
        if check_cubical_sperner(phi) is not None:
            raise ConfigError("colouring violates the Sperner condition")
        cover = colouring_to_cover(phi)
    try:
        scale, image = choose_grid_scale(cover, _int(cfg, "max_scale", 24))
    except ValueError as e:
        return Outcome({"error": str(e)}, [], BUDGET, [str(e)])
    econf = EmulationConfig(
        min_zeros=_int(cfg, "min_zeros", 1), min_new_coords=_int(cfg, "min_new_coords", 2),
        policy=_get(cfg, "policy", "coinfinite"), budget=_int(cfg, "budget", 50_000),
        seed=_int(cfg, "seed", 0))
    trace = emulate_inductive_search(image, econf)
    audits = audit_trace(trace, image)
    verbatim = hat_unit_ball_escapes(trace, image)
    results = {"grid_scale": scale, "trace": trace.to_dict(), "audits": audits,
               "verbatim_unit_ball_escapes": verbatim}
    rows = [{"k": k + 1, "sigma": s.sigma.to_text(), "A": sorted(s.A.members), "L": s.L,
             "U": str(s.U)} for k, s in enumerate(trace.steps)]
    if trace.status == "failed" or (trace.success and not all(audits.values())):
        code = VIOLATION
    elif any(s.sampled for s in trace.steps) and not trace.success:
        code = BUDGET
    else:
        code = OK
    return Outcome(results, rows, code)


EXPERIMENTS = {
    "kuhn-verify": run_kuhn,
    "reduction-roundtrip": run_roundtrip,
    "lebesgue-witness": run_lebesgue,
    "subdivide": run_subdivide,
    "nerve-chains": run_nerve,
    "c0-chains": run_c0,
    "brouwer": run_brouwer,
    "emulate-induction": run_emulate,
}
# the published interface name of the replay experiment
EXPERIMENTS["emulate-5.1"] = run_emulate


def run_experiment(cfg: ExperimentConfig) -> tuple[str, int]:
    """Run one experiment and render its report; returns ``(text, exit_code)``."""
    start = time.perf_counter()
    outcome = EXPERIMENTS[cfg.experiment](cfg)
    elapsed = time.perf_counter() - start
    if cfg.format == "csv":
        buf = io.StringIO()
        fields = list(dict.fromkeys(k for r in outcome.rows for k in r))
        if cfg.timing:
            fields.append("wall_clock_s")
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in outcome.rows:
            w.writerow(dict(r, wall_clock_s=f"{elapsed:.3f}") if cfg.timing else r)
        return buf.getvalue(), outcome.code
    report = {"config": cfg.echo(), "exit_code": outcome.code, "results": outcome.results,
              "rows": outcome.rows}
    if cfg.timing:
        report["wall_clock_s"] = round(elapsed, 3)
    return json.dumps(report, indent=2, default=str) + "\n", outcome.code


def _parse_params(items: list[str]) -> dict:
    params = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"expected key=value, got {item!r}")
        params[key] = value
    return params


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spernerkit", description=__doc__.split("\n\n")[0])
    p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("params", nargs="*", metavar="key=value")
    p.add_argument("--max-level", type=int, default=20)
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--window", type=int, default=4, help="first window width for c0-chains")
    p.add_argument("--step", type=int, default=2, help="window growth per chain step")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--timing", action="store_true", help="add wall-clock time to the report")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return PARSE_ERROR if e.code else OK
    try:
        cfg = ExperimentConfig(
            args.experiment, _parse_params(args.params), args.max_level, args.max_size,
            args.depth, args.window, args.step, args.output, args.format, args.threads,
            args.timing)
        text, code = run_experiment(cfg)
    except (ConfigError, ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return PARSE_ERROR
    out = cfg.output
    if out is None and os.environ.get(OUTPUT_DIR_ENV):
        out = str(Path(os.environ[OUTPUT_DIR_ENV]) / f"{cfg.experiment}.{cfg.format}")
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
