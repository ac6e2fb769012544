"""Command-line runner: ``python -m sdebye <mode> --config run.yaml --out DIR``.

Every required field must be present in the config; missing or invalid
fields are collected and reported together.  Each run writes a
``manifest.json`` holding the config hash, library versions and output files.
Exit codes: 0 ok, 2 bad config, 3 blow-up, 4 no contraction.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import platform
import sys
from pathlib import Path

import numpy as np
import yaml

from . import io
from .diagnostics import balance_terms, h1_balance_residual, verdict_table
from .picard import NoContraction, picard_solve
from .profiles import PROFILES, initial_profile
from .propagators import BlowUpError, ModelParams, SimState, evolve, state_norms
from .spacetime import SpaceTimeFunction, TimeWindow
from .strichartz import growth_fit, representation_counts
from .torus import Field, TorusGrid, forward, inverse
from .xsb import cutoff_scaling_ratio, triple_norm, xsb_norm

log = logging.getLogger(__name__)

MODES = ("simulate", "picard", "strichartz", "xsb", "classify")
EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_NO_CONTRACTION = 0, 2, 3, 4
VERSION = "0.1.0"


class ConfigError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


# -- validation ---------------------------------------------------------------


class _Checker:
    """Collects field-level problems while reading a nested mapping."""

    def __init__(self, cfg):
        self.cfg = cfg if isinstance(cfg, dict) else {}
        self.problems = [] if isinstance(cfg, dict) else ["<root>: expected a mapping"]

    def get(self, path, kind, check=None, why="", optional=False):
        node = self.cfg
        for key in path.split("."):
            if not isinstance(node, dict) or key not in node:
                if not optional:
                    self.problems.append(f"{path}: required field is missing")
                return None
            node = node[key]
        ok = _is_kind(node, kind)
        if ok and check is not None:
            try:
                ok = bool(check(node))
            except TypeError:
                ok = False
        if not ok:
            self.problems.append(f"{path}: {why or 'expected ' + kind}, got {node!r}")
            return None
        return node

    def done(self):
        if self.problems:
            raise ConfigError(self.problems)


def _is_kind(x, kind):
    if kind == "int":
        return isinstance(x, int) and not isinstance(x, bool)
    if kind == "number":
        return isinstance(x, (int, float)) and not isinstance(x, bool)
    if kind == "str":
        return isinstance(x, str)
    if kind == "map":
        return isinstance(x, dict)
    if kind == "ints":
        return isinstance(x, list) and len(x) > 0 and all(_is_kind(v, "int") for v in x)
    if kind == "numbers":
        return isinstance(x, list) and len(x) > 0 and all(_is_kind(v, "number") for v in x)
    if kind == "list":
        return isinstance(x, list)
    raise ValueError(kind)


def _grid(c: _Checker):
    n = c.get("grid.n", "int", lambda v: v in (1, 2, 3), "must be 1, 2 or 3")
    M = c.get("grid.M", "int", lambda v: 4 <= v <= 1024 and v % 2 == 0, "must be even with 4 <= M <= 1024")
    return (n, M)


def _model(c: _Checker):
    K = c.get("model.K", "number", lambda v: v > 0, "must be positive")
    eps = c.get("model.eps", "int", lambda v: v in (1, -1), "must be +1 or -1")
    alpha = c.get("model.alpha", "number", lambda v: v > 0, "must be positive")
    return (K, eps, alpha)


def _initial(c: _Checker):
    init = c.cfg.get("initial")
    if isinstance(init, dict) and ("u_file" in init or "v_file" in init):
        u = c.get("initial.u_file", "str")
        v = c.get("initial.v_file", "str")
        return "files", {"u_file": u, "v_file": v}
    name = c.get("initial.profile", "str", lambda v: v in PROFILES, f"must be one of {list(PROFILES)}")
    params = c.get("initial.params", "map", optional=True) or {}
    return name, params


def _window(c: _Checker, prefix):
    length = c.get(f"{prefix}.window_length", "number", lambda v: v > 0, "must be positive")
    samples = c.get(f"{prefix}.samples", "int", lambda v: v >= 2 and v % 2 == 0, "must be even and >= 2")
    delta = c.get(f"{prefix}.delta", "number", lambda v: v > 0, "must be positive")
    if None not in (length, delta) and not 4 * delta < length:
        c.problems.append(f"{prefix}.delta: need 4*delta < window_length, got {delta} and {length}")
    return length, samples, delta


def validate(mode: str, cfg) -> dict:
    """Return the normalised settings for ``mode`` or raise :class:`ConfigError`."""
    c = _Checker(cfg)
    if mode not in MODES:
        raise ConfigError([f"mode: must be one of {list(MODES)}, got {mode!r}"])
    declared = c.cfg.get("mode")
    if declared is not None and declared != mode:
        c.problems.append(f"mode: config declares {declared!r} but subcommand is {mode!r}")
    out = {"mode": mode}
    if mode in ("simulate", "picard"):
        out["grid"] = _grid(c)
        out["model"] = _model(c)
        out["initial"] = _initial(c)
    if mode == "simulate":
        out["dt"] = c.get("numerics.dt", "number", lambda v: v > 0, "must be positive")
        out["T"] = c.get("numerics.T", "number", lambda v: v > 0, "must be positive")
        out["save_every"] = c.get("numerics.save_every", "int", lambda v: v >= 1, "must be >= 1")
        if None not in (out["dt"], out["T"]) and out["dt"] > out["T"]:
            c.problems.append("numerics.dt: must not exceed numerics.T")
    elif mode == "picard":
        out["window"] = _window(c, "numerics")
        out["tol"] = c.get("numerics.tol", "number", lambda v: v > 0, "must be positive")
        out["kmax"] = c.get("numerics.kmax", "int", lambda v: v >= 1, "must be >= 1")
        out["s"] = c.get("numerics.s", "number", lambda v: v >= 0, "must be non-negative")
    elif mode == "strichartz":
        out["N_values"] = c.get("strichartz.N_values", "ints", lambda v: min(v) >= 0, "must be non-negative integers")
        out["budget"] = c.get("strichartz.count_budget", "int", lambda v: v >= 1, "must be >= 1")
        if out["N_values"] and out["budget"] and max(out["N_values"]) > out["budget"]:
            c.problems.append(f"strichartz.N_values: max N exceeds count_budget {out['budget']}")
    elif mode == "xsb":
        out["grid"] = _grid(c)
        out["window"] = _window(c, "window")
        out["s"] = c.get("sweep.s", "number")
        out["b"] = c.get("sweep.b", "number")
        out["b_prime"] = c.get("sweep.b_prime", "number")
        out["T_values"] = c.get("sweep.T_values", "numbers", lambda v: all(0 < t < 1 for t in v), "values must lie in (0, 1)")
        out["atoms"] = c.get("input.atoms", "list", lambda v: len(v) > 0 and all(len(a) == 3 for a in v),
                             "must be a non-empty list of [xi, lambda, weight]")
        if None not in (out["b"], out["b_prime"]) and not -0.5 < out["b_prime"] <= out["b"] < 0.5:
            c.problems.append("sweep.b_prime: need -1/2 < b_prime <= b < 1/2")
    elif mode == "classify":
        out["n"] = c.get("classify.n", "ints", lambda v: min(v) >= 1, "dimensions must be >= 1")
        out["alpha"] = c.get("classify.alpha", "numbers", lambda v: min(v) > 0, "must be positive")
        out["s"] = c.get("classify.s", "numbers")
    c.done()
    return out


# -- runs --------------------------------------------------------------------------


def _profile(settings, seed):
    n, M = settings["grid"]
    grid = TorusGrid(n, M)
    name, params = settings["initial"]
    if name == "files":
        return grid, _load_initial(grid, params)
    params = dict(params)
    if name == "random_bandlimited":
        params.setdefault("seed", seed)
    try:
        return grid, initial_profile(name, grid, **params)
    except TypeError as exc:
        raise ConfigError([f"initial.params: {exc}"]) from None


def _load_initial(grid, files):
    fields = []
    for key in ("u_file", "v_file"):
        try:
            obj = io.load_field(files[key])
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError([f"initial.{key}: {exc}"]) from None
        if obj.grid != grid:
            raise ConfigError([f"initial.{key}: stored grid {obj.grid} does not match the configured grid"])
        fields.append(obj if isinstance(obj, Field) else inverse(obj))
    return fields[0], fields[1]


def _params(settings):
    K, eps, alpha = settings["model"]
    return ModelParams(K, eps, alpha, dim=settings["grid"][0])


def run_simulate(settings, seed, out: Path) -> list[Path]:
    grid, (u0, v0) = _profile(settings, seed)
    traj = evolve(SimState(0.0, u0, v0, _params(settings)), settings["T"], settings["dt"], settings["save_every"])
    residual = {}
    if len(traj) >= 3:
        res = h1_balance_residual(traj)
        residual = {round(t, 12): r for t, r in zip(res.times, res.values)}
    rows, brows = [], []
    for st in traj.states:
        nrm, bal = state_norms(st), balance_terms(st)
        r = residual.get(round(st.t, 12), float("nan"))
        rows.append([st.t, nrm["u_l2"], nrm["u_h1"], nrm["v_l2"], bal.grad_energy, bal.coupling, bal.potential_p])
        brows.append([st.t, bal.grad_energy, bal.coupling, bal.potential_p, r])
    final = traj.states[-1]
    return [
        io.write_csv(out / "trajectory.csv", ["t", "u_l2", "u_h1", "v_l2", "grad_energy", "coupling", "potential_p"], rows),
        io.write_csv(out / "balance.csv", ["t", "grad_energy", "coupling", "potential_p", "residual"], brows),
        io.save_field(out / "u_final.csv", final.u),
        io.save_field(out / "v_final.csv", final.v),
    ]


def run_picard(settings, seed, out: Path) -> list[Path]:
    grid, (u0, v0) = _profile(settings, seed)
    window = TimeWindow(*settings["window"])
    try:
        u, hist = picard_solve(forward(u0), v0, _params(settings), window, settings["tol"], settings["kmax"], settings["s"])
    except NoContraction as exc:
        io.write_csv(out / "picard_history.csv", ["k", "ratio"], [[k + 1, r] for k, r in enumerate(exc.ratios)])
        raise
    return [
        io.write_csv(out / "picard_history.csv", ["k", "diff_norm", "ratio"], hist.rows()),
        io.save_spacetime(out / "fixed_point.npz", u),
        io.write_json(out / "picard_summary.json", {"converged": hist.converged, "iterations": hist.iterations}),
    ]


def run_strichartz(settings, seed, out: Path) -> list[Path]:
    paths, maxima = [], []
    for N in settings["N_values"]:
        table = representation_counts(N, budget=settings["budget"])
        maxima.append(table.max_count)
        paths.append(io.write_csv(out / f"counts_N{N}.csv", ["n", "j", "count"], zip(table.n, table.j, table.count)))
    report = {"N": settings["N_values"], "max_counts": maxima}
    eligible = [(N, m) for N, m in zip(settings["N_values"], maxima) if N >= 8]
    if len({N for N, _ in eligible}) >= 4:
        report["fit"] = growth_fit(*zip(*eligible)).report()
    else:
        report["fit"] = None
        report["fit_skipped"] = "growth fit needs at least four N >= 8"
    paths.append(io.write_json(out / "growth_fit.json", report))
    return paths


def run_xsb(settings, seed, out: Path) -> list[Path]:
    grid = TorusGrid(*settings["grid"])
    window = TimeWindow(*settings["window"])
    try:
        h = sum(SpaceTimeFunction.atom(grid, window, xi, lam, w) for xi, lam, w in settings["atoms"])
    except (ValueError, IndexError) as exc:
        raise ConfigError([f"input.atoms: {exc}"]) from None
    s, b, bp = settings["s"], settings["b"], settings["b_prime"]
    rows = [[s, b, bp, "xsb", xsb_norm(h, s, b)], [s, 0.5, 0.5, "triple", triple_norm(h, s)]]
    for T in settings["T_values"]:
        try:
            rows.append([s, b, bp, T, cutoff_scaling_ratio(h, T, s, b, bp)])
        except ValueError as exc:
            raise ConfigError([f"sweep.T_values: {exc}"]) from None
    return [io.write_csv(out / "norm_sweep.csv", ["s", "b", "b_prime", "T_or_shell", "value"], rows)]


def run_classify(settings, seed, out: Path) -> list[Path]:
    rows = verdict_table(settings["n"], settings["alpha"], settings["s"])
    return [io.write_csv(out / "verdicts.csv", ["n", "alpha", "s", "verdict", "theorem_tag"], rows)]


RUNNERS = {
    "simulate": run_simulate,
    "picard": run_picard,
    "strichartz": run_strichartz,
    "xsb": run_xsb,
    "classify": run_classify,
}


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _manifest(mode, cfg, seed, settings, paths, out: Path, status: str):
    canon = json.dumps(cfg, sort_keys=True, default=str).encode()
    return io.write_json(out / "manifest.json", {
        "mode": mode,
        "status": status,
        "config_sha256": _sha256(canon),
        "seed": seed,
        "versions": {"sdebye": VERSION, "numpy": np.__version__, "python": platform.python_version()},
        "grid": list(settings["grid"]) if "grid" in settings else None,
        "budgets": {"count_budget": settings.get("budget")},
        "outputs": {p.name: _sha256(p.read_bytes()) for p in sorted(paths)},
    })


def run(mode: str, config_path, out_dir, seed: int | None = None) -> int:
    """Execute one run; returns the process exit code."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        text = Path(config_path).read_text()
        cfg = yaml.safe_load(text)
    except (OSError, yaml.YAMLError) as exc:
        return _fail(out, EXIT_CONFIG, "config", [f"<file>: {exc}"])
    try:
        settings = validate(mode, cfg)
        cfg_seed = cfg.get("seed")
        if cfg_seed is not None and not _is_kind(cfg_seed, "int"):
            raise ConfigError([f"seed: expected int, got {cfg_seed!r}"])
        root_seed = seed if seed is not None else cfg_seed
        if root_seed is None:
            raise ConfigError(["seed: required field is missing (set it in the config or pass --seed)"])
        paths = RUNNERS[mode](settings, root_seed, out)
    except ConfigError as exc:
        return _fail(out, EXIT_CONFIG, "config", exc.problems)
    except BlowUpError as exc:
        return _fail(out, EXIT_BLOWUP, "blow-up", [str(exc)], {"t": exc.t, "norms": exc.norms})
    except NoContraction as exc:
        return _fail(out, EXIT_NO_CONTRACTION, "no-contraction", [str(exc)], {"ratios": list(exc.ratios)})
    _manifest(mode, cfg, root_seed, settings, paths, out, "ok")
    return EXIT_OK


def _fail(out: Path, code: int, kind: str, problems, extra=None) -> int:
    report = {"error": kind, "exit_code": code, "problems": problems}
    if extra:
        report.update(extra)
    io.write_json(out / "error.json", report)
    for p in problems:
        print(f"error: {p}", file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdebye", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="root seed (overrides the config)")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return run(args.mode, args.config, args.out, args.seed)


if __name__ == "__main__":
    sys.exit(main())
