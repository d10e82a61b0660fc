"""Command-line experiment runner.

    fecoll approx   --domain pentagon --function f4 --N 10:5:50 --out runs/f4
    fecoll solve    --preset example1 --N 10:5:50 --boundary linear:5 --out runs/ex1
    fecoll nodes    --domain diamond --N 10 --gamma 4 --out runs/nodes
    fecoll spectrum --preset example2 --N 20 --out runs/spec
    fecoll run      --config runs/ex1/metadata.json --out runs/ex1-again

A config file is a JSON object whose keys are the option names below (or a
metadata document written by a previous run, whose ``config`` entry is
used). Values from the file override command-line flags.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import io
from .extension import fit, fit_points, max_error
from .frames import FrameSpec, linear_index
from .geometry import DOMAIN_NAMES, SPACINGS, GeometryError, boundary_nodes, catalog, corner_refine
from .linalg import SolverError, plunge_region_size
from .nodes import GridSpec, NodeSet, UndersampledError, grid_nodes, random_interior
from .pde import BoundaryPolicy, CoefficientError, RandomNodes, solve
from .presets import EXAMPLES, FUNCTIONS, example, function

log = logging.getLogger("fecoll")

COMMANDS = ("approx", "solve", "nodes", "spectrum")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    domain: str | None = None
    function: str | None = None
    preset: str | None = None
    N: list[int] = field(default_factory=list)
    gamma: float = 4.0
    T: float = 2.0
    eps: float = 1e-14
    boundary: str | None = None
    spacing: str | None = None
    seed: int = 0
    eval_density: int = 2
    corner_extra: int = 0
    corner_radius: float = 0.1
    max_N: int = 60
    coefficients: bool = False
    spectra: bool = False

    def echo(self) -> dict:
        return asdict(self)


def parse_sweep(text) -> list[int]:
    """``start:step:stop`` (inclusive), a comma list, or a single integer."""
    if isinstance(text, (list, tuple)):
        return [_as_int(v, "N") for v in text]
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            start, step, stop = parts
            if step <= 0:
                raise ConfigError(f"N sweep step must be positive, got {step}")
            return list(range(start, stop + 1, step))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"N must be 'start:step:stop', a comma list or an integer, got {text!r}") from None


def _as_int(v, name):
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise ConfigError(f"{name} must be an integer, got {v!r}")
    try:
        f = float(v)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {v!r}") from None
    if not f.is_integer():
        raise ConfigError(f"{name} must be an integer, got {v!r}")
    return int(f)


def _as_float(v, name):
    if isinstance(v, bool):
        raise ConfigError(f"{name} must be a number, got {v!r}")
    try:
        return float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {v!r}") from None


def _as_bool(v, name):
    if isinstance(v, bool):
        return v
    raise ConfigError(f"{name} must be true or false, got {v!r}")


def load_config_file(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if isinstance(doc, dict) and isinstance(doc.get("config"), dict):
        doc = doc["config"]
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    unknown = sorted(set(doc) - {f.name for f in fields(ExperimentConfig)})
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return doc


def build_config(flags: dict, file_values: dict | None = None) -> ExperimentConfig:
    """Merge defaults, flags and file values (file wins) and validate."""
    raw = {k: v for k, v in flags.items() if v is not None}
    raw.update(file_values or {})
    command = raw.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {command!r}")
    cfg = ExperimentConfig(command=command)
    if "N" not in raw:
        raise ConfigError("N is required")
    cfg.N = parse_sweep(raw["N"])
    for name in ("gamma", "T", "eps", "corner_radius"):
        setattr(cfg, name, _as_float(raw.get(name, getattr(cfg, name)), name))
    for name in ("seed", "eval_density", "corner_extra", "max_N"):
        setattr(cfg, name, _as_int(raw.get(name, getattr(cfg, name)), name))
    for name in ("coefficients", "spectra"):
        setattr(cfg, name, _as_bool(raw.get(name, getattr(cfg, name)), name))
    for name in ("domain", "function", "preset", "boundary", "spacing"):
        v = raw.get(name)
        if v is not None and not isinstance(v, str):
            raise ConfigError(f"{name} must be a string, got {v!r}")
        setattr(cfg, name, v)
    validate(cfg)
    for f in fields(ExperimentConfig):
        if f.name not in raw:
            log.info("default %s = %r", f.name, getattr(cfg, f.name))
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    errs = []
    if not cfg.N:
        errs.append("N list is empty")
    elif any(b <= a for a, b in zip(cfg.N, cfg.N[1:])):
        errs.append(f"N list must be strictly ascending, got {cfg.N}")
    elif cfg.N[0] < 1:
        errs.append("N values must be positive")
    elif cfg.N[-1] > cfg.max_N:
        errs.append(f"N = {cfg.N[-1]} exceeds the --max-N cap {cfg.max_N}")
    if not cfg.gamma > 0:
        errs.append("gamma must be positive")
    if not cfg.T > 1:
        errs.append("T must exceed 1 (the domain lives in [-1, 1]^2)")
    if not 0 < cfg.eps < 1:
        errs.append("eps must lie in (0, 1)")
    if cfg.eval_density < 1:
        errs.append("eval_density must be >= 1")
    if cfg.corner_extra < 0 or not cfg.corner_radius > 0:
        errs.append("corner_extra must be >= 0 and corner_radius > 0")
    if cfg.seed < 0:
        errs.append("seed must be non-negative")
    if cfg.preset is not None and cfg.preset not in EXAMPLES:
        errs.append(f"unknown preset {cfg.preset!r}; valid: {', '.join(EXAMPLES)}")
    if cfg.domain is not None and cfg.domain not in DOMAIN_NAMES:
        errs.append(f"unknown domain {cfg.domain!r}; valid: {', '.join(DOMAIN_NAMES)}")
    if cfg.function is not None and cfg.function not in FUNCTIONS:
        errs.append(f"unknown function {cfg.function!r}; valid: {', '.join(FUNCTIONS)}")
    if cfg.spacing is not None and cfg.spacing not in SPACINGS:
        errs.append(f"unknown spacing {cfg.spacing!r}; valid: {', '.join(SPACINGS)}")
    if cfg.boundary is not None:
        try:
            BoundaryPolicy.parse(cfg.boundary)
        except ValueError as exc:
            errs.append(str(exc))
    if cfg.command == "solve" and cfg.preset is None:
        errs.append("solve needs --preset")
    if cfg.command == "approx":
        if cfg.function is None and cfg.preset is None:
            errs.append("approx needs --function (with --domain) or --preset")
        if cfg.function is not None and cfg.domain is None:
            errs.append("approx with --function needs --domain")
    if cfg.command in ("nodes", "spectrum") and cfg.domain is None and cfg.preset is None:
        errs.append(f"{cfg.command} needs --domain or --preset")
    if errs:
        raise ConfigError("; ".join(errs))


class NumericalFailure(RuntimeError):
    pass


def _spec(cfg: ExperimentConfig, N: int) -> FrameSpec:
    return FrameSpec(N, cfg.T, cfg.eps)


def _policy(cfg: ExperimentConfig) -> BoundaryPolicy | None:
    if cfg.boundary is not None:
        return BoundaryPolicy.parse(cfg.boundary)
    if cfg.preset is not None:
        return example(cfg.preset).policy
    return None


def _spacing(cfg: ExperimentConfig) -> str:
    if cfg.spacing is not None:
        return cfg.spacing
    return example(cfg.preset).spacing if cfg.preset else "arclength"


def _domain_name(cfg: ExperimentConfig) -> str:
    return cfg.domain or example(cfg.preset).domain


def _grid(cfg: ExperimentConfig, N: int) -> GridSpec | RandomNodes:
    if cfg.preset is not None:
        return example(cfg.preset).nodes_for(N, cfg.gamma, cfg.T, cfg.seed)
    return GridSpec.for_frame(N, cfg.gamma, cfg.T)


def _approx_once(cfg, N):
    spec = _spec(cfg, N)
    domain = catalog(_domain_name(cfg))
    if cfg.function is not None:
        f = function(cfg.function)
    elif cfg.preset is not None:
        f = example(cfg.preset).solution.u
    else:
        f = lambda x, y: np.zeros_like(x)  # noqa: E731
    grid = _grid(cfg, N)
    if isinstance(grid, RandomNodes):
        pts = random_interior(domain, int(round(grid.factor * spec.size)), grid.seed)
        eval_grid = GridSpec.for_frame(N, cfg.gamma, cfg.T)
        ap = fit_points(f, pts, spec, meta={"domain": domain.name, "seed": grid.seed}, grid=eval_grid)
    else:
        ap = fit(f, domain, spec, grid)
    err = max_error(ap, f, domain, cfg.eval_density)
    rec = {
        "domain": domain.name,
        "N": N,
        "N_Lambda": spec.size,
        "N_Omega": ap.node_meta["N_Omega"],
        "gamma": cfg.gamma,
        "T": cfg.T,
        "eps": cfg.eps,
        "max_error": err,
        "rank_eps": ap.fit_report.rank_eps,
        "cond": ap.fit_report.cond,
    }
    return ap, ap.fit_report, rec


def _solve_once(cfg, N):
    spec = _spec(cfg, N)
    preset = example(cfg.preset)
    problem = preset.problem(catalog(cfg.domain) if cfg.domain else None)
    sol = solve(problem, spec, _policy(cfg), _grid(cfg, N), cfg.eval_density,
                corner_extra=cfg.corner_extra, corner_radius=cfg.corner_radius, spacing=_spacing(cfg))
    meta = sol.metadata()
    rec = {"preset": preset.name, "domain": problem.domain.name, "N": N, "N_Lambda": spec.size,
           "N_B_policy": meta["N_B_policy"], "spacing": _spacing(cfg), "counts": meta["counts"],
           "gamma": cfg.gamma, "T": cfg.T, "eps": cfg.eps, "max_error": sol.max_error,
           "rank_eps": sol.report.rank_eps, "cond": sol.report.cond}
    return sol.approximant, sol.report, rec


def _nodes_once(cfg, N):
    spec = _spec(cfg, N)
    domain = catalog(_domain_name(cfg))
    grid = _grid(cfg, N)
    policy = _policy(cfg)
    bnd = None
    if policy is not None:
        bnd = boundary_nodes(domain, policy(N, spec.size), _spacing(cfg))
        if cfg.corner_extra:
            bnd = corner_refine(bnd, domain, cfg.corner_extra, cfg.corner_radius)
    context = "pde" if bnd is not None else "approx"
    if isinstance(grid, RandomNodes):
        pts = random_interior(domain, int(round(grid.factor * spec.size)), grid.seed)
        ns = NodeSet(pts, np.empty((0, 2)) if bnd is None else bnd, None, grid.seed, context)
    else:
        ns = grid_nodes(domain, grid, bnd, context)
    rec = {"domain": domain.name, "N": N, "N_Lambda": spec.size, "gamma": cfg.gamma, "T": cfg.T,
           "seed": cfg.seed, "N_B_policy": str(policy) if policy else None, "counts": ns.metadata()}
    if isinstance(grid, GridSpec):
        rec.update(M_x=grid.Mx, M_y=grid.My)
    return ns, rec


def run(cfg: ExperimentConfig, out: Path) -> list[dict]:
    """Execute a validated config, writing artifacts under ``out``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    records: list[dict] = []
    curve: list[tuple[int, float]] = []
    files: list[str] = []

    def flush():
        payload = {"config": cfg.echo(), "records": records, "files": sorted(set(files))}
        io.write_json(out / "metadata.json", payload)

    for N in cfg.N:
        t0 = time.perf_counter()
        log.info("%s N=%d", cfg.command, N)
        try:
            if cfg.command == "nodes":
                ns, rec = _nodes_once(cfg, N)
                name = f"nodes_N{N}.csv"
                io.write_nodes(out / name, ns.interior, ns.boundary)
                files.append(name)
            else:
                pde = cfg.command == "solve" or (cfg.command == "spectrum" and cfg.preset and not cfg.function)
                runner = _solve_once if pde else _approx_once
                ap, report, rec = runner(cfg, N)
                rec["plunge_size"] = plunge_region_size(report, cfg.eps)
                if cfg.command == "spectrum" or cfg.spectra:
                    name = f"spectrum_N{N}.csv"
                    io.write_spectrum(out / name, report.singular_values)
                    files.append(name)
                    rec["spectrum_file"] = name
                if cfg.coefficients:
                    name = f"coefficients_N{N}.csv"
                    io.write_coefficients(out / name, linear_index(ap.spec), ap.fourier_coefficients)
                    files.append(name)
                if cfg.command != "spectrum":
                    err = rec["max_error"]
                    curve.append((N, math.nan if err is None else err))
                    io.write_error_curve(out / "errors.csv", curve)
                    files.append("errors.csv")
        except (SolverError, UndersampledError, CoefficientError, GeometryError, np.linalg.LinAlgError,
                MemoryError, ValueError) as exc:
            flush()
            raise NumericalFailure(f"N={N}: {exc}") from exc
        rec["runtime_ms"] = 1e3 * (time.perf_counter() - t0)
        records.append(rec)
        flush()
    return records


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fecoll", description="Fourier extension collocation experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress and applied defaults")
    common.add_argument("--config", help="JSON config (or a previous metadata.json); overrides flags")
    common.add_argument("--out", default="fecoll-out", help="output directory (default: fecoll-out)")
    common.add_argument("--domain", choices=DOMAIN_NAMES)
    common.add_argument("--function", choices=list(FUNCTIONS))
    common.add_argument("--preset", choices=list(EXAMPLES))
    common.add_argument("--N", help="per-axis sizes: start:step:stop, comma list or single value")
    common.add_argument("--gamma", type=float, help="grid oversampling, M = gamma*N (default 4)")
    common.add_argument("--T", type=float, help="half-width of the periodic box (default 2)")
    common.add_argument("--eps", type=float, help="relative truncation threshold (default 1e-14)")
    common.add_argument("--boundary", help="boundary node policy kind:value, e.g. linear:5, log:20")
    common.add_argument("--spacing", choices=SPACINGS, help="boundary node spacing")
    common.add_argument("--seed", type=int, help="seed for random interior nodes (default 0)")
    common.add_argument("--eval-density", type=int, dest="eval_density", help="error-grid refinement (default 2)")
    common.add_argument("--corner-extra", type=int, dest="corner_extra", help="extra nodes per corner side")
    common.add_argument("--corner-radius", type=float, dest="corner_radius", help="corner grading radius")
    common.add_argument("--max-N", type=int, dest="max_N", help="largest admissible N (default 60)")
    common.add_argument("--coefficients", action="store_const", const=True, help="write coefficient CSVs")
    common.add_argument("--spectra", action="store_const", const=True, help="write singular value CSVs")
    for name, text in [("approx", "function approximation sweep"), ("solve", "PDE example sweep"),
                       ("nodes", "dump collocation nodes"), ("spectrum", "dump singular values"),
                       ("run", "run the command stored in --config")]:
        sub.add_parser(name, parents=[common], help=text)
    return p


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    flags = vars(args).copy()
    out = Path(flags.pop("out"))
    config_path = flags.pop("config")
    flags.pop("verbose")
    if flags["command"] == "run":
        flags["command"] = None
        if config_path is None:
            print("fecoll: error: run needs --config", file=sys.stderr)
            return EXIT_CONFIG
    try:
        file_values = load_config_file(config_path) if config_path else None
        cfg = build_config(flags, file_values)
    except ConfigError as exc:
        print(f"fecoll: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        run(cfg, out)
    except NumericalFailure as exc:
        print(f"fecoll: numerical failure at {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
