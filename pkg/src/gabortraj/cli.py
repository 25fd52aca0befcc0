"""Command line front end.

Every subcommand is a thin adapter over a library call: it builds the inputs,
calls one function, writes the artifacts and prints a one-line JSON summary.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 precondition violation.
"""

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import density as dens
from . import frames
from . import reconstruction as rec
from . import spiraling
from . import weak_limits as wl
from .exceptions import ConfigError, NumericalError, PreconditionError
from .hermite import HermiteExpansion, as_expansion
from .stft import sample_field, stft_point
from .trajectory import (lattice_offsets, make_archimedes, make_circles, make_edges,
                         make_parallel_lines, make_point_path, make_polygon_family)

THREADS_ENV = "GABORTRAJ_THREADS"

# --------------------------------------------------------------------------- parsing helpers


def _floats(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _pairs(text):
    if isinstance(text, (list, tuple)):
        return [[float(a), float(b)] for a, b in text]
    return [_floats(p) for p in str(text).split(";") if p.strip()]


def _window(text):
    if isinstance(text, (list, tuple)):
        return HermiteExpansion(np.array([complex(*c) if isinstance(c, (list, tuple)) else c
                                          for c in text]))
    return as_expansion(str(text))


TRAJ_KEYS = ("family", "eta", "kmax", "vertices", "points", "theta", "offsets", "box",
             "gamma", "d_minus", "d_plus", "turns")
TRAJ_DEFAULTS = {"family": "circles", "eta": 1.0, "kmax": 5, "theta": 0.0, "box": 6.0,
                 "gamma": 0.0, "turns": 10.0}


def _add_traj(p):
    p.add_argument("--family", choices=["circles", "polygons", "point-path", "lines", "edges",
                                        "archimedes"])
    p.add_argument("--eta", type=float)
    p.add_argument("--kmax", type=int, help="circles/polygons count or point-path rounds")
    p.add_argument("--vertices", help="polygon vertices 'x,y;x,y;...'")
    p.add_argument("--points", help="point-path points 'x,y;x,y;...'")
    p.add_argument("--theta", type=float, help="line angle in turns")
    p.add_argument("--offsets", help="line offsets 'a,b,...' (default eta Z in the box)")
    p.add_argument("--box", type=float, help="half width of the truncation box")
    p.add_argument("--gamma", type=float)
    p.add_argument("--d-minus", dest="d_minus")
    p.add_argument("--d-plus", dest="d_plus")
    p.add_argument("--turns", type=float)


def build_trajectory(cfg):
    fam = cfg["family"]
    eta = float(cfg["eta"])
    if fam == "circles":
        return make_circles(eta, int(cfg["kmax"]))
    if fam == "polygons":
        if cfg.get("vertices") is None:
            raise ConfigError("family polygons needs --vertices")
        return make_polygon_family(_pairs(cfg["vertices"]), eta, int(cfg["kmax"]))
    if fam == "point-path":
        if cfg.get("points") is None:
            raise ConfigError("family point-path needs --points")
        return make_point_path(_pairs(cfg["points"]), eta, int(cfg["kmax"]))
    b = float(cfg["box"])
    if fam == "lines":
        offs = (_floats(cfg["offsets"]) if cfg.get("offsets") is not None
                else lattice_offsets(eta, -b, b))
        return make_parallel_lines(float(cfg["theta"]), offs, b)
    if fam == "edges":
        if cfg.get("d_minus") is None or cfg.get("d_plus") is None:
            raise ConfigError("family edges needs --d-minus and --d-plus")
        return make_edges(float(cfg["gamma"]), eta, _floats(cfg["d_minus"]),
                          _floats(cfg["d_plus"]), b)
    return make_archimedes(eta, float(cfg["turns"]))


# --------------------------------------------------------------------------- commands


def cmd_trajectory_gen(cfg):
    traj = build_trajectory(cfg)
    arts = {"trajectory.json": traj.to_json()}
    if cfg.get("h") is not None:
        arts["quadrature.csv"] = traj.quadrature(float(cfg["h"])).to_csv()
    return {"family": traj.family, "segments": len(traj), "length": traj.length()}, arts


def cmd_density(cfg):
    traj = build_trajectory(cfg)
    grid = dens.scan_grid(half_width=float(cfg["grid_half"]), step=float(cfg["grid_step"]))
    rep = dens.density_scan(traj, float(cfg["R"]), grid, shape=cfg["shape"])
    return rep.to_dict(), {"density.json": rep.to_json()}


def cmd_regularity(cfg):
    traj = build_trajectory(cfg)
    grid = dens.scan_grid(half_width=float(cfg["grid_half"]), step=float(cfg["grid_step"]))
    phi = float(cfg["phi"])
    out = dens.phi_regularity_check(traj, lambda R: phi, _floats(cfg["radii"]), grid)
    return out, {"regularity.json": json.dumps(out, sort_keys=True)}


def _offsets(cfg):
    if cfg.get("offsets") is not None:
        return _floats(cfg["offsets"])
    if cfg.get("eta") is None:
        raise ConfigError("give --offsets or a lattice spacing --eta")
    return frames.PeriodicOffsets(float(cfg["eta"]))


def cmd_frame_lines(cfg):
    A, B = frames.line_frame_bounds(_window(cfg["window"]), float(cfg["theta"]), _offsets(cfg))
    out = {"A": A, "B": B, "frame": bool(A > 0 and math.isfinite(B))}
    return out, {"frame_lines.json": json.dumps(out, sort_keys=True)}


def cmd_frame_suzhou(cfg):
    m = cfg.get("m")
    M = cfg.get("M")
    crit = frames.delta_criterion(_window(cfg["window"]), float(cfg["R"]), m, M)
    out = crit.to_dict()
    out["critical_R"] = frames.critical_radius(_window(cfg["window"]))
    return out, {"delta.json": json.dumps(out, sort_keys=True)}


def cmd_frame_gram(cfg):
    traj = build_trajectory(cfg)
    rep = frames.gram_frame_bounds(_window(cfg["window"]), traj.quadrature(float(cfg["h"])),
                                   int(cfg["N"]))
    return rep.to_dict(), {"frame_gram.json": rep.to_json(), "gram.csv": rep.gram_csv()}


def _need_seed(cfg):
    if cfg.get("seed") is None:
        raise ConfigError("a seed is mandatory for randomized signals")
    return int(cfg["seed"])


def cmd_reconstruct_cg(cfg):
    seed = _need_seed(cfg)
    N = int(cfg["N"])
    f = HermiteExpansion.random(N, seed)
    g = _window(cfg["window"])
    traj = build_trajectory(cfg)
    samples = sample_field(f, g, traj.quadrature(float(cfg["h"])))
    res = rec.cg_reconstruct(samples, g, N, tol=float(cfg["tol"]), truth=f,
                             method=cfg["method"])
    summary = {"rel_error": res.rel_error, "iterations": res.iterations,
               "residual": res.residual, "A_N": res.A_N, "B_N": res.B_N}
    return summary, {"reconstruction.json": res.to_json(), "samples.csv": samples.to_csv()}


def cmd_reconstruct_cauchy(cfg):
    seed = _need_seed(cfg)
    g = _window(cfg["window"])
    radii = _floats(cfg["radii"])
    f = HermiteExpansion.random(int(cfg["N"]), seed)
    rng = np.random.default_rng(seed)
    rows, worst = [], 0.0
    for _ in range(int(cfg["n_points"])):
        r, a = rng.uniform(1e-3, min(1.0, 0.999 * radii[0])), rng.uniform(0, 2 * math.pi)
        z = [r * math.cos(a), r * math.sin(a)]
        v = rec.stft_circle_reconstruct(f, g, radii, z, M=int(cfg["M"]))
        err = abs(v - stft_point(f, g, z))
        worst = max(worst, err)
        rows.append({"z": z, "value": [v.real, v.imag], "error": err})
    out = {"max_error": worst, "radii": radii, "M": int(cfg["M"]), "window": g.digest()}
    return out, {"cauchy.json": json.dumps({**out, "points": rows}, sort_keys=True)}


def cmd_uniqueness_lines(cfg):
    v = rec.line_uniqueness_check(_window(cfg["window"]), float(cfg["theta"]), _offsets(cfg))
    return v.to_dict(), {"uniqueness.json": json.dumps(v.to_dict(), sort_keys=True)}


def cmd_weaklimit(cfg):
    traj = build_trajectory(cfg)
    if cfg["sequence"] == "constant":
        seq = wl.TranslateSequence.constant(_floats(cfg["shift"]))
    else:
        seq = wl.TranslateSequence.escape(float(cfg["seq_theta"]), float(cfg["speed"]),
                                          float(cfg["offset"]), _floats(cfg["shift"]))
    rep = wl.verify_limit(traj, seq, ks=[int(k) for k in _floats(cfg["ks"])],
                          h=float(cfg["h"]), threshold=float(cfg["threshold"]))
    summary = {"predicted": rep.predicted.kind, "final": rep.final,
               "non_increasing": rep.non_increasing, "verdict": rep.verdict}
    return summary, {"weaklimit.json": rep.to_json(), "discrepancy.csv": rep.curve_csv()}


def cmd_validate_spiraling(cfg):
    traj = build_trajectory(cfg)
    betas = _floats(cfg["betas"]) if cfg.get("betas") is not None else None
    rep = spiraling.spiraling_validate(traj, betas, (int(cfg["k_min"]), int(cfg["k_fit"])))
    summary = {"ok": rep.ok, "singular": list(rep.singular),
               "max_tail_residual": max(b["tail_residual"] for b in rep.per_beta)}
    return summary, {"spiraling.json": rep.to_json()}


# --------------------------------------------------------------------------- parser

COMMANDS = {}


def _register(name, func, parent, help_, setup, defaults):
    p = parent.add_parser(name.split()[-1], help=help_)
    setup(p)
    p.add_argument("--config", help="YAML file with parameters (flags override)")
    p.add_argument("--out", help="directory for artifacts")
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.set_defaults(_command=name)
    COMMANDS[name] = (func, defaults, p)


def _window_arg(p):
    p.add_argument("--window", help="preset like h0 or h0+h1")


def build_parser():
    parser = argparse.ArgumentParser(prog="gabortraj",
                                     description="Gabor sampling trajectory toolkit")
    sub = parser.add_subparsers(dest="group", required=True)

    g_traj = sub.add_parser("trajectory").add_subparsers(dest="action", required=True)

    def s_gen(p):
        _add_traj(p)
        p.add_argument("--h", type=float, help="also emit a quadrature with this spacing")
    _register("trajectory gen", cmd_trajectory_gen, g_traj, "build a trajectory", s_gen,
              TRAJ_DEFAULTS)

    def s_density(p):
        _add_traj(p)
        p.add_argument("--R", type=float)
        p.add_argument("--grid-half", dest="grid_half", type=float)
        p.add_argument("--grid-step", dest="grid_step", type=float)
        p.add_argument("--shape", choices=["ball", "square"])
    _register("density", cmd_density, sub, "density scan", s_density,
              {**TRAJ_DEFAULTS, "kmax": 20, "eta": 0.5, "R": 1.0, "grid_half": 2.0,
               "grid_step": 0.25, "shape": "ball"})

    def s_reg(p):
        _add_traj(p)
        p.add_argument("--radii")
        p.add_argument("--phi", type=float, help="constant profile value")
        p.add_argument("--grid-half", dest="grid_half", type=float)
        p.add_argument("--grid-step", dest="grid_step", type=float)
    _register("regularity", cmd_regularity, sub, "phi-regularity check", s_reg,
              {**TRAJ_DEFAULTS, "radii": "0.1,0.3,0.5,0.9", "phi": 1.0, "grid_half": 2.0,
               "grid_step": 0.1})

    g_frame = sub.add_parser("frame").add_subparsers(dest="action", required=True)

    def s_lines(p):
        _window_arg(p)
        p.add_argument("--theta", type=float)
        p.add_argument("--offsets")
        p.add_argument("--eta", type=float, help="periodic offsets eta Z")
    _register("frame lines", cmd_frame_lines, g_frame, "parallel-line frame bounds", s_lines,
              {"window": "h0", "theta": 0.0})

    def s_suzhou(p):
        _window_arg(p)
        p.add_argument("--R", type=float)
        p.add_argument("--m", type=float)
        p.add_argument("--M", type=float)
    _register("frame suzhou", cmd_frame_suzhou, g_frame, "Delta criterion", s_suzhou,
              {"window": "h0", "R": 0.5})

    def s_gram(p):
        _window_arg(p)
        _add_traj(p)
        p.add_argument("--h", type=float)
        p.add_argument("--N", type=int)
    _register("frame gram", cmd_frame_gram, g_frame, "finite-section Gram bounds", s_gram,
              {**TRAJ_DEFAULTS, "window": "h0", "eta": 0.5, "kmax": 16, "h": 0.02, "N": 8})

    g_rec = sub.add_parser("reconstruct").add_subparsers(dest="action", required=True)

    def s_cg(p):
        _window_arg(p)
        _add_traj(p)
        p.add_argument("--h", type=float)
        p.add_argument("--N", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--method", choices=["cg", "cr"])
    _register("reconstruct cg", cmd_reconstruct_cg, g_rec, "frame inversion", s_cg,
              {**TRAJ_DEFAULTS, "window": "h0", "eta": 0.5, "kmax": 16, "h": 0.02, "N": 8,
               "tol": 1e-10, "method": "cr"})

    def s_cauchy(p):
        _window_arg(p)
        p.add_argument("--radii")
        p.add_argument("--N", type=int, help="signal order")
        p.add_argument("--M", type=int)
        p.add_argument("--n-points", dest="n_points", type=int)
        p.add_argument("--seed", type=int)
    _register("reconstruct cauchy", cmd_reconstruct_cauchy, g_rec, "circle reconstruction",
              s_cauchy, {"window": "h0+h1", "radii": "4,5", "N": 6, "M": 512, "n_points": 10})

    g_uni = sub.add_parser("uniqueness").add_subparsers(dest="action", required=True)

    def s_uni(p):
        _window_arg(p)
        p.add_argument("--theta", type=float)
        p.add_argument("--offsets")
        p.add_argument("--eta", type=float)
    _register("uniqueness lines", cmd_uniqueness_lines, g_uni, "uniqueness on lines", s_uni,
              {"window": "h0", "theta": 0.0})

    def s_wl(p):
        _add_traj(p)
        p.add_argument("--sequence", choices=["escape", "constant"])
        p.add_argument("--seq-theta", dest="seq_theta", type=float)
        p.add_argument("--speed", type=float)
        p.add_argument("--offset", type=float)
        p.add_argument("--shift")
        p.add_argument("--ks")
        p.add_argument("--h", type=float)
        p.add_argument("--threshold", type=float)
    _register("weaklimit", cmd_weaklimit, sub, "weak limit verification", s_wl,
              {**TRAJ_DEFAULTS, "kmax": 72, "sequence": "escape", "seq_theta": 0.0,
               "speed": 1.0, "offset": 0.0, "shift": "0,0", "ks": "4,8,16,32,64",
               "h": 0.005, "threshold": 1e-2})

    g_val = sub.add_parser("validate").add_subparsers(dest="action", required=True)

    def s_spi(p):
        _add_traj(p)
        p.add_argument("--betas")
        p.add_argument("--k-min", dest="k_min", type=int)
        p.add_argument("--k-fit", dest="k_fit", type=int)
    _register("validate spiraling", cmd_validate_spiraling, g_val, "spiraling diagnostics",
              s_spi, {**TRAJ_DEFAULTS, "kmax": 40, "k_min": 4, "k_fit": 32})
    return parser


_CONTROL = {"config", "out", "format", "_command", "group", "action"}


def resolve_config(args, defaults, parser):
    """Merge defaults < config file < explicit flags; reject unknown keys."""
    allowed = {a.dest for a in parser._actions} - _CONTROL - {"help"}
    cfg = dict(defaults)
    if args.config:
        try:
            data = yaml.safe_load(Path(args.config).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a key-value mapping")
        cmd = data.pop("command", None)
        if cmd is not None and cmd != args._command:
            raise ConfigError(f"config is for {cmd!r}, not {args._command!r}")
        data = {k.replace("-", "_"): v for k, v in data.items()}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg.update(data)
    for k in allowed:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    return cfg


def _write(out_dir, artifacts, fmt):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in sorted(artifacts.items()):
        # --format picks json reports or csv tables when a command emits both
        if fmt == "csv" and name.endswith(".json") and any(a.endswith(".csv") for a in artifacts):
            continue
        (out / name).write_text(text if text.endswith("\n") else text + "\n")
        written.append(name)
    return written


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def run(argv=None):
    """Parse ``argv``, run one subcommand and return ``(exit_code, summary)``."""
    parser = build_parser()
    args = parser.parse_args(argv)
    func, defaults, sub = COMMANDS[args._command]
    try:
        cfg = resolve_config(args, defaults, sub)
        threads = os.environ.get(THREADS_ENV)
        if threads:
            from threadpoolctl import threadpool_limits
            with threadpool_limits(limits=int(threads)):
                summary, arts = func(cfg)
        else:
            summary, arts = func(cfg)
        summary = {"command": args._command, "status": "ok", **_jsonable(summary)}
        if args.out:
            summary["artifacts"] = _write(args.out, arts, args.format)
        code = 0
    except ConfigError as exc:
        summary, code = {"command": args._command, "status": "config-error",
                         "error": str(exc)}, 2
    except NumericalError as exc:
        summary, code = {"command": args._command, "status": "numerical-error",
                         "error": str(exc)}, 3
        lb = getattr(exc, "lower_bound", None)
        if lb is not None:
            summary["A_N"] = lb
    except PreconditionError as exc:
        summary, code = {"command": args._command, "status": "precondition-error",
                         "error": str(exc)}, 4
    return code, summary


def main(argv=None):
    code, summary = run(argv)
    print(json.dumps(summary, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
