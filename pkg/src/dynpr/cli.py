"""``dynpr`` command-line front end.

Exit codes: 0 success, 1 usage/config error, 2 input parse error,
3 numeric or convergence failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import io as dio
from .estimators import epoch_features
from .exceptions import ConfigError, DynPRError, ParseError
from .graph import build_transition, load_edge_list
from .integrate import EvolutionConfig, evolve
from .predict import prediction_report
from .ranks import default_window, difference, isim, rank_report, top_k
from .solvers import SolveConfig, eval_steady, oscillatory_steady_state, static_pagerank
from .synth import diffusion_activity, random_activity, random_graph
from .teleportation import (
    ConstantSchedule,
    OscillatorySchedule,
    PiecewiseSchedule,
    normalize_activity,
    read_activity_csv,
    write_activity_csv,
)

INPUT_KEYS = ("graph", "activity", "trajectory", "scores_a", "scores_b", "teleport_columns")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _window(text):
    try:
        lo, hi = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("window must be 'lo,hi'") from None
    return [lo, hi]


def _theta_list(text):
    out = []
    for part in text.split(","):
        part = part.strip().lower()
        out.append(None if part in ("none", "inf") else float(part))
    return out


def _load_operator(path):
    return build_transition(load_edge_list(path))


def _load_activity(path, n):
    return read_activity_csv(path, n=n)


def _ensure_out(out):
    os.makedirs(out, exist_ok=True)
    return out


def _schedule_for(args, P, counts):
    if counts is None:
        if args.tmax is None:
            raise ConfigError("--tmax is required without --activity")
        return ConstantSchedule(np.full(P.n, 1.0 / P.n), args.tmax, theta=args.theta)
    V = normalize_activity(counts)
    return PiecewiseSchedule(V, args.timescale, t_max=args.tmax, theta=args.theta)


def _grid_for(args, schedule):
    T = schedule.t_max
    if args.grid == "epochs":
        if not isinstance(schedule, PiecewiseSchedule):
            raise ConfigError("--grid epochs needs --activity")
        g = schedule.epoch_times()
        return g if g[-1] >= T * (1 - 1e-12) else np.append(g, T)
    try:
        dt = float(args.grid)
    except ValueError:
        raise ConfigError(f"--grid must be a spacing or 'epochs', got {args.grid!r}") from None
    if not dt > 0:
        raise ConfigError("--grid spacing must be > 0")
    m = max(int(round(T / dt)), 1)
    return np.linspace(0.0, T, m + 1)


def _evolution(args, P, schedule):
    cfg = EvolutionConfig(
        alpha=args.alpha, t_max=schedule.t_max, method=args.method, step=args.step,
        rtol=args.rtol, atol=args.atol, initial=args.initial,
        output_grid=_grid_for(args, schedule),
    )
    return evolve(P, schedule, cfg)


# -- commands ---------------------------------------------------------------


def cmd_static(args):
    P = _load_operator(args.graph)
    cfg = SolveConfig(args.alpha, args.tol)
    v = None
    if args.activity:
        counts = _load_activity(args.activity, P.n)
        if args.epoch is None:
            v = normalize_activity(counts.sum(axis=1))[:, 0]
        else:
            if not 0 <= args.epoch < counts.shape[1]:
                raise ConfigError(f"--epoch {args.epoch} out of range")
            v = normalize_activity(counts[:, args.epoch])[:, 0]
    x = static_pagerank(P, cfg, v)
    out = _ensure_out(args.out)
    dio.write_scores(os.path.join(out, "static.csv"), {"score": x})
    return {"static": "static.csv"}


def cmd_evolve(args):
    if args.theta is not None and not args.theta > 0:
        raise ConfigError(f"--theta must be > 0, got {args.theta}")
    P = _load_operator(args.graph)
    counts = _load_activity(args.activity, P.n) if args.activity else None
    schedule = _schedule_for(args, P, counts)
    traj = _evolution(args, P, schedule)
    out = _ensure_out(args.out)
    dio.write_trajectory(os.path.join(out, "trajectory.csv"), traj)
    drift = traj.sum_drift
    summary = {
        "nodes": P.n,
        "samples": len(traj),
        "t_max": schedule.t_max,
        "max_sum_drift": float(drift.max()),
        "mean_sum_drift": float(drift.mean()),
        "min_entry": float(traj.states.min()),
        "stats": traj.stats,
    }
    dio.write_json(os.path.join(out, "summary.json"), summary)
    return {"trajectory": "trajectory.csv", "summary": "summary.json"}


def cmd_ranks(args):
    traj = dio.read_trajectory(args.trajectory)
    if len(traj) < 2:
        raise ConfigError("trajectory needs at least two samples for ranks")
    window = args.window or list(default_window(traj))
    transients = [] if args.transient is None else [args.transient]
    report = rank_report(traj, window, transients)
    out = _ensure_out(args.out)
    scores = {k: np.clip(v, 0.0, None) for k, v in report.scores.items()}
    dio.write_scores(os.path.join(out, "ranks.csv"), scores)
    k = traj.n if args.topk is None else args.topk
    if not 0 <= k <= traj.n:
        raise ConfigError(f"--topk {k} out of range for {traj.n} nodes")
    names = list(scores)
    tops = {name: top_k(scores[name], k) for name in names}
    lines = [",".join(["rank"] + names)]
    for r in range(k):
        lines.append(",".join([str(r + 1)] + [str(tops[name][r]) for name in names]))
    dio.write_text(os.path.join(out, "topk.csv"), "\n".join(lines) + "\n")
    dio.write_json(os.path.join(out, "ranks.json"), {"window": [float(w) for w in window], "k": k})
    return {"ranks": "ranks.csv", "topk": "topk.csv"}


def _score_column(path, column):
    header, data = dio.read_scores(path)
    name = column or header[-1]
    if name not in header:
        raise ParseError(f"{path}: no column {name!r} (have {header})")
    return data[:, header.index(name)]


def cmd_isim(args):
    a = _score_column(args.scores_a, args.column)
    b = _score_column(args.scores_b, args.column_b or args.column)
    if a.shape != b.shape:
        raise ConfigError(f"score files cover different node counts ({a.size} vs {b.size})")
    k = args.topk if args.topk is not None else a.size
    prof = isim(a, b, k)
    out = _ensure_out(args.out)
    lines = ["k,isim"] + [f"{j + 1},{dio.fmt(v)}" for j, v in enumerate(prof)]
    dio.write_text(os.path.join(out, "isim.csv"), "\n".join(lines) + "\n")
    return {"isim": "isim.csv"}


def _oscillation_columns(args, n):
    if args.teleport_columns:
        counts = read_activity_csv(args.teleport_columns, n=n)
        return normalize_activity(counts)
    k = args.k if args.k is not None else n
    if k < 2:
        raise ConfigError("oscillatory teleportation needs k >= 2")
    members = np.zeros((n, k))
    members[np.arange(n), np.arange(n) % k] = 1.0
    return normalize_activity(members)


def cmd_oscillate(args):
    P = _load_operator(args.graph)
    V = _oscillation_columns(args, P.n)
    if V.shape[1] < 2:
        raise ConfigError("oscillatory teleportation needs k >= 2")
    x, sol = oscillatory_steady_state(P, args.alpha, V, SolveConfig(args.alpha, args.tol))
    T = args.tmax if args.tmax is not None else 20.0
    schedule = OscillatorySchedule(V, T)
    cfg = EvolutionConfig(
        alpha=args.alpha, t_max=T, method=args.method, step=args.step, rtol=args.rtol,
        atol=args.atol, initial=args.initial, output_grid=_grid_for(args, schedule),
    )
    traj = evolve(P, schedule, cfg)
    burn = min(args.burn_in, T)
    m = traj.times >= burn
    gap = np.abs(traj.states[m] - eval_steady(x, sol, traj.times[m])).max()
    d = difference(traj, (burn, T))
    report = {
        "alpha": args.alpha,
        "k": int(V.shape[1]),
        "mean": x.tolist(),
        "amplitude": sol.magnitude.tolist(),
        "residual": sol.residual,
        "burn_in": burn,
        "t_max": T,
        "max_gap_inf": float(gap),
        "difference": d.tolist(),
    }
    out = _ensure_out(args.out)
    dio.write_json(os.path.join(out, "oscillate.json"), report)
    print("mean      " + " ".join(f"{v:.4f}" for v in x))
    print("|s|       " + " ".join(f"{v:.4f}" for v in sol.magnitude))
    print(f"max |x(t) - steady(t)| over [{burn:g}, {T:g}]: {gap:.3e}")
    return {"report": "oscillate.json"}


def cmd_predict(args):
    P = _load_operator(args.graph)
    counts = _load_activity(args.activity, P.n)
    k = counts.shape[1]
    if args.window < 1 or 3 * args.window >= k:
        raise ConfigError(
            f"window {args.window} too large for {k} epochs (need 3*w < epochs for "
            "augmented walk-forward fits)"
        )
    results = []
    for theta in args.theta_sweep:
        schedule = PiecewiseSchedule(normalize_activity(counts), args.timescale, theta=theta)
        T = schedule.t_max
        grid = np.linspace(0.0, T, k * args.samples_per_epoch + 1)
        cfg = EvolutionConfig(
            alpha=args.alpha, t_max=T, method=args.method, step=args.step, rtol=args.rtol,
            atol=args.atol, initial=args.initial, output_grid=grid,
        )
        traj = evolve(P, schedule, cfg)
        feats = epoch_features(traj, schedule)
        d = difference(traj, args.window_rank or default_window(traj))
        rep = prediction_report(counts, feats, args.window, d, args.cohort)
        results.append({"theta": theta, **rep.to_dict()})
    out = _ensure_out(args.out)
    dio.write_json(os.path.join(out, "predict.json"), {
        "alpha": args.alpha, "timescale": args.timescale, "window": args.window,
        "cohort": args.cohort, "results": results,
    })
    return {"report": "predict.json"}


def cmd_synth(args):
    if args.seed is None:
        raise ConfigError("synth requires --seed")
    out = _ensure_out(args.out)
    if args.kind == "graph":
        adj = random_graph(args.nodes, args.edges, args.seed)
        lines = [f"{s} {d}" for s, d in zip(adj.src.tolist(), adj.dst.tolist())]
        dio.write_text(os.path.join(out, "graph.txt"), "\n".join(lines) + "\n")
        return {"graph": "graph.txt"}
    if args.kind == "activity":
        counts = random_activity(args.nodes, args.epochs, args.seed)
    else:
        if not args.graph:
            raise ConfigError("synth diffusion needs --graph")
        adj = load_edge_list(args.graph)
        counts, _ = diffusion_activity(adj, args.epochs, args.seed, alpha=args.alpha,
                                       timescale=args.timescale)
    write_activity_csv(os.path.join(out, "activity.csv"), counts)
    return {"activity": "activity.csv"}


COMMANDS = {
    "static": cmd_static,
    "evolve": cmd_evolve,
    "ranks": cmd_ranks,
    "isim": cmd_isim,
    "oscillate": cmd_oscillate,
    "predict": cmd_predict,
    "synth": cmd_synth,
}


# -- parser -----------------------------------------------------------------


def _add_dynamics(p, grid_default="0.1"):
    p.add_argument("--alpha", type=float, default=0.85)
    p.add_argument("--timescale", type=float, default=1.0, help="model time per epoch (s)")
    p.add_argument("--method", choices=("euler", "rk45"), default="rk45")
    p.add_argument("--step", type=float, default=1.0, help="forward Euler step h")
    p.add_argument("--rtol", type=float, default=1e-6)
    p.add_argument("--atol", type=float, default=1e-9)
    p.add_argument("--tmax", type=float, default=None)
    p.add_argument("--grid", default=grid_default, help="output spacing, or 'epochs' for t = j*s")
    p.add_argument("--initial", choices=("uniform", "teleport0", "staticpr", "static_pr"),
                   default="staticpr")


def build_parser():
    parser = _Parser(prog="dynpr", description="PageRank with time-dependent teleportation")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("static", help="static PageRank scores")
    p.add_argument("--graph", required=True)
    p.add_argument("--alpha", type=float, default=0.85)
    p.add_argument("--activity", help="teleport from activity (all epochs summed unless --epoch)")
    p.add_argument("--epoch", type=int)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", default="out")

    p = sub.add_parser("evolve", help="integrate the dynamic system")
    p.add_argument("--graph", required=True)
    p.add_argument("--activity")
    p.add_argument("--theta", type=float, default=None, help="smoothing rate (> 0)")
    _add_dynamics(p)
    p.add_argument("--out", default="out")

    p = sub.add_parser("ranks", help="cumulative/variance/difference ranks of a trajectory")
    p.add_argument("--trajectory", required=True)
    p.add_argument("--window", type=_window)
    p.add_argument("--transient", type=float)
    p.add_argument("--topk", type=int)
    p.add_argument("--out", default="out")

    p = sub.add_parser("isim", help="intersection similarity profile of two score files")
    p.add_argument("--scores-a", dest="scores_a", required=True)
    p.add_argument("--scores-b", dest="scores_b", required=True)
    p.add_argument("--column", help="score column (default: last column)")
    p.add_argument("--column-b", dest="column_b")
    p.add_argument("--topk", type=int)
    p.add_argument("--out", default="out")

    p = sub.add_parser("oscillate", help="closed-form vs integrated cosine teleportation")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, help="number of phases; node i joins column i mod k")
    p.add_argument("--teleport-columns", dest="teleport_columns",
                   help="explicit columns as node,epoch,count CSV")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--burn-in", dest="burn_in", type=float, default=4.0)
    _add_dynamics(p, grid_default="0.01")
    p.add_argument("--out", default="out")

    p = sub.add_parser("predict", help="base vs dynamic-teleportation prediction error ratios")
    p.add_argument("--graph", required=True)
    p.add_argument("--activity", required=True)
    p.add_argument("--theta", dest="theta_sweep", type=_theta_list, default=[None],
                   help="comma list of smoothing rates; 'none' disables smoothing")
    p.add_argument("--window", type=int, default=1, help="lag count w")
    p.add_argument("--rank-window", dest="window_rank", type=_window)
    p.add_argument("--cohort", type=int, default=10, help="cohort size m")
    p.add_argument("--samples-per-epoch", dest="samples_per_epoch", type=int, default=10)
    _add_dynamics(p)
    p.add_argument("--out", default="out")

    p = sub.add_parser("synth", help="seeded synthetic fixtures")
    p.add_argument("kind", choices=("graph", "activity", "diffusion"))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--nodes", type=int, default=100)
    p.add_argument("--edges", type=int, default=500)
    p.add_argument("--epochs", type=int, default=24)
    p.add_argument("--graph")
    p.add_argument("--alpha", type=float, default=0.85)
    p.add_argument("--timescale", type=float, default=1.0)
    p.add_argument("--out", default="out")

    p = sub.add_parser("replay", help="re-run a command from its manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="write outputs here instead of the recorded directory")
    return parser


def _run(command, params):
    args = argparse.Namespace(**params)
    for key in INPUT_KEYS:
        if getattr(args, key, None):
            setattr(args, key, os.path.abspath(getattr(args, key)))
    args.out = os.path.abspath(args.out)
    recorded = vars(args).copy()
    outputs = COMMANDS[command](args)
    inputs = {k: recorded.get(k) for k in INPUT_KEYS}
    dio.write_manifest(args.out, command, recorded, inputs)
    return outputs


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            manifest = dio.read_manifest(args.manifest)
            params = dict(manifest["params"])
            if args.out:
                params["out"] = args.out
            for key, rec in manifest.get("inputs", {}).items():
                if dio.file_digest(rec["path"]) != rec["sha256"]:
                    raise ConfigError(f"input {rec['path']} changed since the manifest was written")
            _run(manifest["command"], params)
        else:
            params = {k: v for k, v in vars(args).items() if k != "command"}
            _run(args.command, params)
    except DynPRError as exc:
        print(f"dynpr: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"dynpr: error: {exc}", file=sys.stderr)
        return ParseError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
