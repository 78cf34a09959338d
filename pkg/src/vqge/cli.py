"""Command line: ``vqge solve|oracle|qps-bench|noisy-solve|plot-script``.

Configuration is a flat ``key=value`` file; ``--set key=value`` overrides it
and ``VQGE_SEED`` overrides the seed. Exit codes: 0 converged / success,
1 usage or parse error, 2 optimizer did not converge, 3 capacity exceeded.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import io, pencils
from .linalg import CapacityError, MatrixPencil, classical_generalized_eigenvalues
from .noise import NoiseModel
from .qps import SHOT_SWEEP, bench_rows
from .rng import generator

log = logging.getLogger("vqge")

EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED, EXIT_CAPACITY = 0, 1, 2, 3

DEFAULTS = {
    "pencil": "example1",
    "a": "",
    "b": "",
    "dim": "2",
    "real": "true",
    "ansatz": "fanin",
    "layers": "2",
    "rotation": "rzryrz",
    "learning_rate": "0.03",
    "fd_step": "0.001",
    "epsilon": "1e-10",
    "max_iterations": "5000",
    "restarts": "10",
    "momentum": "0.0",
    "init": "random",
    "mode": "exact",
    "shots": "100000",
    "diag_shots": "1000000",
    "project": "off",
    "seed": "0",
    "output": "vqge-out",
    "noise.enabled": "false",
    "noise.gamma": "0.01",
    "noise.p1": "0.1",
    "noise.p2": "0.3",
    "noise.depolarizing": "mixing",
    "qps.sets": "4x2,8x4",
    "qps.shots": ",".join(str(s) for s in SHOT_SWEEP),
}

NOISY_DEFAULTS = {
    "noise.enabled": "true",
    "ansatz": "hwe",
    "layers": "1",
    "rotation": "ry",
    "epsilon": "1e-6",
    "max_iterations": "2000",
    "restarts": "1",
}


class UsageError(Exception):
    pass


def _bool(v):
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"expected a boolean, got {v!r}")


def _num(cfg, key, kind=float):
    try:
        return kind(float(cfg[key])) if kind is int else kind(cfg[key])
    except (TypeError, ValueError):
        raise UsageError(f"config key {key} must be {kind.__name__}, got {cfg[key]!r}") from None


def resolve_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.command == "noisy-solve":
        cfg.update(NOISY_DEFAULTS)
    if args.config:
        try:
            cfg.update(io.read_config(args.config))
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
    for item in args.set or []:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        cfg[k.strip()] = v.strip()
    if args.a:
        cfg["a"] = args.a
        cfg["pencil"] = "files"
    if args.b:
        cfg["b"] = args.b
    if args.output:
        cfg["output"] = args.output
    if os.environ.get("VQGE_SEED"):
        cfg["seed"] = os.environ["VQGE_SEED"]
    unknown = sorted(set(cfg) - set(DEFAULTS))
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return cfg


def load_pencil(cfg) -> MatrixPencil:
    kind = cfg["pencil"]
    seed = _num(cfg, "seed", int)
    dim = _num(cfg, "dim", int)
    if kind == "example1":
        return pencils.example1()
    if kind == "files":
        if not cfg["a"]:
            raise UsageError("pencil=files needs --a (and optionally --b)")
        a = io.read_matrix(cfg["a"])
        b = io.read_matrix(cfg["b"]) if cfg["b"] else np.eye(a.shape[0])
        return MatrixPencil(a, b)
    if kind == "random":
        return pencils.random_pencil(dim, generator(seed, 99), real=_bool(cfg["real"]))
    if kind == "synthetic":
        return pencils.synthetic_structured_pencil(dim, generator(seed, 98), null_rows=max(1, dim // 8))
    if kind == "triangular":
        g = generator(seed, 97)
        return MatrixPencil(np.triu(g.normal(size=(dim, dim))), np.triu(g.normal(size=(dim, dim))) + 2 * np.eye(dim))
    raise UsageError(f"unknown pencil source {kind!r}")


def noise_model(cfg):
    return NoiseModel(
        gamma=_num(cfg, "noise.gamma"), p1=_num(cfg, "noise.p1"), p2=_num(cfg, "noise.p2"),
        enabled=_bool(cfg["noise.enabled"]), depolarizing_form=cfg["noise.depolarizing"],
    )


def _outdir(cfg) -> Path:
    out = Path(cfg["output"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_config_echo(out: Path, cfg, command):
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    text = f"# vqge {command} resolved configuration, written {stamp}\n" + io.format_config(cfg)
    (out / "config.resolved").write_text(text, encoding="utf-8")


def build_estimator(cfg, noisy=False):
    from .estimator import VQGE

    return VQGE(
        ansatz=cfg["ansatz"], layers=_num(cfg, "layers", int), rotation=cfg["rotation"],
        learning_rate=_num(cfg, "learning_rate"), fd_step=_num(cfg, "fd_step"),
        epsilon=_num(cfg, "epsilon"), max_iterations=_num(cfg, "max_iterations", int),
        restarts=_num(cfg, "restarts", int), momentum=_num(cfg, "momentum"), init=cfg["init"],
        mode=cfg["mode"], shots=_num(cfg, "shots", int), diag_shots=_num(cfg, "diag_shots", int),
        noise=noise_model(cfg) if noisy else None, project_singular=cfg["project"] == "on",
        random_state=_num(cfg, "seed", int),
    )


def _solve(cfg, command, noisy):
    out = _outdir(cfg)
    write_config_echo(out, cfg, command)
    pencil = load_pencil(cfg)
    est = build_estimator(cfg, noisy=noisy)
    if noisy and not est.noise.enabled:
        raise UsageError("noisy-solve needs noise.enabled=true")
    est.fit(pencil)
    io.write_trace(out / "trace.csv", est.trace_, noisy=noisy, timing_path=out / "timing.csv")
    d = est.diagonals_
    io.write_csv(out / "eigenvalues.csv", io.EIGEN_COLUMNS,
                 io.eigen_rows(d.t_diag, d.s_diag, est.eigenvalues_, est.extraction_tol_))
    log.info("final loss %.3e after %d records (converged=%s)",
             est.loss_, len(est.trace_.iterations), est.converged_)
    return EXIT_OK if est.converged_ else EXIT_NOT_CONVERGED


def run_solve(cfg):
    return _solve(cfg, "solve", noisy=False)


def run_noisy_solve(cfg):
    return _solve(cfg, "noisy-solve", noisy=True)


def run_oracle(cfg):
    out = _outdir(cfg)
    write_config_echo(out, cfg, "oracle")
    result = classical_generalized_eigenvalues(load_pencil(cfg))
    io.write_csv(out / "eigenvalues.csv", io.EIGEN_COLUMNS, io.oracle_rows(result))
    return EXIT_OK


def run_qps_bench(cfg):
    out = _outdir(cfg)
    write_config_echo(out, cfg, "qps-bench")
    seed = _num(cfg, "seed", int)
    try:
        sets = [tuple(int(x) for x in tok.split("x")) for tok in cfg["qps.sets"].split(",")]
        shots = tuple(int(float(s)) for s in cfg["qps.shots"].split(","))
    except ValueError:
        raise UsageError("qps.sets must look like 4x2,8x4 and qps.shots like 1000,10000") from None
    rows = []
    for dim, count in sets:
        rows += bench_rows(dim, count, seed, shots)
    io.write_csv(out / "qps_bench.csv", io.QPS_COLUMNS, rows)
    return EXIT_OK


def run_plot_script(cfg):
    out = _outdir(cfg)
    script = (
        "# gnuplot script: loss against iteration for every restart\n"
        "set datafile separator ','\n"
        "set logscale y\n"
        "set xlabel 'iteration'\n"
        "set ylabel 'loss'\n"
        "set key autotitle columnhead\n"
        "plot 'trace.csv' using 2:3 with lines title 'loss'\n"
    )
    (out / "loss.gp").write_text(script, encoding="utf-8")
    return EXIT_OK


COMMANDS = {
    "solve": run_solve,
    "noisy-solve": run_noisy_solve,
    "oracle": run_oracle,
    "qps-bench": run_qps_bench,
    "plot-script": run_plot_script,
}


def build_parser():
    p = argparse.ArgumentParser(prog="vqge", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="flat key=value configuration file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    p.add_argument("--a", help="matrix file for A (switches pencil=files)")
    p.add_argument("--b", help="matrix file for B")
    p.add_argument("--output", "-o", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except CapacityError as exc:
        # CapacityError is a ValueError, so it must be caught first
        print(f"vqge: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (UsageError, io.ParseError, ValueError) as exc:
        print(f"vqge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
