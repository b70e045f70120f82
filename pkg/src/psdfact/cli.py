"""Command-line interface.

Subcommands: factorize, generate, eval, tensor, certify, bench (plus the
internal bench-worker). Exit codes: 0 success, 2 bad flags, 3 unreadable
or invalid input, 4 solver failure.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from . import fileio, generate, measurement, symmat
from .backend import ENV_VAR, backend_name
from .errors import DimMismatch, PsdfactError, ZeroData
from .rng import SplitMix64, random_pd, random_sym, substream_seed
from .solver import SolverConfig, factorize, kkt_residual, normalized_error, objective
from .tensor import tensor_factorize

DOMINATION_TOL = -1e-9
TRACE_CS_TOL = -1e-10


def _parse_blocks(text):
    if text is None:
        return None
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad block list {text!r}") from None


def _add_solver_flags(p, with_blocks: bool):
    p.add_argument("--input", required=True, help="data file to factorize")
    p.add_argument("--r", type=int, required=True, help="factor side length")
    if with_blocks:
        p.add_argument(
            "--blocks",
            type=_parse_blocks,
            default=None,
            help="comma-separated block sizes summing to r",
        )
    p.add_argument("--sweeps", type=int, default=500)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--damping", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rel-tol", type=float, default=0.0)
    p.add_argument("--out", required=True, help="output directory")


def _config(args, parser, blocks=None) -> SolverConfig:
    try:
        return SolverConfig(
            r=args.r,
            max_sweeps=args.sweeps,
            damping=args.damping,
            restarts=args.restarts,
            seed=args.seed,
            rel_tol=args.rel_tol,
            blocks=blocks,
        )
    except ValueError as e:
        parser.error(str(e))


def _write_run_outputs(outdir, hist, cfg, seconds):
    os.makedirs(outdir, exist_ok=True)
    fileio.write_history(os.path.join(outdir, "history.csv"), hist)
    summary = {
        "objective": float(hist.objective[-1]),
        "err": float(hist.err[-1]),
        "kkt_a": float(hist.kkt_a[-1]),
        "kkt_b": float(hist.kkt_b[-1]),
        "sweeps": hist.n_sweeps,
        "restarts": cfg.restarts,
        "seconds": float(seconds),
    }
    fileio.write_summary(os.path.join(outdir, "summary.txt"), summary)


def cmd_factorize(args, parser) -> int:
    cfg = _config(args, parser, blocks=args.blocks)
    try:
        x = fileio.read_matrix(args.input)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    t0 = time.perf_counter()
    try:
        fp, hist = factorize(x, cfg)
    except (ZeroData, DimMismatch, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except PsdfactError as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return 4
    seconds = time.perf_counter() - t0
    try:
        os.makedirs(args.out, exist_ok=True)
        fileio.write_factors(os.path.join(args.out, "factors.txt"), fp)
        _write_run_outputs(args.out, hist, cfg, seconds)
    except OSError as e:
        print(f"error writing outputs: {e}", file=sys.stderr)
        return 1
    print(
        f"objective={hist.objective[-1]:.6g} err={hist.err[-1]:.6g} "
        f"sweeps={hist.n_sweeps} out={args.out}"
    )
    return 0


def cmd_tensor(args, parser) -> int:
    cfg = _config(args, parser)
    try:
        t = fileio.read_tensor(args.input)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    t0 = time.perf_counter()
    try:
        _tf, hist = tensor_factorize(t, cfg)
    except (ZeroData, DimMismatch, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except PsdfactError as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return 4
    seconds = time.perf_counter() - t0
    try:
        os.makedirs(args.out, exist_ok=True)
        _write_run_outputs(args.out, hist, cfg, seconds)
    except OSError as e:
        print(f"error writing outputs: {e}", file=sys.stderr)
        return 1
    print(
        f"objective={hist.objective[-1]:.6g} err={hist.err[-1]:.6g} "
        f"sweeps={hist.n_sweeps} out={args.out}"
    )
    return 0


def cmd_generate(args, parser) -> int:
    kind = args.kind
    try:
        if kind == "distance":
            if args.n is None:
                parser.error("--kind distance requires --n")
            m = generate.gen_distance(args.n, args.seed)
            fileio.write_matrix(args.out, m)
        elif kind == "planted":
            if args.m is None or args.n is None or args.r is None:
                parser.error("--kind planted requires --m, --n and --r")
            x, fp = generate.gen_planted(
                args.m, args.n, args.r, args.seed, blocks=args.blocks
            )
            fileio.write_matrix(args.out, x)
            factors_out = args.factors_out or args.out + ".factors.txt"
            fileio.write_factors(factors_out, fp)
            print(f"wrote {args.out} and {factors_out}")
            return 0
        else:
            if args.d is None or args.r is None:
                parser.error("--kind tensor requires --d and --r")
            t, _tf = generate.gen_planted_tensor(args.d, args.r, args.seed)
            fileio.write_tensor(args.out, t)
        print(f"wrote {args.out}")
        return 0
    except ValueError as e:
        parser.error(str(e))
    except OSError as e:
        print(f"error writing outputs: {e}", file=sys.stderr)
        return 1


def cmd_eval(args, parser) -> int:
    try:
        x = fileio.read_matrix(args.input)
        fp = fileio.read_factors(args.factors)
        obj = objective(x, fp)
        err = normalized_error(x, fp)
        res_a, res_b = kkt_residual(x, fp)
    except (OSError, ValueError, ZeroData, DimMismatch) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except PsdfactError as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return 4
    print(f"objective={format(obj, '.17g')}")
    print(f"err={format(err, '.17g')}")
    print(f"kkt_a={format(res_a, '.17g')}")
    print(f"kkt_b={format(res_b, '.17g')}")
    return 0


def cmd_certify(args, parser) -> int:
    trials = args.trials
    if trials < 1:
        parser.error("--trials must be at least 1")
    min_dom = np.inf
    min_cs = np.inf
    for trial in range(trials):
        rng = SplitMix64(substream_seed(args.seed, trial))
        r = rng.integer(1, 6)
        m = rng.integer(1, 10)
        mats = np.empty((m, r, r))
        for k in range(m):
            mats[k] = random_pd(rng, r)
        b = random_pd(rng, r)
        z = random_sym(rng, r)
        mp = measurement.MeasurementMap(mats)
        gap = measurement.domination_gap(mp, b, z)
        v = symmat.geometric_mean(measurement.ata(mp, b), symmat.sym_inv(b))
        lhs = float(np.sum(z * (v @ z @ v)))
        min_dom = min(min_dom, gap / (1.0 + abs(lhs)))

        dim = rng.integer(1, 8)
        sx = random_sym(rng, dim)
        sy = random_sym(rng, dim)
        gap_cs = measurement.trace_cs_gap(sx, sy)
        scale = 1.0 + float(np.sum(sx * sx)) * float(np.sum(sy * sy))
        min_cs = min(min_cs, gap_cs / scale)

    ok = min_dom >= DOMINATION_TOL and min_cs >= TRACE_CS_TOL
    print(f"domination: trials={trials} min_normalized_gap={min_dom:.3e} tol={DOMINATION_TOL:.0e}")
    print(f"trace_cs: trials={trials} min_normalized_gap={min_cs:.3e} tol={TRACE_CS_TOL:.0e}")
    print(f"certify: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_bench_worker(args, parser) -> int:
    x, _fp = generate.gen_planted(args.n, args.n, args.r, seed=args.seed)
    warm = SolverConfig(r=args.r, max_sweeps=2, restarts=1, seed=args.seed)
    factorize(x, warm)
    cfg = SolverConfig(
        r=args.r, max_sweeps=args.sweeps, restarts=args.restarts, seed=args.seed
    )
    t0 = time.perf_counter()
    _, hist = factorize(x, cfg)
    dt = time.perf_counter() - t0
    print(f"backend={backend_name()} seconds={dt:.6f} objective={hist.objective[-1]:.6g}")
    return 0


def cmd_bench(args, parser) -> int:
    """Time the jitted and plain-numpy kernel paths on one workload."""
    results = {}
    flags = [
        "--n", str(args.n), "--r", str(args.r), "--sweeps", str(args.sweeps),
        "--restarts", str(args.restarts), "--seed", str(args.seed),
    ]
    for backend in ("numpy", "numba"):
        env = dict(os.environ, **{ENV_VAR: backend})
        proc = subprocess.run(
            [sys.executable, "-m", "psdfact", "bench-worker", *flags],
            env=env,
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            print(f"backend={backend} unavailable:", file=sys.stderr)
            sys.stderr.write(proc.stderr)
            results[backend] = None
            continue
        line = proc.stdout.strip().splitlines()[-1]
        print(line)
        secs = float(line.split("seconds=")[1].split()[0])
        results[backend] = secs
    if results.get("numpy") and results.get("numba"):
        print(f"speedup={results['numpy'] / results['numba']:.2f}x")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psdfact",
        description="Approximate PSD factorization of nonnegative matrices and tensors",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("factorize", help="factorize a matrix file")
    _add_solver_flags(p, with_blocks=True)

    p = sub.add_parser("generate", help="write a seeded problem instance")
    p.add_argument("--kind", choices=("distance", "planted", "tensor"), required=True)
    p.add_argument("--out", required=True, help="output data file")
    p.add_argument("--factors-out", default=None, help="ground-truth factor file (planted)")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--blocks", type=_parse_blocks, default=None)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("eval", help="evaluate stored factors against a matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--factors", required=True)

    p = sub.add_parser("tensor", help="factorize a tensor file")
    _add_solver_flags(p, with_blocks=False)

    p = sub.add_parser("certify", help="randomized checks of the update's inequalities")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("bench", help="compare numba and numpy kernel backends")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--sweeps", type=int, default=200)
    p.add_argument("--restarts", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("bench-worker", help="internal: one timed run in this process")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--sweeps", type=int, required=True)
    p.add_argument("--restarts", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)

    return parser


_COMMANDS = {
    "factorize": cmd_factorize,
    "generate": cmd_generate,
    "eval": cmd_eval,
    "tensor": cmd_tensor,
    "certify": cmd_certify,
    "bench": cmd_bench,
    "bench-worker": cmd_bench_worker,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return _COMMANDS[args.command](args, parser)
