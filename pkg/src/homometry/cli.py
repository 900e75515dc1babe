"""Command-line entry point.

Exit status: 0 on success, 1 when an experiment or comparison misses a
tolerance, 2 on invalid input.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import correlation, entropy, experiments, formats, generators, spectra
from .combs import LatticeConfig2D, PointSet2D, SequenceWindow
from .errors import InvalidInput
from .kernels import BACKEND
from .rng import SeededRng

SYSTEMS_1D = ("bernoulli", "rs", "bernoullised-rs", "dimer", "dimer-factor", "meyer")
SYSTEMS_2D = ("ledrappier", "rs2d")


def _add_system_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--system", required=True, help=f"one of: {', '.join(generators.SYSTEMS)}")
    p.add_argument("--n", type=int, default=65536, help="window length (default 65536)")
    p.add_argument("--lo", type=int, default=0, help="first site for rs / bernoullised-rs (default 0)")
    p.add_argument("--hi", type=int, default=None, help="last site for rs (default lo + n - 1)")
    p.add_argument("--width", type=int, default=256, help="2D width (default 256)")
    p.add_argument("--height", type=int, default=256, help="2D height (default 256)")
    p.add_argument("--radius", type=float, default=100.0, help="disc radius for visible (default 100)")
    p.add_argument("--p", type=float, default=0.5, help="keep / +1 probability (default 0.5)")
    p.add_argument("--q", type=float, default=0.5, help="odd-site occupation for meyer (default 0.5)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="output path (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default csv)")


def _build(args):
    if args.system not in generators.SYSTEMS:
        raise InvalidInput(f"unknown system {args.system!r}; valid names: {', '.join(generators.SYSTEMS)}")
    return generators.generate(args.system, n=args.n, lo=args.lo, hi=args.hi, width=args.width,
                               height=args.height, radius=args.radius, p=args.p, q=args.q, seed=args.seed)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _serialise(obj, fmt: str, seed: int | None = None) -> str:
    if fmt == "json":
        return formats.to_json(obj)
    text = formats.to_csv(obj)
    if seed is not None and not text.startswith("#"):
        text = f"# seed={seed}\n" + text
    elif seed is not None and "seed=" not in text.splitlines()[0]:
        first, rest = text.split("\n", 1)
        text = f"{first}, seed={seed}\n{rest}"
    return text


def cmd_gen(args) -> int:
    obj = _build(args)
    _emit(_serialise(obj, args.format, args.seed), args.out)
    return 0


def cmd_autocorr(args) -> int:
    obj = _build(args)
    if isinstance(obj, SequenceWindow):
        est = correlation.autocorr_1d(obj, args.max_lag)
    elif isinstance(obj, LatticeConfig2D):
        est = correlation.autocorr_2d(obj, args.max_lag)
    else:
        est = correlation.autocorr_pointset(obj, args.max_lag if args.max_lag is not None else 2)
    est.meta.setdefault("seed", args.seed)
    _emit(_serialise(est, args.format, args.seed), args.out)
    return 0


def _parse_peaks(text: str | None, dim: int):
    if text is None:
        return spectra.DEFAULT_CANDIDATES if dim == 1 else ((0.0, 0.0),)
    if not text.strip():
        return ()
    vals = [float(v) for v in text.replace(";", ",").split(",")]
    if dim == 1:
        return tuple(vals)
    if len(vals) % 2:
        raise InvalidInput("2D peak candidates need pairs k1,k2")
    return tuple(zip(vals[0::2], vals[1::2]))


def cmd_spectrum(args) -> int:
    obj = _build(args)
    if isinstance(obj, SequenceWindow):
        est = spectra.periodogram_1d(obj, spectra.uniform_grid(args.k_points or spectra.DEFAULT_K_POINTS),
                                     args.blocks, _parse_peaks(args.peaks, 1))
    elif isinstance(obj, LatticeConfig2D):
        est = spectra.periodogram_2d(obj, spectra.uniform_grid(args.k_points or spectra.DEFAULT_K_POINTS_2D),
                                     args.blocks, _parse_peaks(args.peaks, 2))
    else:
        raise InvalidInput("spectrum of point sets: use the 'visible' experiment")
    est.meta["seed"] = args.seed
    if args.format == "json":
        _emit(formats.to_json(est), args.out)
    else:
        _emit(formats.spectrum_to_csv(est), args.out)
        if args.out is not None:
            out = Path(args.out)
            out.with_name(out.stem + ".peaks.csv").write_text(formats.peaks_to_csv(est))
        else:
            sys.stdout.write(formats.peaks_to_csv(est))
    return 0


def cmd_entropy(args) -> int:
    obj = _build(args)
    if isinstance(obj, LatticeConfig2D):
        rep = entropy.patch_census_2d(obj, args.max_l or 4, args.samples, SeededRng(args.seed))
        verdict = entropy.rank1_test(rep)
        sys.stderr.write(f"rank test: {verdict}\n")
    elif isinstance(obj, SequenceWindow):
        rep = entropy.block_entropy(obj, args.max_l or 8)
    else:
        raise InvalidInput("entropy of visible points is not estimated")
    _emit(_serialise(rep, args.format, args.seed), args.out)
    return 0


def cmd_experiment(args) -> int:
    name = args.name
    seeds = list(range(args.seed, args.seed + args.seeds)) if args.seeds else None
    kw: dict = {}
    if name in ("bernoullisation", "dimer", "meyer"):
        kw["n"] = args.n
    if name == "meyer":
        kw["q"] = args.q
        kw["epsilon"] = args.epsilon
    if name == "ledrappier":
        kw["size"] = args.size
    if name == "visible":
        kw["radius"] = args.radius
    elif seeds is not None:
        kw["seeds"] = seeds
    if args.blocks is not None and name in ("dimer", "meyer", "ledrappier"):
        kw["blocks"] = args.blocks
    if name != "visible":
        kw["threads"] = args.threads
    rep = experiments.run_experiment(name, **kw)
    sys.stdout.write(rep.table() + "\n")
    d = rep.to_dict()
    if not args.include_runtime:
        d.pop("runtime")
    if args.out:
        Path(args.out).write_text(formats.dumps_json(d))
    return 0 if rep.passed else 1


def cmd_compare(args) -> int:
    est = formats.load_spectrum(args.estimate, args.block_length)
    ref = spectra.reference(args.reference, p=args.p, q=args.q)
    grid = None
    if args.k_points:
        g = spectra.uniform_grid(args.k_points)
        if est.dim == 2:
            a, b = np.meshgrid(g, g, indexing="xy")
            g = np.stack([a.ravel(), b.ravel()], axis=1)
        grid = g
    ac, pp = spectra.measure_distance(est, ref, grid)
    ok_ac, ok_pp = ac <= args.ac_tol, pp <= args.pp_tol
    print(f"acLinf       {ac:.6g}  tol {args.ac_tol:g}  {'pass' if ok_ac else 'FAIL'}")
    print(f"ppMaxAbsErr  {pp:.6g}  tol {args.pp_tol:g}  {'pass' if ok_pp else 'FAIL'}")
    return 0 if ok_ac and ok_pp else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="homometry",
        description="Diffraction, autocorrelation and entropy of weighted Dirac combs. "
                    f"Systems: {', '.join(generators.SYSTEMS)}. Kernel backend: {BACKEND}.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    ap.add_argument("--threads", type=int, default=1, help="worker threads for seed loops")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a configuration", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_system_args(p)
    _add_output_args(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("autocorr", help="autocorrelation coefficients",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_system_args(p)
    p.add_argument("--max-lag", type=int, default=None, help="largest lag (default min(128, N/64))")
    _add_output_args(p)
    p.set_defaults(func=cmd_autocorr)

    p = sub.add_parser("spectrum", help="Bartlett periodogram and Bragg masses",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_system_args(p)
    p.add_argument("--blocks", type=int, default=64, help="Bartlett blocks (2D: perfect square)")
    p.add_argument("--k-points", type=int, default=None, help="grid size (default 256, 2D 16 per axis)")
    p.add_argument("--peaks", default=None, help="candidate k list for point masses (default 0,0.5)")
    _add_output_args(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("entropy", help="block entropies / patch census",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_system_args(p)
    p.add_argument("--max-l", type=int, default=None, help="largest block/patch size (default 8, 2D 4)")
    p.add_argument("--samples", type=int, default=10_000, help="sampled positions for 2D census")
    _add_output_args(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("experiment", help="run a verification experiment",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--name", required=True, choices=sorted(experiments.EXPERIMENTS))
    p.add_argument("--n", type=int, default=65536)
    p.add_argument("--seeds", type=int, default=None, help="number of seeds; None uses the experiment's own count")
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=0.9)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--radius", type=float, default=2000.0)
    p.add_argument("--blocks", type=int, default=None)
    p.add_argument("--include-runtime", action="store_true", help="write runtime into the JSON report")
    p.add_argument("--out", default=None, help="JSON report path")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("compare", help="score a spectrum file against a reference measure",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--estimate", required=True, help="spectrum .csv (with sibling .peaks.csv) or .json")
    p.add_argument("--reference", required=True, help=f"one of: {', '.join(spectra.REFERENCES)}")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--k-points", type=int, default=None, help="score on this uniform grid (default: all)")
    p.add_argument("--block-length", type=int, default=None, help="override L for CSV input")
    p.add_argument("--ac-tol", type=float, default=0.05)
    p.add_argument("--pp-tol", type=float, default=0.01)
    p.set_defaults(func=cmd_compare)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidInput as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (FileNotFoundError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
