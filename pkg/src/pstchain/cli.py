"""Command-line pipeline: design chains, simulate transfer, run ensembles.

Each subcommand writes one CSV table with a JSON metadata preamble carrying
the full resolved parameter set (including seeds and the RNG scheme), so any
output file can be regenerated bit-identically from its own header.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(incommensurate spectrum or unstable reconstruction).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .analysis import (
    detect_first_maximum,
    level_shift_stats,
    participation_ratio,
    site_probabilities,
    window_curvature,
    window_width,
)
from .disorder import (
    RNG_ALGORITHM_ID,
    DisorderModel,
    echo_decay,
    fidelity_vs_strength,
    run_ensemble,
)
from .dynamics import diagonalize, fidelity_trace
from .errors import (
    NoEchoError,
    NotCommensurateError,
    NoWindowError,
    ReconstructionUnstableError,
)
from .pipeline import design_chain
from .spectra import FAMILIES, SpectrumSpec, commensurate_adjust, generate_spectrum, max_relative_change, pst_time
from .tableio import render_table, write_table

THREADS_ENV_VAR = "PSTCHAIN_THREADS"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags; normalize other codes too
        return int(exc.code) if exc.code else EXIT_OK
    try:
        args.handler(args)
    except (NotCommensurateError, ReconstructionUnstableError, NoWindowError, NoEchoError) as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pstchain",
        description="Design spin-chain channels for perfect state transfer and "
        "quantify their robustness under static coupling disorder.",
    )
    parser.add_argument("--version", action="version", version=f"pstchain {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="generate a PST-compatible energy spectrum")
    _add_family_args(sp)
    sp.add_argument(
        "--no-adjust",
        action="store_true",
        help="fail instead of readjusting an incommensurate spectrum",
    )
    _add_output_arg(sp)
    sp.set_defaults(handler=cmd_spectrum)

    ch = sub.add_parser("chain", help="reconstruct the coupling pattern of a spectrum")
    _add_family_args(ch)
    ch.add_argument(
        "--no-normalize",
        action="store_true",
        help="keep raw couplings instead of rescaling to max J = 1",
    )
    _add_output_arg(ch)
    ch.set_defaults(handler=cmd_chain)

    sim = sub.add_parser("simulate", help="unperturbed fidelity trace over time")
    _add_family_args(sim)
    sim.add_argument("--periods", type=float, default=2.0, help="trace length in units of t_pst (default 2)")
    sim.add_argument("--points-per-period", type=int, default=2000, help="grid points per t_pst (default 2000)")
    _add_output_arg(sim)
    sim.set_defaults(handler=cmd_simulate)

    ens = sub.add_parser("ensemble", help="disorder-averaged fidelity statistics")
    _add_family_args(ens)
    ens.add_argument("--eps", type=float, default=0.01, help="relative disorder strength (default 0.01)")
    ens.add_argument("--nav", type=int, default=100, help="number of realizations (default 100)")
    ens.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    ens.add_argument("--echoes", type=int, default=None, help="evaluate at the first K transfer echoes instead of a time grid")
    ens.add_argument("--sweep", type=str, default=None, help="comma-separated disorder strengths; mean fidelity at t_pst per strength")
    ens.add_argument("--periods", type=float, default=2.0, help="time-grid length in units of t_pst (trace mode)")
    ens.add_argument("--points-per-period", type=int, default=200, help="grid points per t_pst (trace mode, default 200)")
    ens.add_argument("--threads", type=int, default=None, help=f"worker threads (default ${THREADS_ENV_VAR} or 1)")
    _add_output_arg(ens)
    ens.set_defaults(handler=cmd_ensemble)

    ana = sub.add_parser("analyze", help="localization, level-shift and window diagnostics")
    _add_family_args(ana)
    mode = ana.add_mutually_exclusive_group(required=True)
    mode.add_argument("--localization", action="store_true", help="eigenvector probability map")
    mode.add_argument("--level-shifts", action="store_true", help="per-level disorder shift statistics")
    mode.add_argument("--window", action="store_true", help="read-out window metrics")
    ana.add_argument("--eps", type=float, default=0.01, help="disorder strength (level-shift mode)")
    ana.add_argument("--nav", type=int, default=1000, help="realizations (level-shift mode, default 1000)")
    ana.add_argument("--seed", type=int, default=0, help="base seed (level-shift mode)")
    ana.add_argument("--threshold", type=float, default=0.99, help="window fidelity threshold (window mode, default 0.99)")
    ana.add_argument("--points-per-period", type=int, default=2000, help="trace resolution (window mode)")
    _add_output_arg(ana)
    ana.set_defaults(handler=cmd_analyze)

    rep = sub.add_parser("reproduce", help="write the full data-product set for the five standard families")
    rep.add_argument("--outdir", type=str, default="pstchain_out", help="output directory (default ./pstchain_out)")
    rep.add_argument("--n", type=int, default=31, help="chain length (default 31)")
    rep.add_argument("--nav", type=int, default=100, help="realizations per ensemble (default 100)")
    rep.add_argument("--seed", type=int, default=0, help="base seed")
    rep.add_argument("--threads", type=int, default=None, help=f"worker threads (default ${THREADS_ENV_VAR} or 1)")
    rep.set_defaults(handler=cmd_reproduce)

    return parser


def _add_family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=FAMILIES, required=True, help="spectrum family")
    p.add_argument("--alpha", type=float, required=True, help="shape exponent (> 0)")
    p.add_argument("--n", type=int, required=True, help="number of sites (odd, >= 3)")
    p.add_argument("--amplitude", type=float, default=1.0, help="energy scale before normalization (default 1)")
    p.add_argument(
        "--base-search-tolerance",
        type=float,
        default=1e-4,
        help="scan resolution of the commensuration search (default 1e-4)",
    )


def _add_output_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=str, default=None, help="output CSV path (default: stdout)")


def _threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        return max(1, args.threads)
    return max(1, int(os.environ.get(THREADS_ENV_VAR, "1")))


def _emit(args, metadata: dict, columns: list[str], rows) -> None:
    if args.out is None:
        sys.stdout.write(render_table(metadata, columns, rows))
    else:
        write_table(args.out, metadata, columns, rows)


def _metadata(command: str, params: dict, results: dict | None = None) -> dict:
    meta = {"tool": "pstchain", "version": __version__, "command": command, "params": params}
    if results:
        meta["results"] = results
    return meta


def _family_params(args) -> dict:
    return {
        "family": args.family,
        "alpha": args.alpha,
        "n": args.n,
        "amplitude": args.amplitude,
        "base_search_tolerance": args.base_search_tolerance,
    }


def cmd_spectrum(args) -> None:
    spec = SpectrumSpec(
        n_sites=args.n, family=args.family, exponent=args.alpha, amplitude=args.amplitude
    )
    raw = generate_spectrum(spec)
    if args.no_adjust:
        timing = pst_time(raw)
        spectrum, adjustment = raw, 0.0
    else:
        spectrum, timing = commensurate_adjust(raw, args.base_search_tolerance)
        adjustment = max_relative_change(raw, spectrum)
    params = _family_params(args) | {"no_adjust": bool(args.no_adjust)}
    results = {
        "t_pst": timing.t_pst,
        "odd_multipliers": timing.odd_multipliers,
        "max_adjustment_rel": adjustment,
    }
    rows = [(k + 1, v) for k, v in enumerate(spectrum.values)]
    _emit(args, _metadata("spectrum", params, results), ["level_index", "energy"], rows)


def cmd_chain(args) -> None:
    chain = design_chain(
        n_sites=args.n,
        family=args.family,
        exponent=args.alpha,
        amplitude=args.amplitude,
        normalize=not args.no_normalize,
        base_search_tolerance=args.base_search_tolerance,
    )
    params = _family_params(args) | {"normalize": not args.no_normalize}
    results = {
        "t_pst": chain.t_pst,
        "gamma": chain.gamma,
        "j_max": chain.couplings.j_max,
        "residual": chain.residual,
        "max_adjustment_rel": chain.max_adjustment,
    }
    j = chain.couplings.couplings
    j_max = chain.couplings.j_max
    rows = [(i + 1, j[i], j[i] / j_max, chain.residual) for i in range(j.size)]
    _emit(
        args,
        _metadata("chain", params, results),
        ["bond_index", "coupling", "coupling_over_jmax", "residual"],
        rows,
    )


def cmd_simulate(args) -> None:
    chain = design_chain(
        args.n, args.family, args.alpha, args.amplitude,
        base_search_tolerance=args.base_search_tolerance,
    )
    if args.periods <= 0 or args.points_per_period < 2:
        raise ValueError("periods must be positive and points-per-period >= 2")
    n_points = int(round(args.periods * args.points_per_period)) + 1
    trace = fidelity_trace(diagonalize(chain.couplings), 0.0, args.periods * chain.t_pst, n_points)
    params = _family_params(args) | {
        "periods": args.periods, "points_per_period": args.points_per_period,
    }
    results = {"t_pst": chain.t_pst, "gamma": chain.gamma}
    rows = zip(trace.times, trace.times / chain.t_pst, trace.amplitude_abs, trace.fidelity)
    _emit(
        args,
        _metadata("simulate", params, results),
        ["time", "time_over_tpst", "amplitude_abs", "fidelity"],
        rows,
    )


def cmd_ensemble(args) -> None:
    if args.echoes is not None and args.sweep is not None:
        raise ValueError("--echoes and --sweep are mutually exclusive")
    chain = design_chain(
        args.n, args.family, args.alpha, args.amplitude,
        base_search_tolerance=args.base_search_tolerance,
    )
    workers = _threads(args)
    params = _family_params(args) | {
        "eps": args.eps,
        "nav": args.nav,
        "base_seed": args.seed,
        "rng_algorithm_id": RNG_ALGORITHM_ID,
    }
    results = {"t_pst": chain.t_pst, "gamma": chain.gamma}

    if args.sweep is not None:
        strengths = [float(tok) for tok in args.sweep.split(",") if tok.strip()]
        if not strengths:
            raise ValueError("--sweep needs at least one strength")
        table = fidelity_vs_strength(
            chain.couplings, strengths, args.nav, args.seed, n_workers=workers
        )
        params["sweep"] = strengths
        _emit(
            args,
            _metadata("ensemble", params, results),
            ["epsilon", "mean_fidelity", "std_error"],
            table,
        )
        return

    model = DisorderModel(epsilon=args.eps, n_realizations=args.nav, base_seed=args.seed)
    if args.echoes is not None:
        res = echo_decay(chain.couplings, model, args.echoes, n_workers=workers)
        params["echoes"] = args.echoes
        rows = [
            (i + 1, res.times[i], res.mean_fidelity[i], res.std_error[i])
            for i in range(res.times.size)
        ]
        _emit(
            args,
            _metadata("ensemble", params, results),
            ["echo_index", "time", "mean_fidelity", "std_error"],
            rows,
        )
        return

    if args.periods <= 0 or args.points_per_period < 2:
        raise ValueError("periods must be positive and points-per-period >= 2")
    n_points = int(round(args.periods * args.points_per_period)) + 1
    times = np.linspace(0.0, args.periods * chain.t_pst, n_points)
    res = run_ensemble(chain.couplings, model, times, n_workers=workers)
    params |= {"periods": args.periods, "points_per_period": args.points_per_period}
    rows = zip(res.times, res.times / chain.t_pst, res.mean_fidelity, res.std_error)
    _emit(
        args,
        _metadata("ensemble", params, results),
        ["time", "time_over_tpst", "mean_fidelity", "std_error"],
        rows,
    )


def cmd_analyze(args) -> None:
    chain = design_chain(
        args.n, args.family, args.alpha, args.amplitude,
        base_search_tolerance=args.base_search_tolerance,
    )
    eig = diagonalize(chain.couplings)
    params = _family_params(args)
    if args.localization:
        pmap = site_probabilities(eig)
        results = {
            "t_pst": chain.t_pst,
            "participation_ratio_site1": participation_ratio(pmap.p[:, 0]),
        }
        rows = [
            (k + 1, i + 1, pmap.p[k, i])
            for k in range(args.n)
            for i in range(args.n)
        ]
        _emit(
            args,
            _metadata("analyze-localization", params, results),
            ["level_index", "site_index", "probability"],
            rows,
        )
        return

    if args.level_shifts:
        model = DisorderModel(epsilon=args.eps, n_realizations=args.nav, base_seed=args.seed)
        stats = level_shift_stats(chain.couplings, model)
        params |= {
            "eps": args.eps,
            "nav": args.nav,
            "base_seed": args.seed,
            "rng_algorithm_id": RNG_ALGORITHM_ID,
        }
        results = {"normalization": stats.normalization, "t_pst": chain.t_pst}
        rows = [
            (
                k + 1,
                stats.omega_unperturbed[k],
                stats.std[k],
                stats.normalized_std[k],
                stats.mean_shift[k],
                stats.normalized_mean_shift[k],
            )
            for k in range(args.n)
        ]
        _emit(
            args,
            _metadata("analyze-level-shifts", params, results),
            [
                "level_index",
                "energy",
                "std_shift",
                "std_shift_normalized",
                "mean_shift",
                "mean_shift_normalized",
            ],
            rows,
        )
        return

    # window mode: coarse trace for the first maximum, fine trace for the width
    # (the +-7% span covers the widest 0.99-window among the standard families)
    coarse = fidelity_trace(eig, 0.0, 1.05 * chain.t_pst, int(1.05 * args.points_per_period) + 1)
    first = detect_first_maximum(coarse)
    fine = fidelity_trace(eig, 0.93 * chain.t_pst, 1.07 * chain.t_pst, 28001)
    width = window_width(fine, args.threshold)
    params |= {"threshold": args.threshold, "points_per_period": args.points_per_period}
    results = {"t_pst": chain.t_pst, "gamma": chain.gamma}
    rows = [
        (
            chain.t_pst,
            chain.gamma,
            window_curvature(eig),
            width,
            first.first_max_time,
            first.first_max_fidelity,
        )
    ]
    _emit(
        args,
        _metadata("analyze-window", params, results),
        ["t_pst", "gamma", "curvature", "width", "first_max_time", "first_max_fidelity"],
        rows,
    )


def cmd_reproduce(args) -> None:
    from .pipeline import STANDARD_FAMILIES

    os.makedirs(args.outdir, exist_ok=True)
    written = []

    def run(argv, filename):
        path = os.path.join(args.outdir, filename)
        code = main(argv + ["--out", path])
        if code != 0:
            raise ValueError(f"stage failed with exit code {code}: {argv}")
        written.append(path)

    thread_args = ["--threads", str(_threads(args))]
    for name, (family, alpha) in STANDARD_FAMILIES.items():
        base = ["--family", family, "--alpha", repr(alpha), "--n", str(args.n)]
        seed = ["--seed", str(args.seed)]
        run(["spectrum"] + base, f"spectrum_{name}.csv")
        run(["chain"] + base, f"chain_{name}.csv")
        run(["simulate"] + base + ["--periods", "2"], f"trace_{name}.csv")
        run(
            ["ensemble"] + base + seed + thread_args
            + ["--eps", "0.01", "--nav", str(args.nav), "--periods", "2"],
            f"ensemble_trace_{name}.csv",
        )
        run(
            ["ensemble"] + base + seed + thread_args
            + ["--eps", "0.01", "--nav", str(args.nav), "--echoes", "9"],
            f"echoes_{name}.csv",
        )
        run(
            ["ensemble"] + base + seed + thread_args
            + ["--nav", str(args.nav), "--sweep", "0.01,0.05,0.1,0.15,0.2,0.25,0.3"],
            f"strength_sweep_{name}.csv",
        )
        run(["analyze", "--localization"] + base, f"localization_{name}.csv")
        run(
            ["analyze", "--level-shifts"] + base + seed
            + ["--eps", "0.01", "--nav", str(args.nav)],
            f"level_shifts_{name}.csv",
        )
        run(["analyze", "--window"] + base, f"window_{name}.csv")
    print(f"wrote {len(written)} files to {args.outdir}")


if __name__ == "__main__":
    sys.exit(main())
