"""Command-line front end: each subcommand reproduces one experiment family
as a CSV (or JSON) data product with a full provenance header.

    framelab ie-hist   --frame dss --p 947 --k 378 --trials 2000 --out ie.csv
    framelab eig-hist  --frame iid --n 947 --m 473 --k 378 --out eig.csv
    framelab rate-loss --p 0.2 --sdr-grid 0:60:1 --out loss.csv
    framelab mlie      --frame bl --n 13 --m 7 --k 5 --mode exhaustive --out mlie.csv
    framelab coder     --frame bl --n 16 --m 16 --k 16 --trials 100000 --out coder.csv
    framelab optimize  --frame bl --n 13 --m 7 --k 5 --out opt.csv
    framelab construct dss --p 7 --out dss7.frame

Headers are `# key=value` lines (sorted), one `timestamp` line excepted from
reproducibility: re-running with identical arguments reproduces every other
byte.  Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from . import __version__
from . import frames, patterns, rd, spectral
from .coder import SingularPatternError, simulate
from .optimize import local_search, verify_local_min

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    pass


class NumericalError(RuntimeError):
    pass


# --- output plumbing ---------------------------------------------------------

def _header_pairs(subcommand, config):
    pairs = [("subcommand", subcommand), ("version", __version__),
             ("timestamp", time.strftime("%Y-%m-%dT%H:%M:%S"))]
    pairs += sorted((k, v) for k, v in config.items())
    return pairs


def write_output(path, subcommand, config, columns, rows, fmt="csv"):
    if fmt == "json":
        payload = {k: v for k, v in _header_pairs(subcommand, config)}
        payload["columns"] = list(columns)
        payload["rows"] = [list(r) for r in rows]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1, default=str)
            fh.write("\n")
        return
    with open(path, "w", newline="") as fh:
        for k, v in _header_pairs(subcommand, config):
            fh.write(f"# {k}={v}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)


def _fmt(x):
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return repr(x)
    return x


# --- frame plumbing ----------------------------------------------------------

def add_frame_args(sub):
    sub.add_argument("--frame", choices=["bl", "iid", "dss", "spectrum", "paley"],
                     help="frame family")
    sub.add_argument("--n", type=int, help="source length (rows)")
    sub.add_argument("--m", type=int, help="transform dimension (columns)")
    sub.add_argument("--p", type=float, help="prime modulus for dss frames")
    sub.add_argument("--field", choices=["real", "complex"], default="real",
                     help="entry field for iid frames")
    sub.add_argument("--spectrum", help="comma list of frequencies, or 'random'")
    sub.add_argument("--spectrum-seed", type=int, default=0,
                     help="seed for --spectrum random")
    sub.add_argument("--frame-seed", type=int, default=0, help="seed for iid frames")


def build_frame(args):
    kind = args.frame
    if kind is None:
        raise ConfigError("--frame is required")
    try:
        if kind == "bl":
            if args.n is None or args.m is None:
                raise ConfigError("bl frames need --n and --m")
            return frames.build_bandlimited_dft(args.n, args.m)
        if kind == "iid":
            if args.n is None or args.m is None:
                raise ConfigError("iid frames need --n and --m")
            return frames.build_random_iid(args.n, args.m, field=args.field,
                                           seed=args.frame_seed)
        if kind == "dss":
            if args.p is None:
                raise ConfigError("dss frames need --p (a prime = 3 mod 4)")
            p = int(args.p)
            if p != args.p:
                raise ConfigError("--p must be an integer prime for dss frames")
            return frames.build_dss(p)
        if kind == "spectrum":
            if args.n is None or args.spectrum is None:
                raise ConfigError("spectrum frames need --n and --spectrum")
            if args.spectrum == "random":
                if args.m is None:
                    raise ConfigError("--spectrum random needs --m")
                rng = np.random.default_rng(args.spectrum_seed)
                spec = sorted(rng.choice(args.n, size=args.m, replace=False).tolist())
            else:
                spec = [int(tok) for tok in args.spectrum.split(",")]
            return frames.build_dft_spectrum(args.n, spec)
        if kind == "paley":
            if args.n is None:
                raise ConfigError("paley frames need --n (= q+1, q prime = 1 mod 4)")
            return frames.build_paley_etf(args.n)
    except frames.FrameError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown frame kind {kind!r}")


def frame_config(frame, args):
    cfg = {"frame": args.frame, "n": frame.n, "m": frame.m, "field": frame.field}
    if frame.kind == "random_iid":
        cfg["frame_seed"] = frame.seed
    if args.frame == "spectrum":
        cfg["spectrum"] = args.spectrum
        if args.spectrum == "random":
            cfg["spectrum_seed"] = args.spectrum_seed
    if args.frame == "dss":
        cfg["p_prime"] = int(args.p)
    return cfg


def _require_k(args, frame):
    if args.k is None:
        raise ConfigError("--k is required")
    if not 0 < args.k <= frame.m:
        raise ConfigError(f"need 0 < k <= m, got k={args.k}, m={frame.m}")
    return args.k


def _reference_limits(frame, k):
    beta = frame.m / k
    lims = {
        "beta": beta,
        "eta_floor": k / frame.m,
        "iid_limit": _fmt(rd_safe_inverse(beta)),
    }
    if frame.kind in ("dss", "dft_spectrum", "bandlimited_dft"):
        try:
            lims["manova_limit"] = _fmt(spectral.manova_eta_limit(beta, frame.m / frame.n))
        except ValueError:
            pass  # square frame or beta outside the law's domain: no limit to quote
    return lims


def rd_safe_inverse(beta):
    return math.inf if beta <= 1.0 else 1.0 / (beta - 1.0)


# --- subcommands -------------------------------------------------------------

def cmd_ie_hist(args):
    frame = build_frame(args)
    k = _require_k(args, frame)
    stats = patterns.ie_statistics(frame, k, mode=args.mode, trials=args.trials,
                                   seed=args.seed, bins=args.bins)
    config = frame_config(frame, args)
    config.update(_reference_limits(frame, k))
    config.update(k=k, mode=stats.mode, trials=stats.trials, seed=args.seed,
                  bins=args.bins, mean=_fmt(stats.mean), median=_fmt(stats.median),
                  mlie_bits=_fmt(stats.mlie),
                  fraction_singular=repr(stats.fraction_singular))
    rows = [(repr(float(lo)), repr(float(hi)), int(c)) for lo, hi, c in
            zip(stats.log_bin_edges[:-1], stats.log_bin_edges[1:], stats.log_counts)]
    write_output(args.out, "ie-hist", config, ("log10_eta_lo", "log10_eta_hi", "count"),
                 rows, args.format)
    return EXIT_OK


def _eig_reference(frame, k):
    beta = frame.m / k
    if frame.kind == "random_iid":
        return "marchenko_pastur", lambda x: spectral.mp_density(x, beta)
    if frame.kind in ("dss", "dft_spectrum"):
        return "manova", lambda x: spectral.manova_density(x, frame.m / frame.n, beta)
    return "none", lambda x: np.zeros_like(np.asarray(x, dtype=float))


def cmd_eig_hist(args):
    frame = build_frame(args)
    k = _require_k(args, frame)
    beta = frame.m / k
    ref_name, ref = _eig_reference(frame, k)
    if frame.kind == "random_iid":
        value_range = (0.0, 1.02 * spectral.mp_edges(beta)[1])
    else:
        value_range = (0.0, frame.n / frame.m)
    config = frame_config(frame, args)
    config.update(k=k, beta=beta, trials=args.trials, seed=args.seed,
                  bins=args.bins, reference=ref_name)

    out_zoom = zoom_path(args.out)
    for path, rng_ in ((args.out, value_range), (out_zoom, (0.0, 0.2))):
        hist = spectral.eigen_histogram(frame, k, trials=args.trials, bins=args.bins,
                                        seed=args.seed, value_range=rng_)
        cfg = dict(config)
        cfg.update(value_lo=rng_[0], value_hi=rng_[1],
                   min_eigenvalue=repr(hist.min_eigenvalue),
                   max_eigenvalue=repr(hist.max_eigenvalue))
        rows = [(repr(float(c)), repr(float(d)), repr(float(ref(np.array([c]))[0])))
                for c, d in zip(hist.bin_centers, hist.density)]
        write_output(path, "eig-hist", cfg,
                     ("bin_center", "empirical_density", "reference_density"),
                     rows, args.format)
    return EXIT_OK


def zoom_path(path):
    stem, dot, ext = path.rpartition(".")
    return f"{stem}_zoom.{ext}" if dot else f"{path}_zoom"


def parse_grid(spec):
    try:
        lo, hi, step = (float(tok) for tok in spec.split(":"))
    except ValueError:
        raise ConfigError(f"--sdr-grid wants lo:hi:step, got {spec!r}") from None
    if step <= 0 or hi < lo:
        raise ConfigError("--sdr-grid needs step > 0 and hi >= lo")
    out = []
    v = lo
    while v <= hi + 1e-9:
        out.append(round(v, 12))
        v += step
    return out


def cmd_rate_loss(args):
    if args.p is None or not 0.0 < args.p < 1.0:
        raise ConfigError("--p in (0, 1) is required")
    grid = parse_grid(args.sdr_grid)
    si = rd.si_benchmark(args.p)
    rows = []
    signs = []
    for db in grid:
        gamma = rd.gamma_from_db(db)
        if gamma <= 1.0:
            gamma = 1.0 + 1e-12  # 0 dB endpoint: open the gamma > 1 domain
        beta_star, delta_star = rd.optimize_beta(args.p, gamma)
        asym = rd.high_sdr_asymptote(args.p, gamma) if gamma > math.e else float("nan")
        rows.append((db, repr(gamma), repr(beta_star), repr(delta_star), repr(si),
                     _fmt(asym), repr(delta_star - si)))
        signs.append(delta_star - si)
    crossings = [
        (grid[i], grid[i + 1])
        for i in range(len(signs) - 1)
        if signs[i] == 0.0 or (signs[i] < 0.0) != (signs[i + 1] < 0.0)
    ]
    config = {
        "p": args.p, "sdr_grid": args.sdr_grid, "si_bits": repr(si),
        "crossover_count": len(crossings),
        "crossover_db": ";".join(f"{a}..{b}" for a, b in crossings) or "none",
    }
    write_output(args.out, "rate-loss", config,
                 ("sdr_db", "gamma", "beta_star", "delta_opt_bits", "si_bits",
                  "asymptote_bits", "delta_minus_si_bits"),
                 rows, args.format)
    return EXIT_OK


def cmd_mlie(args):
    frame = build_frame(args)
    k = _require_k(args, frame)
    try:
        stats = patterns.ie_statistics(frame, k, mode=args.mode, trials=args.trials,
                                       seed=args.seed, bins=args.bins)
    except patterns.PatternGuardError as exc:
        raise ConfigError(str(exc)) from None
    if stats.fraction_singular == 1.0:
        raise NumericalError("every pattern is singular; MLIE undefined")
    config = frame_config(frame, args)
    config.update(k=k, mode=stats.mode, trials=stats.trials, seed=args.seed,
                  mlie_bits=repr(stats.mlie), mean=_fmt(stats.mean),
                  median=_fmt(stats.median),
                  fraction_singular=repr(stats.fraction_singular))
    rows = [(repr(float(lo)), repr(float(hi)), int(c)) for lo, hi, c in
            zip(stats.log_bin_edges[:-1], stats.log_bin_edges[1:], stats.log_counts)]
    write_output(args.out, "mlie", config, ("log10_eta_lo", "log10_eta_hi", "count"),
                 rows, args.format)
    return EXIT_OK


def cmd_coder(args):
    frame = build_frame(args)
    k = _require_k(args, frame)
    fixed = None
    if args.pattern:
        fixed = tuple(int(tok) for tok in args.pattern.split(","))
    try:
        report = simulate(frame, k, args.sigma_x2, args.sigma_q2,
                          trials=args.trials, seed=args.seed, pattern=fixed)
    except SingularPatternError as exc:
        raise NumericalError(str(exc)) from None
    config = frame_config(frame, args)
    config.update(k=k, trials=args.trials, seed=args.seed,
                  sigma_x2=args.sigma_x2, sigma_q2=args.sigma_q2,
                  pattern=args.pattern or "sampled")
    rows = [
        ("empirical_distortion", repr(report.empirical_distortion)),
        ("model_distortion", repr(report.model_distortion)),
        ("empirical_f_energy", repr(report.empirical_f_energy)),
        ("model_f_energy", repr(report.model_f_energy)),
        ("empirical_rate_bits", _fmt(report.empirical_rate)),
        ("max_interp_error", repr(report.max_interp_error)),
        ("alpha", repr(report.alpha)),
        ("singular_skipped", report.singular_skipped),
    ]
    write_output(args.out, "coder", config, ("quantity", "value"), rows, args.format)
    return EXIT_OK


def cmd_optimize(args):
    frame = build_frame(args)
    k = _require_k(args, frame)
    config = frame_config(frame, args)
    try:
        if args.verify:
            eps = tuple(float(tok) for tok in args.epsilons.split(","))
            report = verify_local_min(frame, k, epsilons=eps, trials=args.trials,
                                      seed=args.seed, mode=args.pattern_mode,
                                      pattern_budget=args.budget)
            config.update(k=k, trials=args.trials, seed=args.seed,
                          epsilons=args.epsilons, pattern_mode=report.pattern_mode,
                          pattern_count=report.pattern_count,
                          base_mlie_bits=repr(report.initial_mlie))
            rows = [(repr(e), t, repr(frac), repr(dec))
                    for e, t, frac, dec in report.perturbation_verdicts]
            write_output(args.out, "optimize", config,
                         ("epsilon", "trials", "fraction_decreased", "max_decrease_bits"),
                         rows, args.format)
        else:
            report, final = local_search(frame, k, pattern_budget=args.budget,
                                         step_init=args.step, max_iters=args.iters,
                                         seed=args.seed)
            config.update(k=k, seed=args.seed, budget=args.budget,
                          pattern_mode=report.pattern_mode,
                          pattern_count=report.pattern_count,
                          initial_mlie_bits=repr(report.initial_mlie),
                          final_mlie_bits=repr(report.final_mlie),
                          converged=report.converged)
            if report.fresh_mlie is not None:
                config["fresh_mlie_bits"] = repr(report.fresh_mlie)
            rows = [(0, repr(report.mlie_history[0]), "")]
            rows += [(i + 1, repr(r), repr(s)) for i, (r, s) in
                     enumerate(zip(report.mlie_history[1:], report.step_history))]
            write_output(args.out, "optimize", config,
                         ("iteration", "sampled_mlie_bits", "step"), rows, args.format)
            if args.save_frame:
                frames.save_frame(final, args.save_frame)
    except patterns.PatternGuardError as exc:
        raise ConfigError(str(exc)) from None
    except (np.linalg.LinAlgError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise NumericalError(str(exc)) from None
    return EXIT_OK


def cmd_construct(args):
    frame = build_frame(args)
    out = args.out or f"frame_{frame.kind}_{frame.n}x{frame.m}.txt"
    frames.save_frame(frame, out)
    report = frames.verify_etf(frame)
    pairs = _header_pairs("construct", {
        **frame_config(frame, args),
        "kind": frame.kind,
        "out": out,
        "is_tight": report.is_tight,
        "tightness_error": repr(report.tightness_error),
        "is_equiangular": report.is_equiangular,
        "welch_bound": repr(report.welch_bound),
        "max_welch_deviation": repr(report.max_welch_deviation),
    })
    for key, val in pairs:
        print(f"# {key}={val}")
    return EXIT_OK


# --- parser ------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="framelab",
        description="Frames, erasure patterns, inverse-energy statistics, and "
                    "rate-loss accounting for analog coding experiments.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(s, trials=2000):
        add_frame_args(s)
        s.add_argument("--k", type=int, help="number of important samples")
        s.add_argument("--trials", type=int, default=trials)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--bins", type=int, default=60)
        s.add_argument("--out", required=True, help="output file")
        s.add_argument("--format", choices=["csv", "json"], default="csv")

    s = sub.add_parser("ie-hist", help="inverse-energy log-histogram over patterns")
    common(s)
    s.add_argument("--mode", choices=["auto", "exhaustive", "monte_carlo"], default="auto")
    s.set_defaults(func=cmd_ie_hist)

    s = sub.add_parser("eig-hist", help="Gram eigenvalue histogram with reference density")
    common(s, trials=200)
    s.set_defaults(bins=100)
    s.set_defaults(func=cmd_eig_hist)

    s = sub.add_parser("rate-loss", help="optimal-beta random-transform excess vs SI cost")
    s.add_argument("--p", type=float, help="importance fraction k/n")
    s.add_argument("--sdr-grid", default="0:60:1", help="SDR grid in dB, lo:hi:step")
    s.add_argument("--out", required=True)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.set_defaults(func=cmd_rate_loss)

    s = sub.add_parser("mlie", help="mean logarithmic inverse energy of a frame")
    common(s)
    s.add_argument("--mode", choices=["auto", "exhaustive", "monte_carlo"], default="auto")
    s.set_defaults(func=cmd_mlie)

    s = sub.add_parser("coder", help="Monte Carlo run of the analog coding chain")
    common(s, trials=10000)
    s.add_argument("--sigma-x2", type=float, default=1.0)
    s.add_argument("--sigma-q2", type=float, default=1.0)
    s.add_argument("--pattern", help="fixed pattern as comma-separated indices")
    s.set_defaults(func=cmd_coder)

    s = sub.add_parser("optimize", help="MLIE descent or local-minimum verification")
    common(s, trials=200)
    s.add_argument("--budget", type=int, default=500, help="pattern budget")
    s.add_argument("--iters", type=int, default=200)
    s.add_argument("--step", type=float, default=1e-2)
    s.add_argument("--verify", action="store_true", help="probe local minimality instead")
    s.add_argument("--epsilons", default="1e-3,1e-2")
    s.add_argument("--pattern-mode", choices=["exhaustive", "mc"], default="exhaustive")
    s.add_argument("--save-frame", help="write the final frame here")
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("construct", help="build a frame, save it, report ETF status")
    s.add_argument("family", choices=["bl", "iid", "dss", "spectrum", "paley"])
    add_frame_args(s)
    s.add_argument("--out", help="frame file (default derived from the family)")
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.set_defaults(func=cmd_construct)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand == "construct":
        args.frame = args.family
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
