"""Batch front-end: subcommand dispatch, caching, CSV/JSON emission.

Exit codes: 0 success, 2 configuration/validation error, 3 numerical
failure.  All CSV floats are written with repr (shortest round-trip), so
identical configs give byte-identical outputs regardless of --threads.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, parse_config
from .errors import ConfigurationError, MultibumpError, NumericalFailureError
from .ground_state import get_profile
from .interaction import cross_term, interaction_constant, potential_tail
from .params import PeakConfiguration, WindowSpec
from .reduced import (
    balance_radius,
    optimize_radius,
    reduced_F1,
    reduced_constants,
    scaling_table,
    window_sign_check,
)
from .spectral import nondegeneracy_report, sector_eigs

SUBCOMMANDS = ("ground-state", "spectrum", "interaction", "reduce", "scan",
               "refine", "all")


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _write_dat(path: Path, pairs) -> None:
    """gnuplot-compatible two-column data."""
    path.write_text("\n".join(f"{_fmt(a)} {_fmt(b)}" for a, b in pairs) + "\n")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _profile(cfg: RunConfig, cache: Path | None):
    return get_profile(cfg.params.N, cfg.params.p, cfg.gs_r_max, cfg.gs_tol,
                       cache_dir=cache)


def run_ground_state(cfg: RunConfig, out: Path, cache: Path | None) -> None:
    prof = _profile(cfg, cache)
    m = prof.moments
    _write_json(out / "ground_state.json", {
        "N": cfg.params.N, "p": cfg.params.p,
        "U0": prof.U0, "decay_C": prof.decay_C,
        "decay_variation": prof.decay_variation,
        "I2": m.I2, "Ip": m.Ip, "Igrad": m.Igrad,
        "splice_r": prof.splice_r,
    })
    _write_dat(out / "profile.dat",
               zip(prof.r_grid.tolist(), prof.U_values.tolist()))
    print(f"ground-state: U(0)={prof.U0:.12g} C={prof.decay_C:.12g} "
          f"plateau variation {prof.decay_variation:.3g}")


def run_spectrum(cfg: RunConfig, out: Path, cache: Path | None) -> None:
    prof = _profile(cfg, cache)
    rows = []
    for ell in cfg.spec_ells:
        spec = sector_eigs(prof, ell, cfg.spec_count, cfg.spec_r_max,
                           cfg.spec_n_points)
        for i, (lam, est) in enumerate(zip(spec.eigenvalues,
                                           spec.converged_estimate)):
            rows.append((ell, i, float(lam), float(est)))
    _write_csv(out / "spectrum.csv", "ell,index,lambda,converged_estimate", rows)
    rep = nondegeneracy_report(prof, cfg.spec_r_max, cfg.spec_n_points)
    _write_json(out / "nondegeneracy.json", {
        "neg_count_ell0": rep.neg_count_ell0,
        "lambda0_ell1": rep.lambda0_ell1,
        "lambda0_ell1_estimate": rep.lambda0_ell1_estimate,
        "overlap_ell1": rep.overlap_ell1,
        "lambda0_ell2": rep.lambda0_ell2,
    })
    print(f"spectrum: neg(l=0)={rep.neg_count_ell0} "
          f"lambda0(l=1)={rep.lambda0_ell1:.3e} overlap={rep.overlap_ell1:.6f}")


def run_interaction(cfg: RunConfig, out: Path, cache: Path | None) -> None:
    prof = _profile(cfg, cache)
    fit = interaction_constant(prof, cfg.int_d_lo, cfg.int_d_hi, cfg.int_n)
    nu = (cfg.params.N - 1) / 2.0
    rows = [
        (float(d), float(w), float(w * d**nu * math.exp(d)))
        for d, w in zip(fit.d_samples, fit.w_values)
    ]
    _write_csv(out / "interaction.csv", "d,w,B1_hat_local", rows)
    tail_rows = []
    beta_eps = cfg.params.eps**cfg.params.N * prof.moments.I2
    for rho in cfg.tail_rho:
        T = potential_tail(prof, cfg.params.eps, cfg.potential, rho)
        ratio = T * rho**cfg.potential.m / (cfg.potential.sign * cfg.potential.a
                                            * beta_eps)
        tail_rows.append((float(rho), float(T), float(ratio)))
    _write_csv(out / "tail.csv", "rho,T,coeff_ratio", tail_rows)
    _write_json(out / "interaction.json", {
        "B1_hat": fit.B1_hat,
        "plateau_variation": fit.plateau_variation,
        "non_plateau_warning": fit.non_plateau_warning,
    })
    print(f"interaction: B1={fit.B1_hat:.8g} variation={fit.plateau_variation:.3g}"
          + (" [non-plateau]" if fit.non_plateau_warning else ""))


def run_reduce(cfg: RunConfig, out: Path, cache: Path | None) -> None:
    prof = _profile(cfg, cache)
    fit = interaction_constant(prof, cfg.int_d_lo, cfg.int_d_hi, cfg.int_n)
    consts = reduced_constants(prof, cfg.params.eps, fit.B1_hat)
    window = cfg.window()
    k = cfg.k
    opt = optimize_radius(k, cfg.mode, window, consts, cfg.potential)
    signs = window_sign_check(k, window.theta, consts, cfg.potential, cfg.mode)
    _write_json(out / "reduce.json", {
        "k": k, "mode": cfg.mode,
        "alpha": consts.alpha, "beta": consts.beta, "B1": consts.B1,
        "window_lo": window.lo(k), "window_hi": window.hi(k),
        "r_opt": opt.r_opt, "F_opt": opt.F_opt,
        "boundary_hit": opt.boundary_hit,
        "r_balance": signs.r_balance,
        "balance_root_found": signs.balance_root_found,
        "lower_negative": signs.lower_negative,
        "upper_below_peak": signs.upper_below_peak,
    })
    rs = np.exp(np.linspace(math.log(window.lo(k)), math.log(window.hi(k)), 64))
    _write_dat(out / "reduced_F1.dat",
               [(float(r), float(reduced_F1(r, k, cfg.mode, consts, cfg.potential)))
                for r in rs])
    print(f"reduce: k={k} r_opt={opt.r_opt:.6g} r_balance={signs.r_balance:.6g} "
          f"boundary={opt.boundary_hit}")


def run_scan(cfg: RunConfig, out: Path, cache: Path | None) -> None:
    prof = _profile(cfg, cache)
    fit = interaction_constant(prof, cfg.int_d_lo, cfg.int_d_hi, cfg.int_n)
    consts = reduced_constants(prof, cfg.params.eps, fit.B1_hat)
    rows = scaling_table(cfg.k_list, cfg.mode, consts, cfg.potential,
                         theta=cfg.window().theta)
    _write_csv(
        out / "scan.csv",
        "k,r_opt,ratio,target,rel_err,boundary_flag",
        [(r.k, r.r_opt, r.ratio, r.target, r.rel_err, r.boundary_flag)
         for r in rows],
    )
    _write_dat(out / "scan.dat",
               [(r.k, r.ratio) for r in rows if not math.isnan(r.ratio)])
    for r in rows:
        print(f"scan: k={r.k} ratio={r.ratio:.6g} target={r.target:.6g} "
              f"rel_err={r.rel_err:.4g} [{r.boundary_flag}]")


def _refine_setup(cfg: RunConfig, consts, opt_r: float):
    """Grid sized from the resolution gate and boundary margin."""
    from .pde import Grid3

    eps = cfg.params.eps
    L = opt_r + eps * cfg.refine_box_margin_log
    if cfg.refine_n:
        n = cfg.refine_n
    else:
        n = int(math.ceil(2.0 * L / (eps / 6.0))) - 1
        n += n % 2
    return Grid3(L=L, n=n)


def estimate_refine_cost(cfg: RunConfig) -> str:
    eps = cfg.params.eps
    L_est = 1.0 + eps * cfg.refine_box_margin_log
    n = cfg.refine_n or int(math.ceil(12.0 * L_est / eps))
    nodes = n * (n // 2) ** 2
    minutes = max(1, int(nodes / 1.7e6 * 8))
    return (f"refine needs roughly a {n}^3 grid ({nodes / 1e6:.1f}M stored nodes, "
            f"~{minutes} min); pass --allow-heavy to run it")


def run_refine(cfg: RunConfig, out: Path, cache: Path | None) -> None:
    from .pde import (build_ansatz, extract_peaks, newton_refine,
                      solve_concentrated_radial, write_field)
    from .pde.analysis import hessian_edge_eigs

    prof = _profile(cfg, cache)
    fit = interaction_constant(prof, cfg.int_d_lo, cfg.int_d_hi, cfg.int_n)
    consts = reduced_constants(prof, cfg.params.eps, fit.B1_hat)
    eps = cfg.params.eps
    k = cfg.k
    window = WindowSpec(eps=eps, m=cfg.potential.m, mode=cfg.mode,
                        theta=cfg.window().theta)
    opt = optimize_radius(k, cfg.mode, window, consts, cfg.potential)
    grid = _refine_setup(cfg, consts, opt.r_opt)
    print(f"refine: k={k} r_opt={opt.r_opt:.4g} grid n={grid.n} L={grid.L:.3g} "
          f"h={grid.h:.4g}")
    radial = solve_concentrated_radial(
        cfg.potential, eps, cfg.params, prof, tol=1e-10,
        S=math.sqrt(3.0) * grid.L + 1.0,
    )
    config = PeakConfiguration(k=k, r=opt.r_opt, mode=cfg.mode)
    W = build_ansatz(radial, prof, config, eps, grid,
                     bc_margin=eps * cfg.refine_box_margin_log)
    refined, report = newton_refine(W, cfg.potential, eps, cfg.params,
                                    tol=cfg.refine_tol,
                                    max_iter=cfg.refine_max_iter)
    _write_json(out / "newton_report.json", {
        "iterations": report.iterations,
        "residuals": report.residual_history,
        "correction_norm": report.correction_norm,
        "converged": report.converged,
    })
    write_field(out / "refined.mbf", refined)
    peaks = extract_peaks(refined, cfg.peak_threshold)
    _write_csv(
        out / "peaks.csv", "x,y,z,value,sign",
        [(float(p.position[0]), float(p.position[1]), float(p.position[2]),
          p.value, p.sign) for p in peaks.peaks],
    )
    spec = hessian_edge_eigs(refined, cfg.potential, eps, cfg.params, count=2)
    _write_json(out / "edge_eigs.json", {
        "eigenvalues": spec.eigenvalues.tolist(),
        "converged": spec.converged,
    })
    status = "converged" if report.converged else "NOT converged"
    print(f"refine: {status} in {report.iterations} iterations, "
          f"residual {report.residual_history[-1]:.3e}, "
          f"{len(peaks.peaks)} peaks, edge |lambda|min "
          f"{min(abs(v) for v in spec.eigenvalues):.3e}")
    if not report.converged:
        raise NumericalFailureError(
            f"refinement did not converge (residual "
            f"{report.residual_history[-1]:.3e}); pre-asymptotic parameters?"
        )


def run(subcommand: str, config_path: str | None, out_dir: str = "out",
        cache_dir: str | None = None, allow_heavy: bool = False) -> int:
    """Dispatch a subcommand; returns the process exit code."""
    try:
        cfg = parse_config(config_path)
    except MultibumpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cache = Path(cache_dir) if cache_dir else None

    steps = {
        "ground-state": [run_ground_state],
        "spectrum": [run_spectrum],
        "interaction": [run_interaction],
        "reduce": [run_reduce],
        "scan": [run_scan],
        "refine": [run_refine],
        "all": [run_ground_state, run_spectrum, run_interaction, run_reduce,
                run_scan],
    }[subcommand]
    if subcommand == "refine" and not allow_heavy:
        print(f"error: {estimate_refine_cost(cfg)}", file=sys.stderr)
        return 2
    if subcommand == "all" and allow_heavy:
        steps = steps + [run_refine]

    try:
        for step in steps:
            step(cfg, out, cache)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MultibumpError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="multibump",
        description="Desk-scale numerics for multi-bump concentration rings",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", default=None, help="INI config file")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--cache", default=None, help="profile cache directory")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads (results are thread-count independent)")
    parser.add_argument("--allow-heavy", action="store_true",
                        help="allow the 3D Newton refinement to run")
    args = parser.parse_args(argv)
    return run(args.subcommand, args.config, args.out, args.cache,
               args.allow_heavy)


if __name__ == "__main__":
    sys.exit(main())
