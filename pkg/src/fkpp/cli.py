"""Command-line orchestration: eig, run, verify, attractor, fronts.

Exit codes: 0 pass, 1 check failure, 2 config error, 3 numerical failure,
4 front-guard stop.  All emitted CSV/NDJSON is byte-reproducible for a given
config and seed (floats printed with 17 significant digits, no RNG in any
pipeline path).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import attractor as attr
from . import bounds as bnd
from . import fronts as frt
from .config import RunConfig, load_config_file, load_preset
from .eigen import principal_eigenpair
from .errors import ConfigError, NumericalError
from .fracop import estimate_D, operator_tolerance
from .grid import make_grid
from .io import ndjson_line, write_eigenpair, write_front_csv, write_kpf1, read_front_csv, fmt
from .kernels import set_num_threads
from .solver import init_state, run, steady_state

EXIT_PASS = 0
EXIT_CHECK = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_GUARD = 4

ORDERING_SLACK = 1e-6
RADIUS_SLACK = 0.05
ATTRACTOR_SLACK = 1e-3


def _load(args) -> RunConfig:
    if getattr(args, "preset", None):
        return load_preset(args.preset)
    if getattr(args, "config", None):
        return load_config_file(args.config)
    raise ConfigError("need --config PATH or --preset NAME")


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_lines(path: Path, lines) -> None:
    path.write_text("".join(line + "\n" for line in lines))


def _eigen(cfg: RunConfig):
    return principal_eigenpair(cfg.medium(), cfg.order(), tol=1e-10, max_iter=300)


def _exponent(eig, ord) -> float:
    return abs(eig.lambda1) / ord.p


# --------------------------------------------------------------------------
# run machinery shared by run/verify/attractor
# --------------------------------------------------------------------------

def _execute(cfg: RunConfig, eig, out: Path | None = None, write_snaps: bool = False,
             keep_times=()):
    ord = cfg.order()
    box = cfg.box_grid()
    mu_cell = cfg.medium()
    u0 = cfg.initial(box)
    state = init_state(u0, mu_cell, ord, box)
    scfg = cfg.solver_config()
    offsets = [frt.parse_direction(s, cfg.d) for s in cfg.directions]
    r_cap = scfg.front_guard * min(box.L) / 2
    mu_min = float(mu_cell.data.min())
    records: list[frt.FrontRecord] = []
    states: dict[float, object] = {}
    keep = sorted(float(t) for t in keep_times)

    def sink(st):
        for level in cfg.levels:
            for di, off in enumerate(offsets):
                ri, ro = frt.extract_front(st.u, level, off, r_max=r_cap, mu_min=mu_min)
                records.append(frt.FrontRecord(t=st.t, level=level, dir_index=di,
                                               r_inner=ri, r_outer=ro))
        if write_snaps and out is not None:
            write_kpf1(out / f"snap_{st.t:012.6f}.kpf1", st.u, st.t)
        for tk in keep:
            if abs(st.t - tk) < 1e-9:
                states[tk] = st.u.copy()

    guard_level = min(cfg.levels) if cfg.levels else None
    report = run(state, scfg, sinks=[sink], guard_level=guard_level)
    return {"ord": ord, "box": box, "mu_cell": mu_cell, "records": records,
            "states": states, "report": report, "scfg": scfg, "offsets": offsets}


def _fit_lines(cfg: RunConfig, eig, records) -> list[str]:
    ord = cfg.order()
    theory = _exponent(eig, ord)
    window = (cfg[("fronts", "fit_t_min")], cfg[("fronts", "fit_t_max")])
    lines = []
    fits_by_level: dict[float, list] = {}
    for level in cfg.levels:
        for di in range(len(cfg.directions)):
            recs = [r for r in records if r.level == level and r.dir_index == di]
            for use in ("inner", "outer"):
                try:
                    fit = frt.fit_exponent(recs, use=use, window=window)
                except ValueError:
                    continue
                rel = abs(fit.slope - theory) / theory
                lines.append(ndjson_line([
                    ("level", level), ("direction", cfg.directions[di]), ("use", use),
                    ("slope", fit.slope), ("intercept", fit.intercept),
                    ("c_lambda_est", fit.c_lambda_est),
                    ("window_lo", fit.fit_window[0]), ("window_hi", fit.fit_window[1]),
                    ("residual_rms", fit.residual_rms), ("n_used", fit.n_used),
                    ("theory_exponent", theory), ("rel_err", rel),
                ]))
                if use == "outer":
                    fits_by_level.setdefault(level, []).append(fit)
    for level, fits in fits_by_level.items():
        if len(fits) >= 2:
            rep = frt.isotropy_report(fits, cfg[("fronts", "isotropy_threshold")])
            lines.append(ndjson_line([
                ("isotropy_level", level), ("max_rel_diff", rep["max_rel_diff"]),
                ("threshold", rep["threshold"]), ("pass", rep["pass"]),
            ]))
    return lines


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_eig(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    ord = cfg.order()
    eig = _eigen(cfg)
    write_eigenpair(out / "phi1.kpf1", out / "eigenpair.txt", eig.phi1,
                    eig.lambda1, eig.residual, eig.iterations)
    print(f"lambda1 = {fmt(eig.lambda1)}")
    if eig.lambda1 >= 0:
        print("lambda1 >= 0: every bounded nonnegative solution tends to 0 "
              "(extinction); propagation runs are refused")
        return EXIT_CHECK
    print(f"exponent |lambda1|/(d+2*alpha) = {fmt(_exponent(eig, ord))}")
    return EXIT_PASS


def cmd_run(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    eig = _eigen(cfg)
    if eig.lambda1 >= 0:
        raise NumericalError("lambda1 >= 0 (extinction); propagation run refused")
    art = _execute(cfg, eig, out=out, write_snaps=True)
    write_front_csv(out / "fronts.csv", art["records"])
    _write_lines(out / "fits.ndjson", _fit_lines(cfg, eig, art["records"]))
    trace_lines = [ndjson_line([("t", row["t"]), ("mass", row["mass"]),
                                ("umax", row["umax"]), ("stop", row["stop"])])
                   for row in art["report"]["trace"]]
    _write_lines(out / "run.ndjson", trace_lines)
    print(f"stop = {art['report']['stop']} at t = {fmt(art['report']['t_final'])}")
    return EXIT_GUARD if art["report"]["stop"] == "front_guard" else EXIT_PASS


def cmd_fronts(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    eig = _eigen(cfg)
    path = Path(args.records) if args.records else out / "fronts.csv"
    records = read_front_csv(path)
    _write_lines(out / "fits.ndjson", _fit_lines(cfg, eig, records))
    return EXIT_PASS


def _attractor_frames(cfg: RunConfig, eig, art):
    ord = cfg.order()
    box = art["box"]
    guard = art["scfg"].front_guard
    times = sorted(t for t in cfg[("attractor", "times")] if t in art["states"])
    if not times:
        return [], None, []
    r_last = attr.growth_radius(eig, ord, times[-1])
    y_max = min(cfg[("attractor", "y_max")], guard * min(box.L) / 2 / r_last)
    y_n = cfg[("attractor", "y_n")]
    y_grid = make_grid(cfg.d, y_n, 2 * y_max, origin_centered=True)
    frames = [attr.rescale(art["states"][t], eig, ord, t, y_grid, valid_fraction=guard)
              for t in times]
    return frames, y_grid, times


def cmd_attractor(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    eig = _eigen(cfg)
    if eig.lambda1 >= 0:
        raise NumericalError("lambda1 >= 0 (extinction); run refused")
    art = _execute(cfg, eig, keep_times=cfg[("attractor", "times")])
    frames, _, times = _attractor_frames(cfg, eig, art)
    if not frames:
        raise ConfigError("no attractor frames inside the run horizon")
    ord = cfg.order()
    shift = attr.calibrate_shift(frames[0], eig, ord)
    lines = []
    for frame, t in zip(frames, times):
        dist = attr.attractor_distance(frame, eig, ord, shift)
        negl = attr.neglected_term_norm(art["states"][t], eig, ord, t,
                                        y_max=float(np.abs(frames[0].y_grid.axis_coords(0)).max()),
                                        valid_fraction=art["scfg"].front_guard)
        lines.append(ndjson_line([("t", t), ("shift", shift), ("sup_dist", dist),
                                  ("neglected_norm", negl)]))
    _write_lines(out / "attractor.ndjson", lines)
    return EXIT_PASS


def _verify_checks(cfg: RunConfig, out: Path):
    ord = cfg.order()
    checks = []
    info_lines = []

    eig = _eigen(cfg)
    checks.append({"check": "eigen", "pass": eig.lambda1 < 0,
                   "lambda1": eig.lambda1, "residual": eig.residual,
                   "exponent": _exponent(eig, ord)})
    if eig.lambda1 >= 0:
        return checks, info_lines

    mu_cell = cfg.medium()
    uplus = steady_state(mu_cell, ord, tol=1e-8)
    min_uplus = float(uplus.data.min())
    mu_min = float(mu_cell.data.min())
    checks.append({"check": "steady_state", "pass": min_uplus >= mu_min - 1e-6,
                   "min_uplus": min_uplus, "min_mu": mu_min})

    # measured profile-family constant, max over the configured b values
    est_n = cfg[("bounds", "estimate_n")]
    est_L = cfg[("bounds", "estimate_L")]
    est_grid = make_grid(cfg.d, est_n, est_L, origin_centered=True)
    bvals = cfg[("bounds", "estimate_b")]
    Ds = [estimate_D(ord, eig.phi1, b, est_grid, eig.lambda1) for b in bvals]
    drift = max(Ds) / min(Ds)
    D = max(Ds)
    checks.append({"check": "estimate_D", "pass": drift <= 1.25, "D": D,
                   "drift": drift})

    params_sub = bnd.admissible_params("sub", eig, ord, D)
    params_sup = bnd.admissible_params("super", eig, ord, D)

    art = _execute(cfg, eig, out=out, write_snaps=False,
                   keep_times=cfg.solver_config().snapshot_times + (0.0,))
    states = art["states"]
    box = art["box"]
    snap_times = sorted(states)
    t_end_eff = snap_times[-1] if snap_times else 0.0
    mu_for_profiles = cfg.medium()

    prof_sub = bnd.BoundProfile(params_sub, eig, box, mu_for_profiles)
    prof_sup = bnd.BoundProfile(params_sup, eig, box, mu_for_profiles)

    every = cfg[("bounds", "check_every")]
    sub_times = [round(k * every, 9) for k in range(int(t_end_eff / every) + 1)]
    sup_times = [params_sup.t0] + [t for t in sub_times if t > params_sup.t0]

    for name, prof, times in (("residual_sub", prof_sub, sub_times),
                              ("residual_super", prof_sup, sup_times)):
        summaries = []
        for t in times:
            eps_t = operator_tolerance(bnd.evaluate(prof, t), ord)
            summaries.append(bnd.residual_summary(prof, t, ord, eps_t))
        worst = max(s["viol_frac"] for s in summaries)
        checks.append({"check": name, "pass": worst == 0.0,
                       "eps_grid": max(s["eps_grid"] for s in summaries),
                       "max_viol_frac": worst,
                       "max_viol": max(s["max_viol"] for s in summaries)})
        for s in summaries:
            info_lines.append(ndjson_line([("kind", s["kind"]), ("t", s["t"]),
                                           ("viol_frac", s["viol_frac"]),
                                           ("max_viol", s["max_viol"]),
                                           ("eps_grid", s["eps_grid"])]))

    # falsification control: a tenfold amplitude must be caught
    sab = bnd.BoundParams(kind="sub", alpha=params_sub.alpha, d=params_sub.d,
                          lambda1=params_sub.lambda1, a=10 * params_sub.a,
                          B=params_sub.B, M=params_sub.M, D=params_sub.D,
                          gamma=params_sub.gamma, t0=0.0)
    problems = bnd.check_admissible(sab, eig)
    prof_sab = bnd.BoundProfile(sab, eig, box, mu_for_profiles)
    eps = operator_tolerance(bnd.evaluate(prof_sab, 0.0), ord)
    sab_sum = bnd.residual_summary(prof_sab, 0.0, ord, eps)
    detected = bool(problems) or sab_sum["viol_frac"] > 0
    checks.append({"check": "sabotage_control", "pass": detected,
                   "admissibility_violations": len(problems),
                   "sign_viol_frac": sab_sum["viol_frac"]})

    # Step-3 subsolution from the measured solution level at t1
    t1_floor = bnd.step3_t1_floor(eig, ord, D, min_uplus)
    t1 = next((t for t in snap_times if t >= t1_floor), None)
    r = box.radial()
    interior = r <= min(box.L) / 4
    phi_box = prof_sub.phi_box.shaped
    if t1 is None:
        checks.append({"check": "ordering_sub", "pass": False,
                       "reason": f"no snapshot at or after t1 floor {t1_floor}"})
    else:
        p3, info = bnd.step3_sub_params(eig, ord, D, states[t1], t1)
        worst = -np.inf
        nchk = 0
        for t in snap_times:
            if t < t1:
                continue
            b = bnd.b_of_t(p3, t - t1)
            usub = p3.a * phi_box / (1.0 / p3.abs_l1 + b * r ** p3.p)
            worst = max(worst, float(np.max((usub - states[t].shaped)[interior])))
            nchk += 1
        checks.append({"check": "ordering_sub",
                       "pass": info["init_excess"] <= ORDERING_SLACK and worst <= ORDERING_SLACK,
                       "t1": t1, "c": info["c"], "eps_level": info["eps"],
                       "init_excess": info["init_excess"],
                       "worst_violation": worst, "n_times": nchk})

    ts_cal = next((t for t in snap_times if t >= params_sup.t0), None)
    if ts_cal is None:
        checks.append({"check": "ordering_super", "pass": False,
                       "reason": f"no snapshot at or after t0 {params_sup.t0}"})
        p_sup_cal = None
    else:
        p_sup_cal = bnd.calibrate_super(eig, ord, D, states[ts_cal], ts_cal)
        worst = -np.inf
        nchk = 0
        for t in snap_times:
            if t < ts_cal:
                continue
            b = bnd.b_of_t(p_sup_cal, t)
            usup = p_sup_cal.a * phi_box / (1.0 / p_sup_cal.abs_l1 + b * r ** p_sup_cal.p)
            worst = max(worst, float(np.max((states[t].shaped - usup)[interior])))
            nchk += 1
        checks.append({"check": "ordering_super", "pass": worst <= ORDERING_SLACK,
                       "t_calibration": ts_cal, "a_super": p_sup_cal.a,
                       "worst_violation": worst, "n_times": nchk})

    # level-set radii trapped by the bound profiles' radii
    sandwich_ok = True
    n_outer = n_inner = 0
    if p_sup_cal is not None and t1 is not None:
        for rec in art["records"]:
            if rec.t >= max(ts_cal, p_sup_cal.t0):
                bound = bnd.lambda_radius_super(p_sup_cal, eig, rec.t, rec.level)
                n_outer += 1
                if rec.r_outer > (1 + RADIUS_SLACK) * bound:
                    sandwich_ok = False
            if rec.t >= t1:
                bound = bnd.lambda_radius_sub(p3, eig, rec.t - t1, rec.level)
                if bound > 0:
                    n_inner += 1
                    if rec.r_inner < (1 - RADIUS_SLACK) * bound:
                        sandwich_ok = False
        checks.append({"check": "front_sandwich", "pass": sandwich_ok,
                       "n_outer_checks": n_outer, "n_inner_checks": n_inner})

    if cfg[("attractor", "enabled")]:
        frames, _, times = _attractor_frames(cfg, eig, art)
        if len(frames) < 2:
            checks.append({"check": "attractor", "pass": False,
                           "reason": "fewer than 2 frames inside the run horizon"})
        else:
            shift = attr.calibrate_shift(frames[0], eig, ord)
            y_max = float(np.abs(frames[0].y_grid.axis_coords(0)).max())
            dists = [attr.attractor_distance(fr, eig, ord, shift) for fr in frames]
            negs = [attr.neglected_term_norm(states[t], eig, ord, t, y_max,
                                             valid_fraction=art["scfg"].front_guard)
                    for t in times]
            mono_d = all(b <= a + ATTRACTOR_SLACK for a, b in zip(dists, dists[1:]))
            mono_n = all(b <= a + 1e-9 for a, b in zip(negs, negs[1:]))
            checks.append({"check": "attractor", "pass": mono_d and mono_n,
                           "shift": shift, "distances": dists,
                           "neglected_norms": negs})
            for t, dv, nv in zip(times, dists, negs):
                info_lines.append(ndjson_line([("t", t), ("shift", shift),
                                               ("sup_dist", dv), ("neglected_norm", nv)]))

    for line in _fit_lines(cfg, eig, art["records"]):
        info_lines.append(line)
    return checks, info_lines


def cmd_verify(args) -> int:
    cfg = _load(args)
    if not cfg[("bounds", "enabled")]:
        raise ConfigError("verify needs [bounds] enabled = true")
    out = _outdir(args)
    checks, info_lines = _verify_checks(cfg, out)
    lines = []
    all_pass = True
    for chk in checks:
        pairs = [("check", chk["check"]), ("pass", bool(chk["pass"]))]
        for k, v in chk.items():
            if k in ("check", "pass"):
                continue
            if isinstance(v, (list, tuple)):
                for i, vi in enumerate(v):
                    pairs.append((f"{k}_{i}", vi))
            else:
                pairs.append((k, v))
        lines.append(ndjson_line(pairs))
        all_pass &= bool(chk["pass"])
        status = "PASS" if chk["pass"] else "FAIL"
        print(f"{status} {chk['check']}")
    lines.append(ndjson_line([("check", "ALL"), ("pass", all_pass)]))
    _write_lines(out / "verdict.ndjson", lines)
    _write_lines(out / "verify_details.ndjson", info_lines)
    if not all_pass:
        failing = [c["check"] for c in checks if not c["pass"]]
        print("failing checks: " + ", ".join(failing))
    return EXIT_PASS if all_pass else EXIT_CHECK


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="fkpp",
                                 description="fractional Fisher-KPP front laboratory")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in (("eig", cmd_eig), ("run", cmd_run), ("verify", cmd_verify),
                     ("attractor", cmd_attractor), ("fronts", cmd_fronts)):
        p = sub.add_parser(name)
        p.add_argument("--config", help="path to a config file")
        p.add_argument("--preset", help="name of a packaged preset")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--threads", type=int, default=0)
        if name == "fronts":
            p.add_argument("--records", help="front CSV to re-fit (default: <out>/fronts.csv)")
        p.set_defaults(fn=fn)
    args = ap.parse_args(argv)
    if args.threads:
        set_num_threads(args.threads)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
