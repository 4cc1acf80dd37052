"""Command-line front end.

Subcommands:

* ``spectrum``  solver runs on a detuning grid, CSV per solver + figure
* ``angles``    same on a finer default grid with strict branch tracking
* ``mu-study``  layer gain of the closed basis against the cosh/sinh family
* ``design``    poling profile realizing a linear delay law, with check
* ``validate``  feasibility and accuracy probe of a configuration
* ``compare``   row-wise diff of two result CSVs (same config hash)

All delimited output is deterministic: floats go through %.17g, no
timestamps, and each CSV carries its config hash in a comment line.
Figures are rendered next to the delimited files.

Exit codes: 0 success, 2 configuration/usage, 3 accuracy loss,
4 infeasible geometry.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .approx import approx_UV, default_phi0, relative_delay
from .characterization import (
    angle_gap,
    band_mask,
    characterize,
    mod_pi_gap,
    relative_band_error,
    ripple_average,
)
from .config import (
    build_coupling,
    build_dispersion,
    build_grid,
    build_profile,
    config_hash,
    load_config,
    normalize_config,
)
from .dispersion import FrequencyGrid
from .errors import (
    AccuracyLossError,
    ConfigError,
    DesignInfeasibleError,
    DomainError,
    OutOfBandError,
    SingularProfileError,
    StiffnessError,
    UnwrapError,
)
from .exact import exact_UV, layer_gain
from .ode import ode_UV
from .poling import design_profile, qpm_band, validity_metrics
from . import plotting

CSV_COLUMNS = ("omega_norm", "S", "S1", "S2_db", "r",
               "psi_L", "psi_0", "kappa", "tau_fs")
SOLVER_TAGS = ("exact", "first_order", "ode")
ANGLES_GRID_DEFAULT = 4096


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _write_csv(path, hash_, tag, columns, arrays):
    n = len(arrays[0])
    lines = [f"# config_hash={hash_} solver={tag}", ",".join(columns)]
    for i in range(n):
        lines.append(",".join(_fmt(a[i]) for a in arrays))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {path}")


def _write_json(path, obj):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {path}")


def _read_csv(path):
    with open(path, "r", encoding="ascii") as fh:
        head = fh.readline().strip()
        if not head.startswith("# "):
            raise ConfigError(f"{path}: missing metadata comment line")
        meta = dict(item.split("=", 1) for item in head[2:].split())
        columns = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.array([[float(c) for c in row] for row in rows], dtype=float)
    if data.ndim != 2 or data.shape[1] != len(columns):
        raise ConfigError(f"{path}: ragged rows")
    return meta, columns, data


def _merged_config(args, need_pump=True, default_n=None) -> dict:
    cfg = load_config(args.config) if args.config else {}
    pump_flags = [(k, getattr(args, k, None))
                  for k in ("nu", "nu0", "gamma_abs")]
    given = [(k, v) for k, v in pump_flags if v is not None]
    if len(given) > 1:
        raise ConfigError("give at most one of --nu, --nu0, --gamma")
    if given:
        key, val = given[0]
        phi0 = cfg.get("pump", {}).get("phi0") if isinstance(cfg.get("pump"), dict) else None
        cfg["pump"] = {key: val, "phi0": phi0}
    explicit_n = getattr(args, "grid", None) is not None or (
        isinstance(cfg.get("grid"), dict) and "n" in cfg["grid"])
    if getattr(args, "grid", None) is not None:
        cfg.setdefault("grid", {})
        cfg["grid"]["n"] = args.grid
    if need_pump and "pump" not in cfg:
        raise ConfigError("pump strength missing: set pump in the config "
                          "or pass --nu/--nu0/--gamma")
    norm = normalize_config(cfg)
    if default_n is not None and not explicit_n:
        norm["grid"]["n"] = default_n
    return norm


def _pick_solvers(args, profile) -> list:
    if args.solvers:
        tags = [t.strip() for t in args.solvers.split(",") if t.strip()]
        bad = [t for t in tags if t not in SOLVER_TAGS]
        if bad:
            raise ConfigError(f"unknown solver tags {bad}; choose from {SOLVER_TAGS}")
        if not tags:
            raise ConfigError("--solvers must name at least one solver")
        return tags
    if profile.kind == "linear" and profile.params["zeta"] > 0:
        return list(SOLVER_TAGS)
    return ["first_order", "ode"]


def _run_solver(tag, grid, profile, dispersion, coupling, solver_cfg):
    if tag == "exact":
        return exact_UV(grid, profile, dispersion, coupling)
    if tag == "first_order":
        return approx_UV(grid, profile, dispersion, coupling,
                         mu=solver_cfg["mu"])
    return ode_UV(grid, profile, dispersion, coupling,
                  rtol=solver_cfg["rtol"], atol=solver_cfg["atol"],
                  method=solver_cfg["method"])


def _pairwise_metrics(bogs, chars, band, x):
    out = {}
    mask = band_mask(x, band) if band is not None else None
    if "exact" in bogs and "ode" in bogs:
        a, b = bogs["exact"], bogs["ode"]
        va = np.abs(a.V) ** 2
        vb = np.abs(b.V) ** 2
        m = va > 1e-12 * max(float(va.max()), 1e-300)
        out["ode_vs_exact"] = {
            "max_rel_V2_diff": float(np.max(np.abs(vb[m] - va[m]) / va[m])) if m.any() else None,
            "max_U_phase_diff_rad": float(np.max(np.abs(np.angle(b.U * np.conj(a.U))))),
        }
    ref = "exact" if "exact" in bogs else ("ode" if "ode" in bogs else None)
    if ref is not None and "first_order" in bogs and mask is not None and mask.any():
        cr, cf = chars[ref], chars["first_order"]
        s2_avg = ripple_average(cr.S2)
        v_r = float(np.mean(np.abs(bogs[ref].V[mask]) ** 2))
        v_f = float(np.mean(np.abs(bogs["first_order"].V[mask]) ** 2))
        out[f"first_order_vs_{ref}"] = {
            "S2_band_error": relative_band_error(cf.S2, s2_avg, mask),
            "V2_band_average_error": abs(v_f - v_r) / v_r if v_r > 0 else None,
            "psi_L_gap_rad": angle_gap(cf.psi_L, cr.psi_L, mask),
            "psi_0_gap_rad": angle_gap(cf.psi_0, cr.psi_0, mask),
        }
    return out


def _characterized_run(args, strict_unwrap, default_n=None):
    norm = _merged_config(args, default_n=default_n)
    h = config_hash(norm)
    dispersion = build_dispersion(norm)
    profile = build_profile(norm, dispersion)
    coupling = build_coupling(norm, profile)
    if coupling.phi0 is None:
        try:
            coupling = coupling.with_phi0(
                default_phi0(profile, dispersion, coupling))
        except OutOfBandError:
            if not args.best_effort:
                raise
            print("warning: no matched band; using phi0 = 0", file=sys.stderr)
            coupling = coupling.with_phi0(0.0)
    grid = build_grid(norm)
    tags = _pick_solvers(args, profile)
    try:
        band = qpm_band(profile, dispersion)
    except OutOfBandError:
        band = None
    bogs, chars = {}, {}
    strict = strict_unwrap and not args.best_effort
    for tag in tags:
        bog = _run_solver(tag, grid, profile, dispersion, coupling,
                          norm["solver"])
        bogs[tag] = bog
        chars[tag] = characterize(bog, dispersion.omega0,
                                  strict_unwrap=strict)
    return {"norm": norm, "hash": h, "dispersion": dispersion,
            "profile": profile, "coupling": coupling, "grid": grid,
            "band": band, "tags": tags, "bogs": bogs, "chars": chars}


def _solver_summary(bog, char):
    flags = {k: int(np.sum(v)) for k, v in bog.flags.items()}
    return {
        "max_unitarity_residual": float(np.max(np.abs(bog.unitarity_residual()))),
        "max_half_step_rad": char.meta["max_half_step_rad"],
        "phi0": bog.phi0,
        "flag_counts": flags,
        "meta": {k: (float(v) if isinstance(v, (int, float, np.floating)) else str(v))
                 for k, v in bog.meta.items()},
    }


def _emit_run(run, args, stem):
    os.makedirs(args.out, exist_ok=True)
    for tag in run["tags"]:
        ch = run["chars"][tag]
        arrays = [ch.x, ch.S, ch.S1, ch.S2_db, ch.r,
                  ch.psi_L, ch.psi_0, ch.kappa, ch.tau_s * 1e15]
        _write_csv(os.path.join(args.out, f"{stem}_{tag}.csv"),
                   run["hash"], tag, CSV_COLUMNS, arrays)
    report = {
        "command": stem,
        "config_hash": run["hash"],
        "config": run["norm"],
        "band": list(run["band"]) if run["band"] else None,
        "solvers": run["tags"],
        "per_solver": {t: _solver_summary(run["bogs"][t], run["chars"][t])
                       for t in run["tags"]},
        "pairwise": _pairwise_metrics(run["bogs"], run["chars"], run["band"],
                                      run["grid"].x),
    }
    _write_json(os.path.join(args.out, f"{stem}_report.json"), report)
    return report


def cmd_spectrum(args) -> int:
    run = _characterized_run(args, strict_unwrap=False)
    _emit_run(run, args, "spectrum")
    fig = os.path.join(args.out, "spectrum.png")
    plotting.plot_spectrum([run["chars"][t] for t in run["tags"]],
                           run["band"], fig)
    print(f"wrote {fig}")
    return 0


def cmd_angles(args) -> int:
    run = _characterized_run(args, strict_unwrap=True,
                             default_n=ANGLES_GRID_DEFAULT)
    _emit_run(run, args, "angles")
    band = run["band"]
    ref_hi = band[1] if band else 0.5
    ref_lo = band[0] if band else 0.1
    fig = os.path.join(args.out, "angles.png")
    plotting.plot_angles([run["chars"][t] for t in run["tags"]],
                         band, fig, ref_hi=ref_hi, ref_lo=ref_lo)
    print(f"wrote {fig}")
    return 0


def _mu_label(mu) -> str:
    return "mu" + format(float(mu), "g").replace(".", "p").replace("-", "m")


def cmd_mu_study(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    norm = normalize_config(cfg)
    h = config_hash(norm)
    nus = norm["mu_study"]["nu_values"]
    mus = norm["mu_study"]["mu_values"]
    gain_ref = np.array([layer_gain(nu) for nu in nus])
    cand = {}
    for mu in mus:
        diag = np.cosh(np.pi * np.asarray(nus)) + mu * np.sinh(np.pi * np.asarray(nus))
        cand[_mu_label(mu)] = diag
    os.makedirs(args.out, exist_ok=True)
    columns = ["nu", "gain_reference"]
    arrays = [np.asarray(nus), gain_ref]
    for label, g in cand.items():
        columns += [f"gain_{label}", f"abs_dist_{label}", f"log_dist_{label}"]
        arrays += [g, np.abs(g - gain_ref), np.abs(np.log(g) - np.log(gain_ref))]
    _write_csv(os.path.join(args.out, "mu_study.csv"), h, "exact",
               columns, arrays)
    labels = list(cand)
    abs_winner = [labels[int(np.argmin([abs(cand[l][i] - gain_ref[i])
                                        for l in labels]))]
                  for i in range(len(nus))]
    log_winner = [labels[int(np.argmin([abs(np.log(cand[l][i]) - np.log(gain_ref[i]))
                                        for l in labels]))]
                  for i in range(len(nus))]
    report = {
        "command": "mu_study",
        "config_hash": h,
        "nu_values": [float(v) for v in nus],
        "mu_values": [float(v) for v in mus],
        "nearest_by_abs_distance": abs_winner,
        "nearest_by_log_distance": log_winner,
    }
    _write_json(os.path.join(args.out, "mu_study_report.json"), report)
    fig = os.path.join(args.out, "mu_study.png")
    plotting.plot_mu_study(nus, gain_ref, cand, fig)
    print(f"wrote {fig}")
    return 0


def cmd_design(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    norm = normalize_config(cfg)
    if "design" not in norm:
        raise ConfigError("design run needs a design section in the config")
    h = config_hash(norm)
    dispersion = build_dispersion(norm)
    des = norm["design"]
    w0 = dispersion.omega0
    if "band" in des:
        profile, rep = design_profile(dispersion, des["length_mm"],
                                      band=des["band"])
    else:
        profile, rep = design_profile(
            dispersion, des["length_mm"],
            delay_slope_s2=des["delay_slope_fs"] * 1e-15 / w0,
            delay_offset_s=des["delay_offset_fs"] * 1e-15)
    x_lo, x_hi = sorted((rep["x_start"], rep["x_end"]))
    x = np.linspace(x_lo, x_hi, 257)
    tau = relative_delay(x, profile, dispersion, method="angle")
    requested = rep["delay_slope_s2"] * x * w0 + rep["delay_offset_s"]
    scale = float(np.max(np.abs(requested)))
    tau_dev = float(np.max(np.abs(tau - requested))) / scale if scale > 0 else 0.0
    gamma_abs = 0.0
    if "pump" in norm:
        gamma_abs = build_coupling(norm, profile).gamma_abs
    metrics = validity_metrics(profile, gamma_abs, include_arrays=True)
    os.makedirs(args.out, exist_ok=True)
    z = np.linspace(0.0, profile.length_mm, 1025)
    _write_csv(os.path.join(args.out, "profile.csv"), h, "design",
               ("z_mm", "K_rad_per_mm", "period_um"),
               [z, profile.K(z), profile.period_um(z)])
    report = {
        "command": "design",
        "config_hash": h,
        "design": rep,
        "max_relative_delay_deviation": tau_dev,
        "validity": {k: float(v) for k, v in metrics.items()
                     if not isinstance(v, np.ndarray)},
    }
    _write_json(os.path.join(args.out, "design_report.json"), report)
    fig = os.path.join(args.out, "design.png")
    plotting.plot_design(profile, x, tau * 1e15, requested * 1e15, metrics, fig)
    print(f"wrote {fig}")
    return 0


def cmd_validate(args) -> int:
    norm = _merged_config(args)
    h = config_hash(norm)
    dispersion = build_dispersion(norm)
    profile = build_profile(norm, dispersion)
    coupling = build_coupling(norm, profile)
    phi0 = coupling.phi0
    if phi0 is None:
        phi0 = default_phi0(profile, dispersion, coupling)
        coupling = coupling.with_phi0(phi0)
    band = qpm_band(profile, dispersion)
    metrics = validity_metrics(profile, coupling.gamma_abs)
    probe_grid = FrequencyGrid.symmetric_grid(span=norm["grid"]["span"], n=129)
    bog = ode_UV(probe_grid, profile, dispersion, coupling,
                 rtol=norm["solver"]["rtol"], atol=norm["solver"]["atol"],
                 method=norm["solver"]["method"])
    worst = float(np.max(np.abs(bog.unitarity_residual())))
    os.makedirs(args.out, exist_ok=True)
    report = {
        "command": "validate",
        "config_hash": h,
        "config": norm,
        "band": list(band),
        "phi0_resolved": float(phi0),
        "gamma_abs": coupling.gamma_abs,
        "validity": {k: float(v) for k, v in metrics.items()},
        "unitarity_probe": {"n": 129, "max_residual": worst},
        "ok": True,
    }
    _write_json(os.path.join(args.out, "validate_report.json"), report)
    return 0


def cmd_compare(args) -> int:
    meta_a, cols_a, data_a = _read_csv(args.csv_a)
    meta_b, cols_b, data_b = _read_csv(args.csv_b)
    if cols_a != cols_b:
        raise ConfigError("CSV column sets differ; nothing to compare")
    if meta_a.get("config_hash") != meta_b.get("config_hash"):
        msg = ("config hashes differ: "
               f"{meta_a.get('config_hash')} vs {meta_b.get('config_hash')}")
        if not args.best_effort:
            raise ConfigError(msg + " (pass --best-effort to compare anyway)")
        print(f"warning: {msg}", file=sys.stderr)
    if data_a.shape != data_b.shape:
        raise ConfigError(f"row counts differ: {data_a.shape[0]} vs {data_b.shape[0]}")
    ia = cols_a.index("omega_norm") if "omega_norm" in cols_a else None
    if ia is not None and not np.array_equal(data_a[:, ia], data_b[:, ia]):
        raise ConfigError("detuning grids differ; row-wise comparison undefined")
    metrics = {}
    for j, col in enumerate(cols_a):
        a, b = data_a[:, j], data_b[:, j]
        ok = np.isfinite(a) & np.isfinite(b)
        entry = {"n_finite_common": int(np.sum(ok)),
                 "n_finite_mismatch": int(np.sum(np.isfinite(a) != np.isfinite(b)))}
        if np.any(ok):
            if col in ("psi_L", "psi_0"):
                d = a[ok] - b[ok]
                entry["offset_removed_max_diff"] = float(np.max(np.abs(d - np.mean(d))))
            elif col == "kappa":
                entry["max_mod_pi_gap"] = float(np.max(mod_pi_gap(a[ok], b[ok])))
            else:
                entry["max_abs_diff"] = float(np.max(np.abs(a[ok] - b[ok])))
                ref = np.abs(a[ok])
                big = ref > 1e-12 * max(float(ref.max()), 1e-300)
                if np.any(big):
                    entry["max_rel_diff"] = float(np.max(
                        np.abs(a[ok][big] - b[ok][big]) / ref[big]))
        metrics[col] = entry
    report = {
        "command": "compare",
        "csv_a": os.path.basename(args.csv_a),
        "csv_b": os.path.basename(args.csv_b),
        "solver_a": meta_a.get("solver"),
        "solver_b": meta_b.get("solver"),
        "config_hash_a": meta_a.get("config_hash"),
        "config_hash_b": meta_b.get("config_hash"),
        "per_column": metrics,
    }
    for col in ("S", "S2_db", "psi_L"):
        if col in metrics:
            keys = [k for k in ("max_abs_diff", "offset_removed_max_diff")
                    if k in metrics[col]]
            for k in keys:
                print(f"{col}: {k} = {metrics[col][k]:.6g}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_json(os.path.join(args.out, "compare_report.json"), report)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="chirpsqueeze",
        description="Broadband squeezed-light generation in chirped "
                    "quasi-phase-matched crystals",
    )
    sub = p.add_subparsers(dest="command", required=True)

    run_common = argparse.ArgumentParser(add_help=False)
    run_common.add_argument("--config", help="JSON run configuration")
    run_common.add_argument("--out", default=".", help="output directory")
    run_common.add_argument("--best-effort", action="store_true",
                            help="degrade accuracy failures to warnings")
    run_common.add_argument("--solvers",
                            help="comma list from exact,first_order,ode")
    run_common.add_argument("--grid", type=int, help="grid size override")
    g = run_common.add_mutually_exclusive_group()
    g.add_argument("--nu", type=float, help="gain parameter (linear profile)")
    g.add_argument("--nu0", type=float, help="normalized pump intensity")
    g.add_argument("--gamma", dest="gamma_abs", type=float,
                   help="coupling |gamma| in rad/mm")

    sp = sub.add_parser("spectrum", parents=[run_common],
                        help="squeezing and flux spectra")
    sp.set_defaults(func=cmd_spectrum)
    sp = sub.add_parser("angles", parents=[run_common],
                        help="characteristic angles on a fine grid")
    sp.set_defaults(func=cmd_angles)
    sp = sub.add_parser("mu-study", parents=[run_common],
                        help="layer-gain comparison against the mu family")
    sp.set_defaults(func=cmd_mu_study)
    sp = sub.add_parser("design", parents=[run_common],
                        help="profile from a delay law or band")
    sp.set_defaults(func=cmd_design)
    sp = sub.add_parser("validate", parents=[run_common],
                        help="configuration feasibility and accuracy probe")
    sp.set_defaults(func=cmd_validate)

    cp = sub.add_parser("compare", help="diff two result CSVs")
    cp.add_argument("csv_a")
    cp.add_argument("csv_b")
    cp.add_argument("--out", default=None, help="directory for the JSON report")
    cp.add_argument("--best-effort", action="store_true",
                    help="compare despite differing config hashes")
    cp.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AccuracyLossError, StiffnessError, UnwrapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DesignInfeasibleError, SingularProfileError, OutOfBandError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
