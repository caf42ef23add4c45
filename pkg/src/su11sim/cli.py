"""Command-line interface.

Subcommands
-----------
fringe      analytic fringe and sensitivity table over a phase grid
sweep       best sensitivity versus detection transmission, SNL-normalized
montecarlo  seeded pulse-ensemble fringe scan plus a JSON summary
fit         fit a scan CSV with the sin^2 fringe model, emit a JSON result

All tables are comma-separated UTF-8 with a mandatory header row, `.`
decimals, `\n` line endings, and a leading `# meta:` comment block carrying
the seed and the config hash.  Angles are radians, distances mm, energies
microjoules, photon numbers per pulse; column names carry unit suffixes.
Files are written atomically (temp file + rename), and each table gets a
companion PNG figure unless --no-plot is passed.

Exit codes: 0 success, 2 config error, 3 data error, 4 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import interferometer, montecarlo, plotting
from .analysis import extract_gains, fit_result_from_points
from .config import config_hash, load_config
from .errors import ConfigError, ConvergenceError, DataError
from .interferometer import sensitivity_curve, snl, sweep_eta

FRINGE_COLUMNS = ["phi_rad", "mean_photons", "noise_photons", "sensitivity_rad", "singular_flag"]
SWEEP_COLUMNS = ["eta", "delta_phi_min_rad", "snl_rad", "ratio", "phi_opt_rad"]
SCAN_COLUMNS = ["position_mm", "phi_rad", "n_pulses_kept", "mean_photons", "std_photons"]


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path, columns, rows, meta: dict) -> None:
    lines = [f"# meta: {key}={value}" for key, value in meta.items()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _figure_path(out_path: str) -> str:
    stem, _ = os.path.splitext(out_path)
    return stem + ".png"


def cmd_fringe(args) -> int:
    rc = load_config(args.config)
    if args.seed is not None:
        rc.values["seed"] = args.seed
    cfg = rc.interferometer
    n = args.grid or 256
    phis = np.linspace(rc["phi_lo_rad"], rc["phi_hi_rad"], n)
    curve = sensitivity_curve(cfg, phis)
    rows = [
        (curve.phi[i], curve.mean_out[i], curve.noise[i], curve.delta_phi[i], int(curve.singular[i]))
        for i in range(n)
    ]
    meta = {"seed": rc.seed, "config_sha256": config_hash(rc)}
    _write_csv(args.out, FRINGE_COLUMNS, rows, meta)
    if not args.no_plot:
        plotting.save_fringe_figure(curve, _figure_path(args.out))
    return 0


def cmd_sweep(args) -> int:
    rc = load_config(args.config)
    cfg = rc.interferometer
    n = args.grid or 10
    etas = np.linspace(rc["sweep_eta_lo"], rc["sweep_eta_hi"], n)
    sweep = sweep_eta(cfg, etas, cfg.n_inside)
    rows = [
        (sweep.eta[i], sweep.delta_phi_min[i], sweep.snl, sweep.ratio[i], sweep.phi_opt[i])
        for i in range(n)
    ]
    meta = {"seed": rc.seed, "config_sha256": config_hash(rc)}
    _write_csv(args.out, SWEEP_COLUMNS, rows, meta)
    if not args.no_plot:
        plotting.save_sweep_figure(sweep, _figure_path(args.out))
    return 0


def cmd_montecarlo(args) -> int:
    rc = load_config(args.config)
    if args.seed is not None:
        rc.values["seed"] = args.seed
    cfg = rc.interferometer
    scan = montecarlo.run_scan(
        cfg,
        rc.pump,
        rc.detector,
        rc.scan_positions(),
        int(rc["scan_pulses"]),
        window=(rc["window_lo"], rc["window_hi"]),
        seed=rc.seed,
        period_mm=rc.period_mm,
        phi0=rc["phi0_rad"],
    )
    meta = {
        "seed": rc.seed,
        "config_sha256": config_hash(rc),
        "window": f"{_fmt(scan.window[0])}..{_fmt(scan.window[1])}",
        "n_pulses_total": scan.n_pulses_total,
    }
    rows = [
        (
            scan.position_mm[i],
            scan.phi_rad[i],
            scan.n_pulses_kept[i],
            scan.mean_photons[i],
            scan.std_photons[i],
        )
        for i in range(scan.position_mm.size)
    ]
    _write_csv(args.out, SCAN_COLUMNS, rows, meta)

    curve = montecarlo.estimate_sensitivity(scan)
    phi_best, dphi_best, dphi_sigma = montecarlo.min_estimated_sensitivity(curve)
    summary = {
        "seed": rc.seed,
        "config_sha256": config_hash(rc),
        "g2_monitor": scan.monitor_g2,
        "kept_fraction": scan.kept_fraction,
        "delta_phi_min_rad": dphi_best,
        "delta_phi_min_sigma_rad": dphi_sigma,
        "phi_at_min_rad": phi_best,
        "snl_rad": snl(cfg.n_inside),
        "n_positions": int(scan.position_mm.size),
        "n_pulses_total": scan.n_pulses_total,
    }
    stem, _ = os.path.splitext(args.out)
    _atomic_write(stem + ".summary.json", json.dumps(summary, sort_keys=True, indent=2) + "\n")
    if not args.no_plot:
        model_phi = np.linspace(float(scan.phi_rad[0]), float(scan.phi_rad[-1]), 400)
        model_mean = interferometer.detected_mean(cfg, model_phi)
        plotting.save_scan_figure(scan, _figure_path(args.out), model_phi, model_mean)
    return 0


def _read_scan_csv(path):
    """Read a fringe/scan CSV; returns (phi, mean, sigma_of_mean or None)."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    header = None
    rows = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = [c.strip() for c in line.split(",")]
            continue
        cells = line.split(",")
        if len(cells) != len(header):
            raise DataError(f"{path} line {lineno}: expected {len(header)} cells, got {len(cells)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise DataError(f"{path} line {lineno}: non-numeric cell ({exc})") from None
    if header is None:
        raise DataError(f"{path}: no header row found")
    for col in ("phi_rad", "mean_photons"):
        if col not in header:
            raise DataError(f"{path}: missing column {col!r}")
    data = np.asarray(rows, dtype=float)
    if data.size == 0:
        raise DataError(f"{path}: no data rows")
    phi = data[:, header.index("phi_rad")]
    mean = data[:, header.index("mean_photons")]
    sigma = None
    if "std_photons" in header and "n_pulses_kept" in header:
        std = data[:, header.index("std_photons")]
        n = data[:, header.index("n_pulses_kept")]
        if np.all(std > 0.0) and np.all(n > 0):
            sigma = std / np.sqrt(n)
    return phi, mean, sigma


def cmd_fit(args) -> int:
    phi, mean, sigma = _read_scan_csv(args.scan_csv)
    result = fit_result_from_points(phi, mean, sigma, args.eta, args.mu, args.n_inside)
    if args.n2 is not None:
        r1, nu = extract_gains(args.n_inside, args.n2, result.r2_abs)
        result.r1 = r1
        result.nu = nu
    payload = {k: v for k, v in vars(result).items()}
    _atomic_write(args.out, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="su11sim",
        description="Unbalanced SU(1,1) interferometer simulator and analysis toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_out):
        p.add_argument("--config", default=None, help="path to a key=value config file")
        p.add_argument("--seed", type=int, default=None, help="random seed (overrides config)")
        p.add_argument("--out", default=default_out, help="output table path")
        p.add_argument("--grid", type=int, default=None, help="number of grid points")
        p.add_argument("--no-plot", action="store_true", help="skip the companion figure")

    p = sub.add_parser("fringe", help="analytic fringe and sensitivity table")
    common(p, "fringe.csv")
    p.set_defaults(func=cmd_fringe)

    p = sub.add_parser("sweep", help="sensitivity-vs-transmission sweep")
    common(p, "sweep.csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("montecarlo", help="seeded pulse-ensemble fringe scan")
    common(p, "scan.csv")
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("fit", help="fit a fringe scan CSV")
    p.add_argument("scan_csv", help="CSV with phi_rad and mean_photons columns")
    p.add_argument("--eta", type=float, required=True, help="detection transmission")
    p.add_argument("--mu", type=float, required=True, help="internal transmission")
    p.add_argument("--n-inside", type=float, required=True, dest="n_inside",
                   help="photon number inside the interferometer")
    p.add_argument("--n2", type=float, default=None,
                   help="photon number of the second crystal alone (derives r1, nu)")
    p.add_argument("--out", default="fit.json", help="output JSON path")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
