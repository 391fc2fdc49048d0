"""Command-line driver: ``xi-spectra zeros | mdensity | compare | limit-study | verify``.

Exit codes: 0 success, 2 scan failure, 3 density failure, 4 I/O or input
mismatch, 5 comparison or verification tolerance breach.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import phi as phi_mod
from .config import ExperimentConfig, cache_root, table_path, zero_cache_path
from .errors import InsufficientDecay, LoadError, MismatchedOmega, StepTooCoarse, XiSpectraError
from .mfunction import MDensityTable, gap_density, gaussian_limit_error, gue_surmise, m_density
from .spacing import (
    build_samples,
    empirical_gap_functional,
    gap_values,
    histogram,
    rho_omega,
    stats_report,
)
from .zeros import ScanReport, read_cache, scan_certified, verify_completeness, write_cache

EXIT_OK, EXIT_SCAN, EXIT_DENSITY, EXIT_IO, EXIT_TOLERANCE = 0, 2, 3, 4, 5
RH_NOTE = "rh_mode: zeta zeros below the scan height are assumed on the critical line"


def _header(cfg: ExperimentConfig) -> dict:
    return {"config_hash": cfg.config_hash(), "version": __version__, "rh_mode": cfg.rh_mode}


def _dump(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _gap_scale(omega: float) -> float:
    return math.pi * math.sqrt(rho_omega(omega))


def _build_table(cfg: ExperimentConfig) -> MDensityTable:
    sigma = 0.5 + cfg.omega
    scale = _gap_scale(cfg.omega)
    u = np.linspace(cfg.u_grid.min * scale, cfg.u_grid.max * scale, cfg.u_grid.count)
    return m_density(sigma, u, cfg.prime_cutoff, cfg.x_max, cfg.x_step)


# -- subcommands ------------------------------------------------------------------


def cmd_zeros(cfg: ExperimentConfig) -> int:
    out = _out_dir(cfg)
    cache_root(cfg).mkdir(parents=True, exist_ok=True)
    summary = {**_header(cfg), "omega": cfg.omega, "T": cfg.T, "scans": []}
    code = EXIT_OK
    for fam in cfg.families():
        try:
            report = scan_certified(cfg.omega, fam, cfg.T, cfg.step_factor, beyond=10.0)
        except StepTooCoarse as exc:
            print(f"zeros {fam}: {exc}", file=sys.stderr)
            summary["scans"].append({"family": fam, "error": str(exc)})
            code = EXIT_SCAN
            continue
        path = zero_cache_path(cfg, fam)
        write_cache(report, path, {"config_hash": cfg.config_hash()})
        certified = cfg.T < 2.0 or verify_completeness(report)
        summary["scans"].append(
            {
                "family": fam,
                "cache": str(path),
                "count_scanned": report.count_scanned,
                "count_formula": report.count_formula,
                "s_omega_at_T": report.s_omega_at_T,
                "step_factor": report.step_factor,
                "certified": certified,
            }
        )
        print(f"zeros {fam}: {report.count_scanned} zeros in (0, {cfg.T:g}], formula {report.count_formula:.6f}")
    summary["note"] = RH_NOTE
    _dump(out / f"zeros_summary_omega{cfg.omega:g}_T{cfg.T:g}.json", summary)
    return code


def cmd_mdensity(cfg: ExperimentConfig) -> int:
    cache_root(cfg).mkdir(parents=True, exist_ok=True)
    try:
        table = _build_table(cfg)
    except InsufficientDecay as exc:
        print(f"mdensity: {exc}", file=sys.stderr)
        return EXIT_DENSITY
    path = table_path(cfg)
    table.save(path, _header(cfg))
    q = table.quadrature_meta
    print(
        f"mdensity sigma={table.sigma:g}: normalization {q['normalization']:.8f}, "
        f"richardson {q['richardson_diff']:.2e}, x_max {q['x_max']:.4g} -> {path}"
    )
    return EXIT_OK


def _load_inputs(cfg: ExperimentConfig, family: str) -> tuple[ScanReport, MDensityTable]:
    report = read_cache(zero_cache_path(cfg, family))
    table = MDensityTable.load(table_path(cfg))
    if abs(report.omega - cfg.omega) > 1e-12:
        raise MismatchedOmega(f"zero cache omega {report.omega} != {cfg.omega}")
    if abs(table.sigma - (0.5 + cfg.omega)) > 1e-12:
        raise MismatchedOmega(f"table sigma {table.sigma} != {0.5 + cfg.omega}")
    return report, table


def compare_payload(cfg: ExperimentConfig, report: ScanReport, table: MDensityTable) -> tuple[dict, str]:
    """Both sides of the gap-density limit for every whitelisted phi, plus overlay CSV."""
    rho = rho_omega(cfg.omega)
    samples = build_samples(report, rho)
    lo, hi = table.u_grid[0], table.u_grid[-1]
    scale = math.pi * math.sqrt(rho)
    u = np.linspace(max(lo, -hi) / scale, min(hi, -lo) / scale, 4001)
    g = gap_density(cfg.omega, u, table, rho=rho)
    g_or = gap_density(cfg.omega, u, table, oriented=True, rho=rho)
    rows = []
    breach = False
    for name in cfg.phi_whitelist:
        f = phi_mod.get(name)
        lhs = empirical_gap_functional(samples, f)
        rhs = phi_mod.theoretical_integral(f, u, g)
        rhs_or = phi_mod.theoretical_integral(f, u, g_or)
        ok = abs(lhs - rhs) <= cfg.tolerance
        breach |= not ok
        rows.append(
            {
                "phi": name,
                "lhs": lhs,
                "rhs": rhs,
                "rhs_oriented": rhs_or,
                "abs_diff": abs(lhs - rhs),
                "tolerance": cfg.tolerance,
                "pass": ok,
                "formal": f.formal,
            }
        )
    gaps = gap_values(samples)
    edges = np.linspace(u[0], u[-1], 61)
    hist = histogram(gaps, edges)
    dens = hist.density()
    centers = 0.5 * (edges[1:] + edges[:-1])
    # bin averages of the theoretical curves
    fine = np.linspace(edges[0], edges[-1], 60 * 50 + 1)
    gf = gap_density(cfg.omega, fine, table, rho=rho)
    gf_or = gap_density(cfg.omega, fine, table, oriented=True, rho=rho)
    g_bin = gf[:-1].reshape(60, 50).mean(axis=1)
    g_bin_or = gf_or[:-1].reshape(60, 50).mean(axis=1)
    width = edges[1] - edges[0]
    l1 = float(np.sum(np.abs(dens - g_bin)) * width)
    l1_or = float(np.sum(np.abs(dens - g_bin_or)) * width)
    breach |= l1 > cfg.l1_tolerance
    doc = {
        **_header(cfg),
        "omega": cfg.omega,
        "family": report.family,
        "T": report.T,
        "n_gaps": int(len(gaps)),
        "functionals": rows,
        "histogram_l1": l1,
        "histogram_l1_oriented": l1_or,
        "l1_tolerance": cfg.l1_tolerance,
        "verdict": "pass" if not breach else "asymptotic regime not reached",
        "table_meta": table.quadrature_meta,
        "note": RH_NOTE,
    }
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["# config_hash=" + cfg.config_hash()])
    w.writerow(["u", "empirical_density", "theoretical_density", "theoretical_oriented", "gaussian", "gue_surmise"])
    for c, d, t, t_or in zip(centers, dens, g_bin, g_bin_or):
        gauss = math.exp(-0.5 * c * c) / math.sqrt(2.0 * math.pi)
        w.writerow([f"{c:.10g}", f"{d:.10g}", f"{t:.10g}", f"{t_or:.10g}", f"{gauss:.10g}", f"{gue_surmise(abs(c)):.10g}"])
    return doc, buf.getvalue()


def cmd_compare(cfg: ExperimentConfig) -> int:
    out = _out_dir(cfg)
    code = EXIT_OK
    for fam in cfg.families():
        try:
            report, table = _load_inputs(cfg, fam)
        except MismatchedOmega as exc:
            print(f"compare: {exc}", file=sys.stderr)
            return EXIT_IO
        except (LoadError, OSError) as exc:
            print(f"compare: cannot load inputs ({exc}); run `zeros` and `mdensity` first", file=sys.stderr)
            return EXIT_IO
        doc, overlay = compare_payload(cfg, report, table)
        stem = f"compare_{fam}_omega{cfg.omega:g}_T{cfg.T:g}"
        _dump(out / f"{stem}.json", doc)
        (out / f"{stem}_overlay.csv").write_text(overlay)
        rho = rho_omega(cfg.omega)
        stats = stats_report(
            cfg.omega,
            fam,
            report.T,
            build_samples(report, rho),
            {r["phi"]: r["lhs"] for r in doc["functionals"]},
            {r["phi"]: r["tolerance"] for r in doc["functionals"]},
            cfg.rh_mode,
        )
        (out / f"stats_{fam}_omega{cfg.omega:g}_T{cfg.T:g}.json").write_text(stats + "\n")
        for r in doc["functionals"]:
            print(f"  {r['phi']:>15}: lhs {r['lhs']:.4f}  rhs {r['rhs']:.4f}  diff {r['abs_diff']:.4f}  {'ok' if r['pass'] else 'BREACH'}")
        print(f"  histogram L1 {doc['histogram_l1']:.4f} (oriented {doc['histogram_l1_oriented']:.4f}); {doc['verdict']}")
        if doc["verdict"] != "pass":
            code = EXIT_TOLERANCE
    return code


def cmd_limit_study(cfg: ExperimentConfig) -> int:
    out = _out_dir(cfg)
    rows = []
    for om in cfg.omegas:
        sigma = 0.5 + om
        scale = _gap_scale(om)
        u = np.linspace(-7.0 * scale, 7.0 * scale, 1401)
        try:
            table = m_density(sigma, u, cfg.prime_cutoff or 10**6)
        except InsufficientDecay as exc:
            print(f"limit-study: {exc}", file=sys.stderr)
            return EXIT_DENSITY
        err = gaussian_limit_error(om, table)
        rows.append((om, err))
        print(f"omega {om:g}: sup error {err:.3e}")
    lines = [f"# config_hash={cfg.config_hash()}", "omega,sup_error"] + [f"{om:.15g},{e:.15g}" for om, e in rows]
    (out / "limit_study.csv").write_text("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig, zeros_cache: str | None = None, perturb: int | None = None) -> int:
    from .verify import run_suite

    t0 = time.perf_counter()
    results = run_suite(cfg, zeros_cache=zeros_cache, perturb=perturb)
    failed = 0
    for name, ok, detail in results:
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    print(f"verify: {len(results) - failed}/{len(results)} suites passed in {time.perf_counter() - t0:.1f} s")
    return EXIT_OK if failed == 0 else EXIT_TOLERANCE


# -- argument handling ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xi-spectra", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON experiment configuration")
    parser.add_argument("--omega", type=float)
    parser.add_argument("--T", type=float)
    parser.add_argument("--family", choices=["A", "B", "both"])
    parser.add_argument("--out", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("zeros", help="scan, refine and certify zeros; write the zero cache")
    sub.add_parser("mdensity", help="build the m-density table for sigma = 1/2 + omega")
    sub.add_parser("compare", help="empirical gap functionals against the m-density prediction")
    ls = sub.add_parser("limit-study", help="Gaussian-limit error across omegas")
    ls.add_argument("--omegas", type=float, nargs="+")
    ver = sub.add_parser("verify", help="run the invariant suite")
    ver.add_argument("--zeros-cache", help="check this zero cache instead of a fresh scan")
    ver.add_argument("--perturb", type=int, help="shift zero number N of the cache by 1e-3 (fault injection)")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if args.omega is not None:
        cfg.omega = args.omega
    if args.T is not None:
        cfg.T = args.T
    if args.family is not None:
        cfg.family = args.family
    if args.out is not None:
        cfg.output_dir = args.out
    if getattr(args, "omegas", None):
        cfg.omegas = list(args.omegas)
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        cfg.validate()
    except (OSError, json.JSONDecodeError) as exc:
        print(f"xi-spectra: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, TypeError) as exc:
        parser.error(str(exc))
    if args.command == "limit-study" and any(not 0.0 < om <= 0.3 for om in cfg.omegas):
        parser.error("limit-study omegas must lie in (0, 0.3]")
    try:
        if args.command == "zeros":
            return cmd_zeros(cfg)
        if args.command == "mdensity":
            return cmd_mdensity(cfg)
        if args.command == "compare":
            return cmd_compare(cfg)
        if args.command == "limit-study":
            return cmd_limit_study(cfg)
        return cmd_verify(cfg, args.zeros_cache, args.perturb)
    except LoadError as exc:
        print(f"xi-spectra: {exc}", file=sys.stderr)
        return EXIT_IO
    except XiSpectraError as exc:
        print(f"xi-spectra: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
