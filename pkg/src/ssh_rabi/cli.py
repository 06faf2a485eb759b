"""Batch command-line driver.

    ssh-rabi <command> [--params FILE] [--out DIR] [--format csv|json] [--print-config]

Exit codes: 0 success, 2 configuration/parse error, 3 numerical failure,
4 model-consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import band as band_mod
from . import groundstate, rabi, spectra, stability
from .config import COMMANDS, format_params, load_params
from .errors import ConfigError, ModelConsistencyError, NumericalError, SSHRabiError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_MODEL = 4


def _write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return int(value)
    return value


def _to_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, ensure_ascii=False) + "\n"


def _table(out: Path, stem: str, fmt: str, columns, rows) -> str:
    if fmt == "csv":
        path = out / f"{stem}.csv"
        _write_atomic(path, _to_csv(columns, rows))
    else:
        path = out / f"{stem}.json"
        _write_atomic(path, _to_json({"columns": list(columns),
                                      "rows": [[_jsonable(v) for v in r] for r in rows]}))
    return path.name


def _chain_params(p, u=0.0):
    return band_mod.ChainParams(t0=p["t0"], alpha=p["alpha"], K=p["K"], a=p["a"], N=p["N"], u=u)


def _branches(name):
    return list(band_mod.Branch) if name == "both" else [band_mod.Branch.parse(name)]


def run_band(p, out, fmt):
    chain = _chain_params(p, p["u"])
    grid = band_mod.k_grid(chain, p["grid_size"])
    columns = ("k_per_angstrom", "branch", "eps_eV", "gap_eV", "E_eV", "alpha_k", "beta_k",
               "energy_c_eV", "energy_v_eV")
    rows = []
    for branch in _branches(p["branch"]):
        s = band_mod.band_sample(chain, grid, branch)
        ec = band_mod.quasiparticle_energy(chain, grid, branch)
        for i in range(grid.size):
            rows.append((grid[i], branch.value, s.eps[i], s.gap[i], s.E[i], s.alpha_k[i],
                         s.beta_k[i], ec[i], -ec[i]))
    return {"files": [_table(out, "band", fmt, columns, rows)], "points": len(rows)}


def _occupation(p):
    if p["occupation"] == "equilibrium":
        return band_mod.EQUILIBRIUM
    if p["occupation"] == "inverted":
        return band_mod.INVERTED
    return band_mod.OccupationState(p["n_c"], p["n_v"])


def run_stability(p, out, fmt):
    chain = _chain_params(p, p["u"])
    grid = band_mod.k_grid(chain, p["grid_size"])
    occ = _occupation(p)
    files, summary = [], {}
    for branch in _branches(p["branch"]):
        reports = stability.stability_scan(chain, occ, branch, grid)
        stem = f"stability_{branch.value}"
        if fmt == "csv":
            path = out / f"{stem}.csv"
            _write_atomic(path, stability.scan_to_csv(reports))
        else:
            path = out / f"{stem}.json"
            _write_atomic(path, _to_json({"reports": stability.scan_to_records(reports),
                                          "all_k_satisfied": stability.all_k_satisfied(reports)}))
        files.append(path.name)
        summary[branch.value] = {
            "points": len(reports),
            "cond1": sum(r.cond1 for r in reports),
            "cond2": sum(r.cond2 for r in reports),
            "cond3": sum(r.cond3 for r in reports),
            "all_satisfied": sum(r.all_satisfied for r in reports),
            "errors": sum(r.error is not None for r in reports),
            "all_k_satisfied": stability.all_k_satisfied(reports),
        }
    return {"files": files, "branches": summary}


def run_ground_state(p, out, fmt):
    chain = _chain_params(p)
    result = groundstate.minimize_dimerization(chain, p["method_tolerance"], z_max=p["z_max"])
    u_max = p["profile_u_max"]
    if u_max is None:
        u_max = p["z_max"] * chain.t0 / (2.0 * chain.alpha)
    us = np.linspace(-u_max, u_max, p["profile_points"])
    energies = groundstate.well_profile(chain, us)
    _write_atomic(out / "ground_state.json", _to_json(result.to_dict()))
    profile = _table(out, "well_profile", fmt, ("u_angstrom", "E_eV"), zip(us, energies))
    return {"files": ["ground_state.json", profile], "result": result.to_dict()}


def _tube_config(p):
    n = p["n"]
    if p["theta"] == "cosine":
        theta = rabi.CosineDispersion(p["omega0"], p["hopping"], p["interchain"],
                                      interchain_back=p["interchain_back"])
    else:
        theta = rabi.LinearDispersion(p["velocity"], p["omega0"])
    if p["kappa"] == "constant":
        kappa = rabi.ConstantCoupling(p["kappa0"], p["kappa_interchain"])
    else:
        kappa = rabi.CosineCoupling(p["kappa0"], p["kappa_modulation"],
                                   interchain=p["kappa_interchain"])
    grid = rabi.make_h_grid(p["grid_size"], p["grid_extent"])
    if any(not 0 <= c < n for c in p["envelope_chains"]):
        raise ConfigError("envelope_chains must index chains 0..n-1")
    cfg = rabi.TubeConfig(n=n, g=p["g"], l=p["l"], theta_profile=theta, kappa_profile=kappa,
                          h_grid=grid)
    env = rabi.gaussian_envelope(p["envelope_center"], p["envelope_width"],
                                 p["envelope_chains"], n)
    return cfg, env


def run_rabi(p, out, fmt):
    cfg, env = _tube_config(p)
    trace, spectrum = rabi.simulate(cfg, env, p["duration"], p["sample_rate"],
                                threshold=p["peak_threshold"])
    columns = (("t_s",) + tuple(f"inversion_chain_{j}" for j in range(cfg.n))
               + ("inversion_total",))
    rows = (np.column_stack([trace.times, trace.per_chain, trace.total])).tolist()
    files = [_table(out, "inversion", fmt, columns, rows),
             _table(out, "spectrum", fmt, ("frequency_Hz", "magnitude"),
                    zip(spectrum.frequencies, spectrum.magnitude))]
    summary = {
        "dominant_frequency_Hz": spectrum.dominant_frequency,
        "peak_frequencies_Hz": spectrum.peak_frequencies,
        "revival_frequencies_Hz": spectrum.revival_frequencies,
        "resolution_Hz": spectrum.resolution,
        "nyquist_bound_Hz": rabi.nyquist_frequency_bound(cfg),
    }
    _write_atomic(out / "rabi_summary.json", _to_json(summary))
    files.append("rabi_summary.json")
    return {"files": files, **summary}


def run_spectra_check(p, out, fmt):
    tables = spectra.load_fixtures(p["fixture"])
    report = spectra.regularity_report(tables)
    _write_atomic(out / "spectra_report.json", _to_json(report.to_dict()))
    files = ["spectra_report.json"]
    if fmt == "csv":
        rows = [(c.name, json.dumps(_jsonable(c.expected)), _jsonable(c.computed),
                 json.dumps(_jsonable(c.tolerance)), "" if c.passed is None else int(c.passed))
                for c in report.checks]
        files.append(_table(out, "spectra_report", fmt,
                            ("check", "expected_cm^-1", "computed_cm^-1", "tolerance_cm^-1",
                             "passed"), rows))
    return {"files": files, "all_passed": report.all_passed,
            "failures": [c.name for c in report.failures]}


RUNNERS = {
    "band": run_band,
    "stability": run_stability,
    "ground-state": run_ground_state,
    "rabi": run_rabi,
    "spectra-check": run_spectra_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssh-rabi", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--params", help="key = value parameter file (defaults if omitted)")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--print-config", action="store_true",
                        help="print the resolved parameters and exit")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        params = load_params(args.params, args.command)
        if args.print_config:
            sys.stdout.write(format_params(params, args.command))
            return EXIT_OK
        summary = RUNNERS[args.command](params, Path(args.out), args.format)
    except ModelConsistencyError as exc:
        print(f"model-consistency error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, SSHRabiError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(_to_json({"command": args.command, "status": "ok", **summary}))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
