"""Command-line entry point: ``stawave <command> [--config FILE] [--seed N] [--out DIR]``.

Configs are flat JSON objects whose keys must appear in the defaults table
for the command (``--show-defaults`` prints it).  Every run writes its
outputs plus ``manifest.json`` listing the resolved config, the tool version
and a sha256 digest of every output file.  Nothing time-dependent is
written, so repeated runs with the same config and seed are byte-identical.

Exit codes: 0 success, 1 failed invariant check, 2 config error,
3 numeric precondition violated, 4 convergence failure.
"""
from __future__ import annotations

import argparse
import copy
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import TABLE, Multivector
from .canonical import NotVersor
from .checks import run_suite
from .dirac import (
    CoulombParams, NoBoundState, PlaneWaveParams, ShootingGrid, SupercriticalCoupling,
    dirac_residual, momentum_constraint, plane_wave, radial_csv, shoot_eigenvalue,
    spectrum_record,
)
from .fields import Grid4, write_field
from .gauge_study import SmoothFields, run_gauge_study
from .interference import (
    SPATIAL_PLANES, BeamState, DriftCounter, RegionTransform, pattern_even, pattern_mixed,
    plane_rotor, region_experiment, rotor_family,
)

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_PRECONDITION, EXIT_CONVERGENCE = 0, 1, 2, 3, 4

DEFAULTS_VERSION = 1
DEFAULTS: dict[str, dict] = {
    "check": {
        "corrupt_table": False,  # test hook: flip the sign of e1*e2
    },
    "spectrum": {
        "Z": 1,
        "alpha": 7.2973525693e-3,
        "mu": 1.0,
        "kappa_list": [-1, 1, -2],
        "n_r_max": 2,
        "r_min": 1e-6,
        "n_points": 4000,
        "write_radial": False,
    },
    "planewave": {
        "mu": 1.0,
        "rho": 1.0,
        "rapidity": 0.6,
        "axis": 3,
        "phase": 0.0,
        "center": [0.3, 0.1, -0.2, 0.4],
        "points": 9,
        "spacings": [0.2, 0.1, 0.05],
        "offshell_factor": 1.3,
    },
    "interfere": {
        "rho1": 1.0,
        "rho2": 1.0,
        "n_phase": 64,
        "r1": "1",
        "r2": "1",
        "validate": True,
    },
    "regions": {
        "rho1": 1.0,
        "rho2": 1.0,
        "n_phase": 64,
        "plane_a": "e21",
        "angle_a": 0.7,
        "plane_b": "e31",
        "angle_b": 0.4,
        "incoming_plane": "e31",
        "incoming_angle": 0.3,
        "family_size": 0,
    },
    "gauge": {
        "center": [0.2, -0.1, 0.3, 0.05],
        "points": 7,
        "spacings": [0.1, 0.05, 0.025],
        "write_fields": False,
    },
}


class ConfigError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


def _type_ok(value, default) -> bool:
    if isinstance(default, bool):
        return isinstance(value, bool)
    if isinstance(default, int):
        return isinstance(value, int) and not isinstance(value, bool)
    if isinstance(default, float):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if isinstance(default, str):
        return isinstance(value, str)
    if isinstance(default, list):
        return isinstance(value, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    return False


def resolve_config(command: str, path: str | None) -> dict:
    params = copy.deepcopy(DEFAULTS[command])
    if path is None:
        return params
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(raw) - set(params))
    if unknown:
        raise ConfigError(f"unknown keys for '{command}': {', '.join(unknown)}")
    for key, value in raw.items():
        if not _type_ok(value, params[key]):
            raise ConfigError(f"key '{key}' has the wrong type (expected {type(params[key]).__name__})")
        params[key] = value
    return params


class Run:
    """Collects output files for the manifest."""

    def __init__(self, out_dir: Path, command: str, seed: int, params: dict):
        self.out = out_dir
        self.out.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.seed = seed
        self.params = params
        self.files: list[Path] = []
        self.lines: list[str] = []

    def say(self, line: str) -> None:
        self.lines.append(line)
        print(line)

    def write_text(self, name: str, text: str) -> Path:
        p = self.out / name
        p.write_text(text)
        self.files.append(p)
        return p

    def write_json(self, name: str, obj) -> Path:
        return self.write_text(name, json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n")

    def add(self, path: Path) -> None:
        self.files.append(path)

    def manifest(self, status: int) -> None:
        outputs = [{"file": p.name, "sha256": hashlib.sha256(p.read_bytes()).hexdigest(),
                    "bytes": p.stat().st_size} for p in self.files]
        doc = {
            "tool": "stawave", "version": __version__, "defaults_version": DEFAULTS_VERSION,
            "command": self.command, "seed": self.seed, "config": self.params,
            "exit_code": status, "outputs": outputs,
        }
        (self.out / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# -- commands ---------------------------------------------------------------------

def run_check(run: Run) -> int:
    table = TABLE.corrupted() if run.params["corrupt_table"] else TABLE
    results = run_suite(run.seed, table)
    for r in results:
        run.say(r.line())
    failed = sum(not r.passed for r in results)
    run.say(f"{len(results) - failed}/{len(results)} invariants passed")
    run.write_text("check_report.txt", "\n".join(run.lines) + "\n")
    return EXIT_OK if failed == 0 else EXIT_CHECK


def run_spectrum(run: Run) -> int:
    p = run.params
    if p["n_r_max"] < 0 or not p["kappa_list"] or any(int(k) != k or k == 0 for k in p["kappa_list"]):
        raise ConfigError("kappa_list needs nonzero integers and n_r_max >= 0")
    kappas = [int(k) for k in p["kappa_list"]]
    try:
        params = CoulombParams(p["Z"], p["alpha"], p["mu"])
    except SupercriticalCoupling as exc:
        raise PreconditionError(str(exc)) from exc
    if params.Zalpha >= min(abs(k) for k in kappas):
        raise PreconditionError(f"Z alpha = {params.Zalpha:.6g} must be below min |kappa|")
    grid = ShootingGrid(r_min=p["r_min"], n_points=p["n_points"])
    records, unexpected = [], []
    for kappa in kappas:
        for n_r in range(p["n_r_max"] + 1):
            rec = spectrum_record(params, kappa, n_r, grid)
            d = rec.as_dict()
            d["relative_deviation"] = rec.relative_deviation
            if rec.error is None:
                d["status"] = "ok"
            elif kappa > 0 and n_r == 0:
                # the solver finds no kappa > 0 level without a node count of n_r - 1 >= 0
                d["status"] = "no_bound_state"
            else:
                d["status"] = "failed"
                unexpected.append((kappa, n_r))
            records.append(d)
            shown = "-" if rec.E_over_mu_shooting is None else f"{rec.E_over_mu_shooting:.15f}"
            run.say(f"kappa={kappa:+d} n_r={n_r} corrected={rec.E_over_mu_corrected:.15f} "
                    f"printed={rec.E_over_mu_printed:.15f} shooting={shown} status={d['status']}")
            if p["write_radial"] and rec.error is None:
                sol = shoot_eigenvalue(params, kappa, n_r, grid=grid)
                run.write_text(f"radial_kappa{kappa:+d}_nr{n_r}.csv", radial_csv(sol))
    devs = [d["relative_deviation"] for d in records if d["relative_deviation"] is not None]
    printed_devs = [abs(d["E_over_mu_printed"] - d["E_over_mu_shooting"]) / d["E_over_mu_shooting"]
                    for d in records if d["E_over_mu_shooting"] is not None]
    summary = {
        "records": records,
        "max_relative_deviation_corrected": max(devs) if devs else None,
        "max_relative_deviation_printed": max(printed_devs) if printed_devs else None,
    }
    run.write_json("spectrum.json", summary)
    run.say(f"max relative deviation corrected vs shooting: {summary['max_relative_deviation_corrected']:.3e}")
    if unexpected:
        raise ConvergenceError(f"eigenvalue search failed for (kappa, n_r) = {unexpected}")
    return EXIT_OK


def run_planewave(run: Run) -> int:
    p = run.params
    if p["axis"] not in (1, 2, 3) or len(p["center"]) != 4 or len(p["spacings"]) < 2:
        raise ConfigError("axis must be 1..3, center needs 4 entries and spacings at least 2")
    if p["points"] < 5:
        raise ConfigError("points must be at least 5")
    try:
        wave = PlaneWaveParams.boosted(p["mu"], p["rapidity"], p["axis"], p["rho"])
    except ValueError as exc:
        raise PreconditionError(str(exc)) from exc
    res = []
    for h in p["spacings"]:
        grid = Grid4.centered(p["center"], p["points"], h)
        res.append(dirac_residual(plane_wave(wave, grid, p["phase"]), p["mu"]))
    orders = [math.log(res[i] / res[i + 1]) / math.log(p["spacings"][i] / p["spacings"][i + 1])
              for i in range(len(res) - 1)]
    off = PlaneWaveParams(wave.rho, wave.u, (wave.p[0] * p["offshell_factor"],) + wave.p[1:], wave.mu)
    grid = Grid4.centered(p["center"], p["points"], p["spacings"][-1])
    off_res = dirac_residual(plane_wave(off, grid, p["phase"]), p["mu"])
    out = {
        "momentum": list(wave.p), "amplitude": wave.u.render(), "mass_shell": wave.mass_shell(),
        "momentum_constraint": momentum_constraint(wave), "spacings": p["spacings"],
        "residuals": res, "orders": orders, "offshell_momentum": list(off.p),
        "offshell_mass_shell": off.mass_shell(), "offshell_residual": off_res,
        "offshell_ratio": off_res / res[-1],
    }
    run.write_json("planewave.json", out)
    run.say(f"residuals {['%.3e' % r for r in res]} orders {['%.3f' % o for o in orders]}")
    run.say(f"off-shell residual {off_res:.3e} ({off_res / res[-1]:.1f}x the on-shell residual)")
    return EXIT_OK


def _parse_rotor(text: str, key: str) -> Multivector:
    try:
        return Multivector.parse(text)
    except ValueError as exc:
        raise ConfigError(f"cannot parse {key}: {exc}") from exc


def run_interfere(run: Run) -> int:
    p = run.params
    if p["n_phase"] < 2 or p["rho1"] <= 0 or p["rho2"] <= 0:
        raise ConfigError("need n_phase >= 2 and positive densities")
    phases = 2.0 * math.pi * np.arange(p["n_phase"]) / p["n_phase"]
    R1, R2 = _parse_rotor(p["r1"], "r1"), _parse_rotor(p["r2"], "r2")
    try:
        if R1.is_even() and R2.is_even() and R1 == Multivector.scalar(1.0) and R2 == R1:
            pat = pattern_even(p["rho1"], p["rho2"], phases)
        else:
            pat = pattern_mixed(R1, R2, phases, p["rho1"], p["rho2"], validate=p["validate"])
    except NotVersor as exc:
        raise PreconditionError(str(exc)) from exc
    closed = p["rho1"] + p["rho2"] + 2.0 * math.sqrt(p["rho1"] * p["rho2"]) * np.cos(phases)
    run.write_text("pattern.csv", pat.to_csv())
    sep = pat.even_even_scalar + pat.odd_odd_scalar + pat.even_odd_scalar - pat.cross_scalar
    summary = {
        "r1": R1.render(), "r2": R2.render(), "n_phase": p["n_phase"],
        "visibility": pat.visibility(),
        "max_deviation_from_2cos_law": float(np.max(np.abs(pat.intensity - closed))),
        "max_deviation_exact_vs_printed": float(np.max(np.abs(pat.intensity - pat.intensity_as_printed))),
        "max_odd_odd_scalar": float(np.max(np.abs(pat.odd_odd_scalar))),
        "max_split_residual": float(np.max(np.abs(sep))),
        "note": ("intensity_exact uses the full cross term, giving rho1 + rho2 + 2 sqrt(rho1 rho2) cos(phi) "
                 "for even rotors; intensity_as_printed uses E1 E2 - O1 O2 without the factor 2"),
    }
    run.write_json("interfere.json", summary)
    run.say(f"max |I - (rho1 + rho2 + 2 sqrt(rho1 rho2) cos phi)| = {summary['max_deviation_from_2cos_law']:.3e}")
    run.say(f"max |exact - as printed| = {summary['max_deviation_exact_vs_printed']:.3e} "
            "(the printed cosine law lacks the factor 2)")
    return EXIT_OK


def _plane(name: str, key: str) -> Multivector:
    if name not in SPATIAL_PLANES:
        raise ConfigError(f"{key} must be one of {sorted(SPATIAL_PLANES)}")
    return SPATIAL_PLANES[name]


def run_regions(run: Run) -> int:
    p = run.params
    if p["n_phase"] < 2 or p["family_size"] < 0:
        raise ConfigError("need n_phase >= 2 and family_size >= 0")
    phases = 2.0 * math.pi * np.arange(p["n_phase"]) / p["n_phase"]
    counter = DriftCounter()
    ref = BeamState(p["rho1"])
    inc = BeamState(p["rho2"], plane_rotor(_plane(p["incoming_plane"], "incoming_plane"), p["incoming_angle"]))
    ra = RegionTransform(plane_rotor(_plane(p["plane_a"], "plane_a"), p["angle_a"]), "a")
    rb = RegionTransform(plane_rotor(_plane(p["plane_b"], "plane_b"), p["angle_b"]), "b")
    exp = region_experiment(ref, inc, ra, rb, phases, counter)
    run.write_text("pattern_ab.csv", exp.pattern_ab.to_csv())
    run.write_text("pattern_ba.csv", exp.pattern_ba.to_csv())
    doc = {
        "experiments": exp.records("pattern_ab.csv", "pattern_ba.csv"),
        "max_pattern_difference": exp.max_difference,
        "max_prediction_error": float(np.max(np.abs(
            exp.pattern_ab.intensity - exp.pattern_ba.intensity - exp.predicted))),
    }
    run.say(f"commutator_norm = {exp.commutator_norm:.6e}, max pattern difference = {exp.max_difference:.6e}")
    if p["family_size"]:
        rng = np.random.default_rng(run.seed)
        rows, agree = [], 0
        for R0, Ra, Rb in rotor_family(rng, p["family_size"]):
            e = region_experiment(ref, BeamState(p["rho2"], R0), RegionTransform(Ra, "a"),
                                  RegionTransform(Rb, "b"), phases, counter)
            ok = (e.commutator_norm == 0.0) == (e.max_difference == 0.0)
            agree += ok
            rows.append({"commutator_norm": e.commutator_norm, "max_pattern_difference": e.max_difference,
                         "consistent": ok})
        doc["family"] = {"size": p["family_size"], "consistent": agree, "samples": rows}
        run.say(f"family: pattern difference = 0 iff commutator = 0 in {agree}/{p['family_size']} samples")
    doc["renormalizations"] = counter.renormalizations
    run.write_json("regions.json", doc)
    if p["family_size"] and doc["family"]["consistent"] != p["family_size"]:
        return EXIT_CHECK
    return EXIT_OK


def run_gauge(run: Run) -> int:
    p = run.params
    if len(p["center"]) != 4 or len(p["spacings"]) < 2 or p["points"] < 5:
        raise ConfigError("center needs 4 entries, spacings at least 2, points at least 5")
    study = run_gauge_study(run.seed, p["center"], p["points"], p["spacings"])
    run.write_json("gauge.json", study.as_dict())
    if p["write_fields"]:
        rng = np.random.default_rng(run.seed)
        psi, omega, R = SmoothFields.random(rng).sample(Grid4.centered(p["center"], p["points"], p["spacings"][0]))
        for name, f in (("psi", psi), ("omega", omega), ("rotor", R)):
            for path in write_field(run.out / name, f):
                run.add(path)
    run.say(f"Omega residuals {['%.3e' % r for r in study.omega_residuals]} "
            f"ratios {['%.2f' % r for r in study.ratios_omega]}")
    run.say(f"F residuals {['%.3e' % r for r in study.curvature_residuals]} "
            f"ratios {['%.2f' % r for r in study.ratios_curvature]}")
    run.say(f"constant rotor: {study.constant_omega_residual:.2e}, {study.constant_curvature_residual:.2e}")
    return EXIT_OK


COMMANDS = {
    "check": run_check, "spectrum": run_spectrum, "planewave": run_planewave,
    "interfere": run_interfere, "regions": run_regions, "gauge": run_gauge,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stawave", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"stawave {__version__}")
    parser.add_argument("--show-defaults", action="store_true", help="print the defaults table and exit")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="flat JSON file overriding defaults")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized suites (u64)")
        sp.add_argument("--out", default="stawave_out", help="output directory")
        sp.add_argument("--show-defaults", action="store_true", help="print this command's defaults and exit")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.show_defaults:
        table = DEFAULTS if args.command is None else {args.command: DEFAULTS[args.command]}
        print(json.dumps({"defaults_version": DEFAULTS_VERSION, "commands": table}, indent=2, sort_keys=True))
        return EXIT_OK
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG
    if not 0 <= args.seed < 2**64:
        print("error: seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    try:
        params = resolve_config(args.command, args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    run = Run(Path(args.out), args.command, args.seed, params)
    try:
        status = COMMANDS[args.command](run)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        status = EXIT_CONFIG
    except (PreconditionError, SupercriticalCoupling, NotVersor) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        status = EXIT_PRECONDITION
    except (ConvergenceError, NoBoundState) as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        status = EXIT_CONVERGENCE
    run.manifest(status)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
