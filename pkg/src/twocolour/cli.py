"""Command-line front end.

Usage:
    twocolour fringe --config run.json --pattern "s:2,0 i:1,1" --out scan.csv
    twocolour sensitivity --config run.json --out report.json
    twocolour distribution --config run.json --out dist.csv
    twocolour validate
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path as FilePath

import click

from .detection import DetectionPattern, PatternError, scan_all_patterns, scan_fringe, scan_json, visibility
from .fock import FockError, Path
from .metrology import (
    SensitivityError,
    baselines,
    combined_estimate,
    fringe_sensitivity,
    scenario_sensitivity,
    state_sensitivity,
)
from .scenario import ConfigError, Scenario
from .validation import run_validation

# per-fringe dL/SQL quoted for three measured four-photon fringes and their
# multiplicities among the nine outputs
QUOTED_FOUR_PHOTON = {"s:1,1 i:1,1": (1.18, 1), "s:2,0 i:1,1": (1.82, 4), "s:2,0 i:0,2": (1.75, 4)}
QUOTED_COMBINED = 0.72

EXIT_USAGE = 2
EXIT_FAILED = 1


def _fail(exc: Exception, code: int = EXIT_USAGE):
    click.echo(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}), err=True)
    sys.exit(code)


def _load(config: str) -> Scenario:
    try:
        text = FilePath(config).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {config}: {exc.strerror}") from None
    return Scenario.from_json(text)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        click.echo(text, nl=False)
    else:
        FilePath(path).write_text(text)


def _fmt(path: str | None, fmt: str | None) -> str:
    if fmt:
        return fmt
    return "json" if path and path.endswith(".json") else "csv"


@click.group()
def cli():
    """Two-colour entangled-photon interferometry simulator."""


@cli.command()
@click.option("--config", "config", required=True, type=str, help="Scenario JSON file.")
@click.option("--pattern", required=True, help='Detection pattern, e.g. "s:2,0 i:1,1".')
@click.option("--out", "out", default=None, help="Output file (default stdout).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None)
@click.option("--renormalize", is_flag=True, help="Renormalise over detected patterns.")
def fringe(config, pattern, out, fmt, renormalize):
    """Scan one detection pattern over the configured phase grid."""
    try:
        scenario = _load(config)
        pat = DetectionPattern.parse(pattern)
        scan = scan_fringe(scenario, pat, renormalize=renormalize)
        report = visibility(scan)
    except (ConfigError, PatternError, FockError, ValueError) as exc:
        _fail(exc)
    _write(out, scan_json(scan, report) if _fmt(out, fmt) == "json" else scan.to_csv())
    click.echo(
        f"pattern [{pat}] visibility={report.visibility:.6f} period={report.period:.6f} "
        f"harmonics={sorted(report.harmonic_weights)}",
        err=out in (None, "-"),
    )


def _per_pattern(scenario: Scenario) -> list[dict]:
    """Visibility and single-fringe sensitivity of every pattern that occurs."""
    rows = []
    for pat, scan in scan_all_patterns(scenario).items():
        row = {"pattern": str(pat), "visibility": visibility(scan).visibility}
        try:
            rep = fringe_sensitivity(scan)
            row["dL_over_sql"] = rep.dL_over_sql
            row["best_theta"] = rep.best_theta
        except SensitivityError:
            row["dL_over_sql"] = row["best_theta"] = None
        rows.append(row)
    return rows


@cli.command()
@click.option("--config", "config", required=True, type=str)
@click.option("--out", "out", default=None)
def sensitivity(config, out):
    """Quantum and classical path-length sensitivity of the configured state."""
    try:
        scenario = _load(config)
        if scenario.mode == "classical":
            raise ConfigError("sensitivity needs a multi-photon mode")
        reg = scenario.registry
        units = "natural" if reg.c == 1.0 else "physical"
        base = baselines(scenario.photons * scenario.nu, reg.omega_pump, units=units)
        comps = scenario.input_state.components
        quantum = state_sensitivity(comps[0][1], scenario.photons, scenario.nu) if len(comps) == 1 else None
        combined = scenario_sensitivity(scenario)
        rows = _per_pattern(scenario)
    except (ConfigError, PatternError, FockError, ValueError) as exc:
        _fail(exc)
    length = "c/omega_p" if units == "natural" else "m"
    report = {
        "scenario": scenario.to_dict(),
        "photons": scenario.photons,
        "qcrb": quantum.to_dict() if quantum else None,
        "baselines": {
            "sql_dL": {"value": base.sql_dL, "unit": length},
            "heisenberg_dL": {"value": base.heisenberg_dL, "unit": length},
            "energy_sql_dL": {"value": base.energy_sql_dL, "unit": length},
            "N": {"value": base.N, "unit": "photons"},
            "E": {"value": base.E, "unit": "hbar*omega_p" if units == "natural" else "J"},
        },
        "combined_cfi": combined.to_dict(),
        "per_pattern": rows,
    }
    if scenario.m == 4 and scenario.mode == "entangled":
        ratios, mult = zip(*QUOTED_FOUR_PHOTON.values())
        naive = combined_estimate(ratios, mult)
        report["quoted_four_photon_check"] = {
            "quoted_per_fringe": {k: {"dL_over_sql": r, "multiplicity": n} for k, (r, n) in QUOTED_FOUR_PHOTON.items()},
            "fisher_sum_of_quoted": naive,
            "quoted_combined": QUOTED_COMBINED,
            "note": "adding Fisher information of the quoted fringes does not give the quoted combined value; "
            "the combination procedure behind it is not specified",
        }
    _write(out, json.dumps(report, indent=2) + "\n")
    if quantum:
        click.echo(f"QCRB dL/SQL = {quantum.dL_over_sql:.6f}; best CFI dL/SQL = {combined.dL_over_sql:.6f}", err=True)


@cli.command()
@click.option("--config", "config", required=True, type=str)
@click.option("--out", "out", default=None)
def distribution(config, out):
    """One-arm photon-number distributions of the three m-photon states."""
    try:
        scenario = _load(config)
        m = scenario.m
        if m < 2:
            raise ConfigError("distribution needs m >= 2")
        flat = Scenario(m=m, mode="entangled").input_state
        binom = Scenario(m=m, mode="distinguishable").input_state
        hb = Scenario(m=m, mode="holland_burnett").input_state
        cols = [d.number_distribution(d.registry.select(path=Path.A)) for d in (flat, binom, hb)]
    except (ConfigError, FockError, ValueError) as exc:
        _fail(exc)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "P_flat", "P_binomial", "P_holland_burnett"])
    for n in range(m + 1):
        writer.writerow([n] + [repr(float(c.get(n, 0.0))) for c in cols])
    _write(out, buf.getvalue())


@cli.command()
@click.option("--cutoff", default=6, show_default=True, help="Photon cutoff used for the simulated states.")
@click.option("--points", default=721, show_default=True, help="Phase grid points over [0, 2pi].")
@click.option("--flip-delta-sign", is_flag=True, help="Fault injection: simulate with mirrored delta phases.")
def validate(cutoff, points, flip_delta_sign):
    """Check simulated probabilities against the analytic output states."""
    from .scenario import ThetaGrid

    try:
        checks = run_validation(cutoff=cutoff, grid=ThetaGrid(points=points), delta_sign=-1.0 if flip_delta_sign else 1.0)
    except (ConfigError, FockError, ValueError) as exc:
        _fail(exc)
    for check in checks:
        click.echo(check.line())
    failed = [c for c in checks if not c.passed]
    click.echo(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    if failed:
        sys.exit(EXIT_FAILED)


def main():
    cli()


if __name__ == "__main__":
    main()
