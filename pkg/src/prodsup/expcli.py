"""
Experiment sweeps and command-line front end.

Each sweep writes CSV rows with one fixed header (see :data:`CSV_COLUMNS`);
columns that do not apply to an experiment are left empty. All sweeps run at
the allocation that maximizes the dynamic user's rate.

Usage::

    prodsup --experiment rate_vs_snr --nd 2 --ns 4 --td 5 \\
        --snr-grid -20:30:5 --samples 10000 --seed 7 --out fig2.csv
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import rates
from .errors import ConfigError
from .model import SystemConfig, make_config, superposition_power_from_budget, validate_config
from .montecarlo import DEFAULT_SAMPLES, McSettings, default_seed
from .powalloc import optimal_allocation, optimal_baseline_allocation

CSV_COLUMNS = [
    "experiment", "rho_db", "n_dyn", "n_stat", "m_tx", "t_dyn", "c_tau", "c_delta",
    "r_dyn_ps", "se_dyn_ps", "r_stat_ps", "se_stat_ps", "r_dyn_base", "se_dyn_base",
    "r_stat_coh", "se_stat_coh", "r_stat_ic", "se_stat_ic",
]

EXPERIMENTS = ("rate_vs_snr", "antenna_sweep", "coherence_sweep", "ic_compare", "region")

# grid field each experiment sweeps over
_GRID_FIELD = {
    "rate_vs_snr": "snr_db_grid",
    "ic_compare": "snr_db_grid",
    "antenna_sweep": "n_static_grid",
    "coherence_sweep": "t_grid",
    "region": "snr_db_grid",
}

REGION_POINTS = 11
FRONTIER_POINTS = 9


@dataclass(frozen=True)
class SweepSpec:
    experiment: str
    cfg: SystemConfig
    mc: McSettings
    snr_db_grid: Optional[tuple] = None
    n_static_grid: Optional[tuple] = None
    t_grid: Optional[tuple] = None
    snr_db: float = 10.0
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("unknown-experiment", f"{self.experiment!r} is not one of {EXPERIMENTS}")
        wanted = _GRID_FIELD[self.experiment]
        for name in ("snr_db_grid", "n_static_grid", "t_grid"):
            grid = getattr(self, name)
            if name == wanted:
                if not grid:
                    raise ConfigError("empty-grid", f"{self.experiment} needs a nonempty {name}")
                if list(grid) != sorted(grid):
                    raise ConfigError("unsorted-grid", f"{name} must be sorted ascending")
            elif grid is not None:
                raise ConfigError("extra-grid", f"{self.experiment} does not use {name}")


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def _row(experiment, rho_db, cfg, **values):
    row = dict.fromkeys(CSV_COLUMNS)
    row.update(experiment=experiment, rho_db=rho_db, n_dyn=cfg.n_dynamic, n_stat=cfg.n_static,
               m_tx=cfg.m_tx, t_dyn=cfg.t_coh_dynamic)
    row.update(values)
    return row


def _put(row, key, est):
    row[f"r_{key}"] = est.mean
    row[f"se_{key}"] = est.std_error


def _ps_point(cfg, rho):
    alloc = optimal_allocation(cfg, rho)
    power = superposition_power_from_budget(cfg, rho, alloc.c_delta_star)
    return alloc, power


def run_rate_vs_snr(spec: SweepSpec) -> list:
    """Both schemes over an SNR grid: PS rates, TDMA single-user rates."""
    cfg, mc = validate_config(spec.cfg), spec.mc
    rows = []
    for rho_db in spec.snr_db_grid:
        rho = db_to_linear(rho_db)
        alloc, power = _ps_point(cfg, rho)
        row = _row("rate_vs_snr", rho_db, cfg, c_tau=power.c_tau, c_delta=power.c_delta)
        _put(row, "dyn_ps", rates.rate_dynamic_ps(cfg, power, mc))
        _put(row, "stat_ps", rates.rate_static_ps(cfg, power, mc))
        _put(row, "dyn_base", rates.rate_dynamic_baseline(cfg, optimal_baseline_allocation(cfg, rho), mc))
        _put(row, "stat_coh", rates.rate_static_coherent(cfg, rho, mc))
        rows.append(row)
    return rows


def run_antenna_sweep(spec: SweepSpec) -> list:
    """Static antenna count sweep with ``M = max(N_d, N_s)``; the dynamic gap is ``r_dyn_base - r_dyn_ps``."""
    rho = db_to_linear(spec.snr_db)
    rows = []
    for ns in spec.n_static_grid:
        cfg = make_config(spec.cfg.n_dynamic, ns, spec.cfg.t_coh_dynamic, spec.cfg.t_coh_static)
        alloc, power = _ps_point(cfg, rho)
        row = _row("antenna_sweep", spec.snr_db, cfg, c_tau=power.c_tau, c_delta=power.c_delta)
        _put(row, "dyn_ps", rates.rate_dynamic_ps(cfg, power, spec.mc))
        _put(row, "stat_ps", rates.rate_static_ps(cfg, power, spec.mc))
        _put(row, "dyn_base", rates.rate_dynamic_baseline(cfg, optimal_baseline_allocation(cfg, rho), spec.mc))
        rows.append(row)
    return rows


def run_coherence_sweep(spec: SweepSpec) -> list:
    rho = db_to_linear(spec.snr_db)
    rows = []
    for t in spec.t_grid:
        cfg = make_config(spec.cfg.n_dynamic, spec.cfg.n_static, t)
        alloc, power = _ps_point(cfg, rho)
        row = _row("coherence_sweep", spec.snr_db, cfg, c_tau=power.c_tau, c_delta=power.c_delta)
        _put(row, "dyn_ps", rates.rate_dynamic_ps(cfg, power, spec.mc))
        _put(row, "stat_ps", rates.rate_static_ps(cfg, power, spec.mc))
        rows.append(row)
    return rows


def run_ic_compare(spec: SweepSpec) -> list:
    """Static rate with and without interference cancellation over an SNR grid."""
    cfg = validate_config(spec.cfg)
    rows = []
    for rho_db in spec.snr_db_grid:
        rho = db_to_linear(rho_db)
        alloc, power = _ps_point(cfg, rho)
        row = _row("ic_compare", rho_db, cfg, c_tau=power.c_tau, c_delta=power.c_delta)
        _put(row, "stat_ps", rates.rate_static_ps(cfg, power, spec.mc))
        _put(row, "stat_ic", rates.rate_static_ic(cfg, power, spec.mc))
        rows.append(row)
    return rows


def run_region(spec: SweepSpec) -> list:
    """Rate-region pieces at each SNR.

    ``region_tdma`` rows hold time-sharing points in the baseline columns
    (``r_dyn_base`` = p R_d, ``r_stat_coh`` = (1-p) R_s). ``region_ps`` is the
    optimized operating point and ``region_frontier`` rows sweep ``c_delta``
    over the open interval ``(0, a)``.
    """
    cfg, mc = validate_config(spec.cfg), spec.mc
    rows = []
    for rho_db in spec.snr_db_grid:
        rho = db_to_linear(rho_db)
        r_dyn = rates.rate_dynamic_baseline(cfg, optimal_baseline_allocation(cfg, rho), mc)
        r_stat = rates.rate_static_coherent(cfg, rho, mc)
        for point in rates.tdma_region(r_dyn, r_stat, REGION_POINTS):
            p = point.share_p
            rows.append(_row("region_tdma", rho_db, cfg,
                             r_dyn_base=point.r_dynamic, se_dyn_base=p * r_dyn.std_error,
                             r_stat_coh=point.r_static, se_stat_coh=(1 - p) * r_stat.std_error))
        alloc, power = _ps_point(cfg, rho)
        rows.append(_ps_row("region_ps", rho_db, cfg, power, mc))
        for frac in np.linspace(0.0, 1.0, FRONTIER_POINTS + 2)[1:-1]:
            frontier = superposition_power_from_budget(cfg, rho, frac * alloc.a)
            rows.append(_ps_row("region_frontier", rho_db, cfg, frontier, mc))
    return rows


def _ps_row(label, rho_db, cfg, power, mc):
    row = _row(label, rho_db, cfg, c_tau=power.c_tau, c_delta=power.c_delta)
    _put(row, "dyn_ps", rates.rate_dynamic_ps(cfg, power, mc))
    _put(row, "stat_ps", rates.rate_static_ps(cfg, power, mc))
    return row


RUNNERS = {
    "rate_vs_snr": run_rate_vs_snr,
    "antenna_sweep": run_antenna_sweep,
    "coherence_sweep": run_coherence_sweep,
    "ic_compare": run_ic_compare,
    "region": run_region,
}


def run(spec: SweepSpec) -> list:
    return RUNNERS[spec.experiment](spec)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(rows, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])


def csv_text(rows) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def plot_script(spec: SweepSpec, csv_path: str) -> str:
    """A gnuplot script that draws the sweep from the CSV by column name."""
    x_col = {"antenna_sweep": "n_stat", "coherence_sweep": "t_dyn"}.get(spec.experiment, "rho_db")
    series = {
        "rate_vs_snr": ["r_dyn_ps", "r_stat_ps", "r_dyn_base", "r_stat_coh"],
        "antenna_sweep": ["r_dyn_ps", "r_stat_ps", "r_dyn_base"],
        "coherence_sweep": ["r_dyn_ps", "r_stat_ps"],
        "ic_compare": ["r_stat_ps", "r_stat_ic"],
        "region": ["r_stat_ps"],
    }[spec.experiment]
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{x_col}'",
        "set ylabel 'rate (bits/channel use)'",
    ]
    if spec.experiment == "region":
        lines.append("set xlabel 'R_d'")
        plots = [
            f"'{csv_path}' using (strcol('experiment') eq 'region_tdma' ? column('r_dyn_base') : 1/0):'r_stat_coh' with lines title 'TDMA'",
            f"'{csv_path}' using (strcol('experiment') ne 'region_tdma' ? column('r_dyn_ps') : 1/0):'r_stat_ps' with points title 'PS'",
        ]
    else:
        plots = [f"'{csv_path}' using '{x_col}':'{s}' with linespoints title '{s}'" for s in series]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- CLI

def parse_grid(text, cast=float):
    """``min:max:step`` (inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        lo, hi, step = (float(x) for x in text.split(":"))
        if step <= 0:
            raise ConfigError("bad-grid", f"grid step must be positive in {text!r}")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        values = [lo + k * step for k in range(count)]
        return tuple(cast(round(v, 12)) if cast is float else cast(v) for v in values)
    return tuple(cast(x) for x in text.split(",") if x.strip())


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError("config-syntax", f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


_DEFAULTS = {
    "experiment": "rate_vs_snr",
    "nd": "2",
    "ns": "4",
    "td": "5",
    "snr_db": "10",
    "snr_grid": "-20:30:5",
    "ns_grid": "2,4,8,16",
    "td_grid": "4,5,8,10,20",
    "samples": str(DEFAULT_SAMPLES),
    "workers": "1",
}


def build_parser():
    p = argparse.ArgumentParser(prog="prodsup", description=__doc__.split("\n\n")[0])
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--nd", type=int, help="dynamic user antennas")
    p.add_argument("--ns", type=int, help="static user antennas")
    p.add_argument("--td", type=int, help="dynamic coherence time (symbols)")
    p.add_argument("--snr-db", type=float, help="fixed SNR for antenna/coherence sweeps")
    p.add_argument("--snr-grid", help="SNR grid in dB, min:max:step or a,b,c")
    p.add_argument("--ns-grid", help="static antenna grid for antenna_sweep")
    p.add_argument("--td-grid", help="coherence grid for coherence_sweep")
    p.add_argument("--samples", type=int, help="Monte Carlo samples per rate")
    p.add_argument("--seed", type=lambda s: int(s, 0), help="root seed (default: $PRODSUP_SEED)")
    p.add_argument("--workers", type=int, help="parallel Monte Carlo workers")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--plot-script", help="also write a gnuplot script here")
    return p


def spec_from_args(args) -> SweepSpec:
    settings = dict(_DEFAULTS)
    if args.config:
        settings.update(read_config_file(args.config))
    for key, value in vars(args).items():
        if value is not None and key != "config":
            settings[key] = str(value)
    seed = int(settings["seed"], 0) if "seed" in settings else default_seed()
    experiment = settings["experiment"]
    cfg = make_config(int(settings["nd"]), int(settings["ns"]), int(settings["td"]))
    mc = McSettings(n_samples=int(settings["samples"]), root_seed=seed, workers=int(settings["workers"]),
                    max_samples=max(int(settings["samples"]), 1_000_000))
    grids = {}
    grid_field = _GRID_FIELD.get(experiment)
    if grid_field == "snr_db_grid":
        grids["snr_db_grid"] = parse_grid(settings["snr_grid"])
    elif grid_field == "n_static_grid":
        grids["n_static_grid"] = parse_grid(settings["ns_grid"], int)
    elif grid_field == "t_grid":
        grids["t_grid"] = parse_grid(settings["td_grid"], int)
    return SweepSpec(experiment=experiment, cfg=cfg, mc=mc, snr_db=float(settings["snr_db"]),
                     output_path=settings.get("out"), **grids)


def _join_grid_values(argv):
    # "-20:30:5" looks like an option to argparse; glue it to its flag
    out, it = [], iter(argv)
    for tok in it:
        if tok in ("--snr-grid", "--ns-grid", "--td-grid"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(_join_grid_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        spec = spec_from_args(args)
        rows = run(spec)
        text = csv_text(rows)
        if spec.output_path:
            with open(spec.output_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if args.plot_script:
            with open(args.plot_script, "w", encoding="utf-8") as fh:
                fh.write(plot_script(spec, spec.output_path or "-"))
    except Exception as exc:  # every failure becomes one machine-readable line
        line = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ConfigError):
            line["constraint"] = exc.constraint
        sys.stderr.write(json.dumps(line) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
