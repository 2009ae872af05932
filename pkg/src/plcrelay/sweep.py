"""Parameter sweeps that regenerate the outage and energy curves as CSV."""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .config import ScenarioConfig
from .energy import scheme_energy
from .montecarlo import ci99_half_width, simulate_scheme
from .outage import scheme_outage, scheme_topology
from .power import SolverError, solve_scheme

logger = logging.getLogger(__name__)

# below this analytic outage only the confidence interval is used
MC_RELATIVE_FLOOR = 1e-4
MC_RELATIVE_TOL = 0.10
MC_CI_MULTIPLE = 3.0


class SweepError(RuntimeError):
    """A scheme failed at one sweep point."""


@dataclass
class SweepResult:
    columns: list
    rows: list
    header: list
    summary: str

    def to_csv(self) -> str:
        buf = io.StringIO()
        for line in self.header:
            buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(row[c]) for c in self.columns])
        return buf.getvalue()


def format_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def mc_agrees(analytic: float, p_hat: float, trials: int) -> bool:
    """Whether a Monte Carlo estimate is consistent with an analytic outage.

    Allowed gap is ``max(3 * CI99, 10% of analytic)``; for analytic values
    below 1e-4 only the interval counts. The interval is the wider of the
    ones built around the estimate and around the analytic value, so an
    estimate of exactly 0 is still judged against the sampling spread the
    analytic value implies.
    """
    ci = max(ci99_half_width(p_hat, trials), ci99_half_width(analytic, trials))
    allowed = MC_CI_MULTIPLE * ci
    if analytic >= MC_RELATIVE_FLOOR:
        allowed = max(allowed, MC_RELATIVE_TOL * analytic)
    return abs(p_hat - analytic) <= allowed


def sweep_points(cfg: ScenarioConfig) -> np.ndarray:
    s = cfg.sweep
    if s.scale == "log":
        return np.geomspace(s.start, s.stop, s.steps)
    return np.linspace(s.start, s.stop, s.steps)


def apply_variable(cfg: ScenarioConfig, variable: str, value: float) -> ScenarioConfig:
    """Return ``cfg`` with one sweep variable set to ``value``."""
    if variable == "distance":
        return replace(cfg, distance=value)
    if variable == "static_power":
        return replace(cfg, profile=replace(cfg.profile, p_static_tx=value, p_static_rx=value))
    if variable == "outage_target":
        return replace(cfg, outage_target=value)
    if variable == "impulse_probability":
        return replace(cfg, noise=replace(cfg.noise, p=value))
    raise ValueError(f"unknown sweep variable {variable!r}")


def evaluate_point(cfg: ScenarioConfig, scheme: str) -> dict:
    """Outage (fixed power) or solved power + energy for one scheme."""
    topo = scheme_topology(scheme, cfg.distance, cfg.fading)
    row = {"scheme": scheme}
    if cfg.sweep.metric == "outage":
        power = cfg.power
    else:
        power = solve_scheme(scheme, cfg.outage_target, topo, cfg.noise,
                             cfg.attenuation, cfg.xi, cfg.tol).power
    breakdown = scheme_outage(scheme, power, topo, cfg.noise, cfg.attenuation, cfg.xi)
    row["power"] = power
    row["outage"] = breakdown.end_to_end
    if cfg.sweep.metric == "energy":
        row["energy_per_bit"] = scheme_energy(scheme, power, breakdown,
                                              cfg.profile).energy_per_bit
    if cfg.sweep.validate_mc:
        est = simulate_scheme(scheme, power, topo, cfg.noise, cfg.attenuation, cfg.xi,
                              cfg.sweep.mc)
        row["mc_p_hat"] = est.p_hat
        row["mc_ci99"] = est.ci99_half_width
        row["mc_agree"] = mc_agrees(breakdown.end_to_end, est.p_hat, est.trials)
    return row


def _columns(cfg: ScenarioConfig) -> list:
    s = cfg.sweep
    cols = [s.variable]
    if s.family:
        cols.append(s.family)
    cols += ["scheme", "power", "outage"]
    if s.metric == "energy":
        cols.append("energy_per_bit")
    if s.validate_mc:
        cols += ["mc_p_hat", "mc_ci99", "mc_agree"]
    return cols


def _header(cfg: ScenarioConfig) -> list:
    s = cfg.sweep
    lines = [
        f"plcrelay {__version__}",
        f"metric={s.metric} variable={s.variable} scale={s.scale} "
        f"range=[{format_value(s.start)}, {format_value(s.stop)}] steps={s.steps}",
        f"assumptions: xi={format_value(cfg.xi)} bits/s/Hz, "
        f"p_static_tx={format_value(cfg.profile.p_static_tx)} W, "
        f"p_static_rx={format_value(cfg.profile.p_static_rx)} W, "
        f"fading sigma={format_value(cfg.fading.sigma)} dB, f_unit={cfg.attenuation.f_unit}",
        f"noise: p={format_value(cfg.noise.p)} sbnr_db={format_value(cfg.noise.sbnr_db)} "
        f"sinr_db={format_value(cfg.noise.sinr_db)}; fading mu={format_value(cfg.fading.mu)} dB",
    ]
    if s.metric == "outage":
        lines.append(f"fixed transmit power={format_value(cfg.power)} W")
    else:
        lines.append(f"outage target={format_value(cfg.outage_target)}, "
                     f"solver tol={format_value(cfg.tol)}")
    if s.validate_mc:
        lines.append(f"monte carlo: trials={s.mc.trials} seed={s.mc.seed}")
    return lines


def _summary(cfg: ScenarioConfig, rows: list) -> str:
    s = cfg.sweep
    metric = "energy_per_bit" if s.metric == "energy" else "outage"
    out = [f"{len(rows)} rows ({s.steps} points x {len(s.schemes)} schemes"
           + (f" x {len(s.family_values)} {s.family} values" if s.family else "") + ")"]
    for scheme in s.schemes:
        vals = [r[metric] for r in rows if r["scheme"] == scheme]
        out.append(f"  {scheme:<5} {metric}: min {min(vals):.4g}  max {max(vals):.4g}")
    if s.validate_mc:
        bad = [r for r in rows if not r["mc_agree"]]
        out.append(f"monte carlo disagreements: {len(bad)} of {len(rows)}")
        for r in bad:
            out.append(f"  {r['scheme']} at {s.variable}={r[s.variable]:.6g}: "
                       f"analytic {r['outage']:.4g} vs MC {r['mc_p_hat']:.4g}")
    return "\n".join(out)


def run_sweep(cfg: ScenarioConfig) -> SweepResult:
    """Evaluate every (family value, sweep point, scheme) in a fixed order."""
    s = cfg.sweep
    families = s.family_values if s.family else (None,)
    jobs = []
    for fam in families:
        base = apply_variable(cfg, s.family, fam) if s.family else cfg
        for value in sweep_points(cfg):
            point = apply_variable(base, s.variable, float(value))
            for scheme in s.schemes:
                jobs.append((fam, float(value), point, scheme))

    def run(job):
        fam, value, point, scheme = job
        try:
            row = evaluate_point(point, scheme)
        except SolverError as exc:
            raise SweepError(f"{scheme} at {s.variable}={value:g}: {exc}") from exc
        row[s.variable] = value
        if s.family:
            row[s.family] = fam
        return row

    if s.workers > 1:
        with ThreadPoolExecutor(max_workers=s.workers) as pool:
            rows = list(pool.map(run, jobs))
    else:
        rows = [run(job) for job in jobs]
    logger.info("sweep finished: %d rows", len(rows))
    return SweepResult(_columns(cfg), rows, _header(cfg), _summary(cfg, rows))
