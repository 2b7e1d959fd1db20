"""Sweep execution: analytic and Monte Carlo evaluation over a config grid.

Rows are one per (axis value, scheme, strategy, user).  Analytic strategy
rows (vbc/cbc/tas) carry closed-form outage and capacities together with the
shared MC outage columns; strategy "mc" rows carry the ergodic Monte Carlo
capacities.  One CSV per (ports, aperture) panel, plus a run manifest whose
bytes are a pure function of the configuration.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass

import numpy as np

from ..analytic import (
    AnalyticResult,
    average_capacity,
    average_capacity_tas,
)
from ..correlation import (
    BlockCorrelationModel,
    ChannelGeometry,
    build_jakes_covariance,
    default_block_count,
    eigen_spectrum,
    fit_block_model,
    model_distance,
)
from ..errors import ConfigError
from ..montecarlo import SimEstimate, _evaluate_noma, _evaluate_rsma, simulate_gains
from ..rsma import RsmaConfig, db_to_linear
from ..specfun import QuadratureSpec
from .config import ExperimentConfig

__all__ = ["SweepRow", "SweepResult", "run_experiment", "read_sweep_csv", "write_sweep_csv"]

CSV_SCHEMA = 1
CSV_COLUMNS = (
    "axis_value",
    "scheme",
    "strategy",
    "user",
    "op_analytic",
    "op_mc",
    "op_mc_stderr",
    "c_common",
    "c_private",
    "c_sum",
    "feasible",
    "fit_distance",
)


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    scheme: str
    strategy: str
    user: int
    op_analytic: float | None
    op_mc: float | None
    op_mc_stderr: float | None
    c_common: float | None
    c_private: float | None
    c_sum: float | None
    feasible: bool
    fit_distance: float | None


@dataclass
class SweepResult:
    config: ExperimentConfig
    panels: dict[tuple[int, float], list[SweepRow]]

    def all_rows(self) -> list[SweepRow]:
        out: list[SweepRow] = []
        for key in sorted(self.panels):
            out.extend(self.panels[key])
        return out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _rsma_at(config: ExperimentConfig, axis_value: float) -> RsmaConfig:
    """Materialise the RSMA operating point for one sweep-axis value."""
    snr_db = config.snr_db
    t_common = config.t_common
    split = config.private_split
    if config.axis == "snr_db":
        snr_db = axis_value
    elif config.axis == "t_common":
        t_common = axis_value
    elif config.axis == "t_private_1":
        split = (axis_value, 1.0 - axis_value)
    return RsmaConfig.from_db(
        num_users=config.users,
        snr_db=snr_db,
        t_common=t_common,
        private_split=split,
        common_threshold_db=config.common_threshold_db,
        private_threshold_db=config.private_threshold_db,
    )


class _FitCache:
    """One block-model fit per (ports, aperture, strategy)."""

    def __init__(self, config: ExperimentConfig):
        self._config = config
        self._cache: dict[tuple[int, float, str], tuple[BlockCorrelationModel, float]] = {}

    def get(self, ports: int, aperture: float, strategy: str):
        key = (ports, aperture, strategy)
        if key not in self._cache:
            cfg = self._config
            geom = ChannelGeometry(ports, aperture, cfg.mean_gain)
            lam = eigen_spectrum(build_jakes_covariance(geom))
            count = cfg.block_count
            if count is None:
                count = default_block_count(lam)
            model = fit_block_model(
                lam, count, strategy, cbc_rho=cfg.cbc_rho, mean_gain=cfg.mean_gain
            )
            self._cache[key] = (model, model_distance(lam, model))
        return self._cache[key]


class _GainCache:
    """One Monte Carlo channel draw per geometry (shared across the grid)."""

    def __init__(self, config: ExperimentConfig):
        self._config = config
        self._cache: dict[tuple[int | None, float | None], tuple] = {}

    def get(self, geom: ChannelGeometry | None):
        key = (geom.num_ports, geom.aperture) if geom is not None else (None, None)
        if key not in self._cache:
            self._cache[key] = simulate_gains(
                geom,
                self._config.users,
                self._config.trials,
                self._config.seed,
                mean_gain=self._config.mean_gain,
            )
        return self._cache[key]


def _analytic_rows(
    config: ExperimentConfig,
    axis_value: float,
    rsma: RsmaConfig,
    strategy: str,
    model: BlockCorrelationModel | None,
    distance: float | None,
    mc: SimEstimate | None,
) -> list[SweepRow]:
    from ..rsma import effective_thresholds

    outer = QuadratureSpec(
        config.quad_cutoff_scale * math.sqrt(config.mean_gain), config.quad_nodes_outer
    )
    inner = QuadratureSpec(
        config.quad_cutoff_scale * math.sqrt(config.mean_gain), config.quad_nodes_inner
    )
    if strategy == "tas":
        result = average_capacity_tas(rsma, config.mean_gain, outer)
    else:
        result = average_capacity(model, rsma, outer, inner, tag=strategy)
    thresholds = effective_thresholds(rsma)
    rows = []
    for u in range(rsma.num_users):
        rows.append(
            SweepRow(
                axis_value=axis_value,
                scheme="tas-rsma" if strategy == "tas" else "fas-rsma",
                strategy=strategy,
                user=u + 1,
                op_analytic=result.outage[u],
                op_mc=None if mc is None else mc.outage[u],
                op_mc_stderr=None if mc is None else mc.outage_stderr[u],
                c_common=result.capacity_common,
                c_private=result.capacity_private[u],
                c_sum=result.capacity_sum,
                feasible=thresholds[u].feasible,
                fit_distance=distance,
            )
        )
    return rows


def _mc_rows(axis_value: float, scheme: str, mc: SimEstimate, users: int) -> list[SweepRow]:
    rows = []
    for u in range(users):
        rows.append(
            SweepRow(
                axis_value=axis_value,
                scheme=scheme,
                strategy="mc",
                user=u + 1,
                op_analytic=None,
                op_mc=mc.outage[u],
                op_mc_stderr=mc.outage_stderr[u],
                c_common=mc.capacity_common,
                c_private=mc.capacity_private[u],
                c_sum=mc.capacity_sum,
                feasible=True,
                fit_distance=None,
            )
        )
    return rows


def run_experiment(config: ExperimentConfig, out_dir: str | None = None) -> SweepResult:
    """Execute the sweep; write one CSV per (ports, aperture) panel plus a
    manifest when ``out_dir`` (or config.output_dir) is given a value."""
    if not config.grid:
        raise ConfigError("sweep.grid: empty sweep grid")
    fits = _FitCache(config)
    gains = _GainCache(config)
    noma_th1 = (
        None
        if config.noma_stage1_threshold_db is None
        else db_to_linear(config.noma_stage1_threshold_db)
    )

    panels: dict[tuple[int, float], list[SweepRow]] = {}
    for ports in config.ports:
        for aperture in config.apertures:
            geom = ChannelGeometry(ports, aperture, config.mean_gain)
            rows: list[SweepRow] = []
            for axis_value in config.grid:
                rsma = _rsma_at(config, float(axis_value))
                estimates: dict[str, SimEstimate] = {}
                if config.mc_enabled:
                    for scheme in config.schemes:
                        g_geom = geom if scheme.startswith("fas") else None
                        g_sel, g_p1, mpg = gains.get(g_geom)
                        if scheme.endswith("rsma"):
                            estimates[scheme] = _evaluate_rsma(scheme, rsma, g_sel, g_p1, mpg)
                        else:
                            estimates[scheme] = _evaluate_noma(
                                scheme, rsma, g_sel, g_p1, mpg, config.noma_split, noma_th1
                            )
                for strategy in config.strategies:
                    if strategy == "tas":
                        mc = estimates.get("tas-rsma")
                        rows.extend(
                            _analytic_rows(config, float(axis_value), rsma, "tas", None, None, mc)
                        )
                    else:
                        model, dist = fits.get(ports, aperture, strategy)
                        mc = estimates.get("fas-rsma")
                        rows.extend(
                            _analytic_rows(
                                config, float(axis_value), rsma, strategy, model, dist, mc
                            )
                        )
                for scheme in config.schemes:
                    if scheme in estimates:
                        rows.extend(
                            _mc_rows(float(axis_value), scheme, estimates[scheme], rsma.num_users)
                        )
            panels[(ports, aperture)] = rows

    result = SweepResult(config=config, panels=panels)
    if out_dir is None:
        out_dir = config.output_dir
    if out_dir:
        _write_outputs(result, out_dir)
    return result


def _write_outputs(result: SweepResult, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    for (ports, aperture), rows in sorted(result.panels.items()):
        path = os.path.join(out_dir, _panel_filename(ports, aperture))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(write_sweep_csv(rows))
    manifest = result.config.canonical_text()
    digest = hashlib.sha256(manifest.encode("utf-8")).hexdigest()
    with open(os.path.join(out_dir, "manifest.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(manifest)
        fh.write(f"config_sha256 = {digest}\n")


def _panel_filename(ports: int, aperture: float) -> str:
    return f"sweep_N{ports}_W{_fmt(float(aperture))}.csv"


def write_sweep_csv(rows: list[SweepRow]) -> str:
    lines = [f"# schema={CSV_SCHEMA}", ",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(
            ",".join(
                _fmt(getattr(row, col)) for col in CSV_COLUMNS
            )
        )
    return "\n".join(lines) + "\n"


def read_sweep_csv(text: str) -> list[SweepRow]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != f"# schema={CSV_SCHEMA}":
        raise ConfigError(f"CSV schema line missing or unsupported: {lines[:1]}")
    header = lines[1].split(",")
    if tuple(header) != CSV_COLUMNS:
        raise ConfigError(f"unexpected CSV header: {header}")

    def opt_float(s: str) -> float | None:
        return None if s == "" else float(s)

    rows = []
    for ln in lines[2:]:
        parts = ln.split(",")
        rows.append(
            SweepRow(
                axis_value=float(parts[0]),
                scheme=parts[1],
                strategy=parts[2],
                user=int(parts[3]),
                op_analytic=opt_float(parts[4]),
                op_mc=opt_float(parts[5]),
                op_mc_stderr=opt_float(parts[6]),
                c_common=opt_float(parts[7]),
                c_private=opt_float(parts[8]),
                c_sum=opt_float(parts[9]),
                feasible=parts[10] == "true",
                fit_distance=opt_float(parts[11]),
            )
        )
    return rows
