"""Run every estimator on one load history and assemble a comparison report."""
from __future__ import annotations

import csv
import json
import math
import os
from contextlib import contextmanager
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .damage import SNCurve, damage_series, edl
from .errors import DataError, DegenerateSignal, DomainError, FatigueError
from .hysteresis import accumulated_damage, make_paper_bank, make_uniform_bank, preisach_bound
from .markov import mc_damage, rfm_to_markov, simulate
from .rainflow import build_rfm, count_cycles
from .signal import LevelGrid, TurningPoints, discretize, extract_turning_points, load_series
from .spectral import (bandwidth_params, benasciutti_rate, estimate_psd, narrowband_rate,
                       spectral_moments)

__all__ = ["RunConfig", "ComparisonReport", "parse_config", "load_config", "run_compare",
           "write_report", "SCHEMA_VERSION", "SEED_ENV"]

SCHEMA_VERSION = 1
SEED_ENV = "FATIGUEBENCH_SEED"


@dataclass(frozen=True)
class RunConfig:
    input_path: str = ""
    input_time_col: str = "0"
    input_value_col: str = "1"
    input_delimiter: str = ","
    sn_k: float = 4.0
    sn_K: float = 6.25e37
    sn_s_convention: str = "amplitude"
    rainflow_n_bins: int = 10
    rainflow_min_range: float = 0.0
    spectral_segment_len: int = 0  # 0 picks the estimator default
    spectral_overlap: float = 0.5
    spectral_window: str = "hann"
    markov_seed: int = 0
    markov_ensemble: int = 1
    hysteresis_mode: str = "paper3relay"
    hysteresis_n_levels: int = 32
    edl_f_eq: float = 1.0
    normalize: bool = True
    output_dir: str = "out"

    def __post_init__(self):
        SNCurve(self.sn_k, self.sn_K, self.sn_s_convention)
        if self.rainflow_n_bins < 2:
            raise DomainError("rainflow.n_bins must be >= 2")
        if self.rainflow_min_range < 0:
            raise DomainError("rainflow.min_range must be >= 0")
        if self.spectral_segment_len < 0:
            raise DomainError("spectral.segment_len must be >= 0")
        if not 0 <= self.spectral_overlap < 1:
            raise DomainError("spectral.overlap must be in [0, 1)")
        if self.markov_ensemble < 1:
            raise DomainError("markov.ensemble must be >= 1")
        if self.markov_seed < 0:
            raise DomainError("markov.seed must be >= 0")
        if self.hysteresis_mode not in ("paper3relay", "uniform"):
            raise DomainError("hysteresis.mode must be paper3relay or uniform")
        if self.hysteresis_n_levels < 2:
            raise DomainError("hysteresis.n_levels must be >= 2")
        if not self.edl_f_eq > 0:
            raise DomainError("edl.f_eq must be positive")

    @property
    def sn(self):
        return SNCurve(self.sn_k, self.sn_K, self.sn_s_convention)

    def columns(self):
        return tuple(int(c) if c.strip().isdigit() else c.strip()
                     for c in (self.input_time_col, self.input_value_col))

    def echo(self):
        """Dotted-key view of every setting."""
        return {_dotted(k): v for k, v in asdict(self).items()}


_SECTIONS = ("input", "sn", "rainflow", "spectral", "markov", "hysteresis", "edl", "output")


def _dotted(name):
    for sec in _SECTIONS:
        if name.startswith(sec + "_"):
            return sec + "." + name[len(sec) + 1:]
    return name


def _coerce(typ, raw, key):
    try:
        if typ is bool or typ == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if typ is int or typ == "int":
            return int(raw)
        if typ is float or typ == "float":
            return float(raw)
        return raw
    except ValueError:
        raise DataError(f"config key {key!r}: cannot parse {raw!r} as {typ}")


def parse_config(text, overrides=None):
    """Parse ``key = value`` lines with dotted keys; ``#`` starts a comment.

    Unknown keys are rejected. ``overrides`` (a dotted-key dict) is applied
    last. The environment variable ``FATIGUEBENCH_SEED`` overrides
    ``markov.seed``.
    """
    known = {_dotted(f.name): f for f in fields(RunConfig)}
    values = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"config line {n}: expected 'key = value'", line=n)
        key, raw = (p.strip() for p in line.split("=", 1))
        if key not in known:
            raise DataError(f"config line {n}: unknown key {key!r}", line=n)
        values[key] = raw
    for key, raw in (overrides or {}).items():
        if key not in known:
            raise DataError(f"unknown config key {key!r}")
        values[key] = str(raw)
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        values["markov.seed"] = env.strip()
    kwargs = {known[k].name: _coerce(known[k].type, v, k) for k, v in values.items()}
    return RunConfig(**kwargs)


def load_config(path, overrides=None):
    text = Path(path).read_text(encoding="utf-8")
    cfg = parse_config(text, overrides)
    if cfg.input_path and not os.path.isabs(cfg.input_path):
        # relative input paths resolve against the config file's directory
        resolved = str(Path(path).parent / cfg.input_path)
        cfg = RunConfig(**{**asdict(cfg), "input_path": resolved})
    return cfg


@dataclass
class ComparisonReport:
    t: np.ndarray
    curves: dict  # method -> accumulated damage on t
    increments: dict  # method -> instantaneous damage on t
    final_damage: dict
    normalization: dict
    normalized: dict
    edl: float
    spectral: dict
    markov: dict
    provenance: dict

    def to_dict(self):
        return {
            "schema": SCHEMA_VERSION,
            "final_damage": self.final_damage,
            "edl": self.edl,
            "normalization": self.normalization,
            "spectral": self.spectral,
            "markov": self.markov,
            "provenance": self.provenance,
        }

    def to_json(self):
        return json.dumps(_jsonable(self.to_dict()), indent=2, sort_keys=True) + "\n"


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    return x


@contextmanager
def _stage(method):
    try:
        yield
    except FatigueError as e:
        raise type(e)(f"[{method}] {e}") from e


def _on_axis(n, positions, increments):
    return np.bincount(np.asarray(positions, dtype=np.int64), weights=increments, minlength=n)


def run_compare(cfg, series=None):
    """Run rainflow, spectral, Markov and hysteresis estimators on one series.

    Parameters
    ----------
    cfg : RunConfig
    series : TimeSeries, optional
        Used instead of reading ``cfg.input_path``.
    """
    sn = cfg.sn
    with _stage("input"):
        s = series if series is not None else load_series(
            cfg.input_path, cfg.columns(), cfg.input_delimiter)
    n = len(s)
    t = np.asarray(s.t)
    duration = s.duration

    with _stage("rainflow"):
        tp = extract_turning_points(s, cfg.rainflow_min_range)
        cycles = count_cycles(tp)
        rfc = damage_series(cycles, sn, s)

    with _stage("spectral"):
        spectral = {"duration": duration}
        try:
            psd = estimate_psd(s, cfg.spectral_segment_len or None, cfg.spectral_overlap,
                               cfg.spectral_window)
            m = spectral_moments(psd)
            spectral["lambda"] = list(m.as_tuple())
            spectral["psd"] = psd.meta
            bw = bandwidth_params(m)
            d_nb = narrowband_rate(m, sn)
            d_b, fac = benasciutti_rate(m, sn, return_factor=True)
            spectral.update(alpha1=bw.alpha1, alpha2=bw.alpha2, narrowband_rate=d_nb,
                            benasciutti_rate=d_b, benasciutti_factor=fac,
                            narrowband_damage=d_nb * duration,
                            benasciutti_damage=d_b * duration)
        except DegenerateSignal as e:
            spectral["error"] = str(e)

    with _stage("markov"):
        grid = LevelGrid.covering(tp.v, cfg.rainflow_n_bins)
        dtp = discretize(tp, grid)
        rfm = build_rfm(count_cycles(TurningPoints(dtp.idx, dtp.values(), n)), grid)
        seeds = [cfg.markov_seed + i for i in range(cfg.markov_ensemble)]
        mc_inc = np.zeros(n)
        finals = []
        if rfm.total > 0 and len(tp) >= 2:
            model = rfm_to_markov(rfm)
            for seed in seeds:
                sim = simulate(model, len(tp), seed)
                ds = mc_damage(sim, model, sn, times=np.arange(len(tp)))
                step_inc = ds.increment
                mc_inc += _on_axis(n, tp.idx[:len(step_inc)], step_inc)
                finals.append(ds.final)
            mc_inc /= len(seeds)
        markov = {"seeds": seeds, "finals": finals, "rfm": rfm.counts.tolist(),
                  "grid": grid.to_dict(), "n_steps": len(tp),
                  "mean_final": float(np.mean(finals)) if finals else 0.0,
                  "std_final": float(np.std(finals)) if finals else 0.0}

    with _stage("hysteresis"):
        M = preisach_bound(s)
        if M > 0:
            bank = (make_paper_bank(M) if cfg.hysteresis_mode == "paper3relay"
                    else make_uniform_bank(cfg.hysteresis_n_levels, M, sn))
            hyst_inc = accumulated_damage(bank, s).increment
        else:
            hyst_inc = np.zeros(n)

    increments = {"rfc": rfc.increment, "mc": mc_inc, "hysteresis": hyst_inc}
    raw_final = {k: float(np.cumsum(v)[-1]) for k, v in increments.items()}

    normalization = {"enabled": cfg.normalize}
    normalized = {}
    if cfg.normalize:
        with _stage("normalize"):
            ref = raw_final["rfc"]
            if not ref > 0:
                raise DomainError("RFC damage is zero; nothing to normalize against")
            for k in ("mc", "hysteresis"):
                if raw_final[k] > 0:
                    c = ref / raw_final[k]
                    increments[k] = increments[k] * c
                else:
                    c = None
                normalization[k] = c
            for k, inc in increments.items():
                acc = np.cumsum(inc) / ref
                if raw_final[k] > 0:
                    acc[-1] = 1.0  # scaled to the reference by construction
                normalized[k] = acc
    curves = {k: np.cumsum(v) for k, v in increments.items()}
    final = {k: float(v[-1]) for k, v in curves.items()}

    with _stage("edl"):
        s_eq = edl(raw_final["rfc"], duration, cfg.edl_f_eq, sn) if duration > 0 else 0.0

    provenance = {
        "config": cfg.echo(),
        "versions": {"fatiguebench": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__},
        "seeds": seeds,
        "n_samples": n,
        "n_turning_points": len(tp),
        "n_cycles": len(cycles),
    }
    return ComparisonReport(t=t, curves=curves, increments=increments,
                            final_damage={"raw": raw_final, "reported": final},
                            normalization=normalization, normalized=normalized, edl=s_eq,
                            spectral=spectral, markov=markov, provenance=provenance)


def write_report(report, out_dir):
    """Write ``report.json`` and ``curves.csv`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    cols = ["t"] + [f"{k}_accumulated" for k in report.curves]
    cols += [f"{k}_increment" for k in report.increments]
    cols += [f"{k}_normalized" for k in report.normalized]
    data = [report.t] + list(report.curves.values()) + list(report.increments.values())
    data += list(report.normalized.values())
    with open(out / "curves.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in zip(*data):
            w.writerow([repr(float(x)) for x in row])
    return out
